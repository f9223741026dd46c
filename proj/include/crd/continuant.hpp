#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polygon.hpp"

namespace crd {

// All indices in this header are 1-based and cyclic in c: c_{k+n} = c_k.
template <std::floating_point R> Complex<R> cidx(const CVec<R>& c, long k) {
    long n = static_cast<long>(c.size());
    return c[static_cast<std::size_t>((((k - 1) % n) + n) % n)];
}

template <std::floating_point R> Complex<R> product(const CVec<R>& c) {
    Complex<R> p(1);
    for (auto& x : c) p *= x;
    return p;
}

// D_{i,j}(lambda) by the three-term recurrence D_{i,j} = D_{i,j-1} - lambda c_j D_{i,j-2}.
template <std::floating_point R> Complex<R> continuant(const CVec<R>& c, long i, long j, Complex<R> lambda = Complex<R>(1)) {
    if (j < i - 2) throw Error(Errc::WindowOrderViolation, "continuant window with j < i - 2");
    Complex<R> prev2(1), prev1(1);
    for (long k = i; k <= j; ++k) {
        Complex<R> cur = prev1 - lambda * cidx(c, k) * prev2;
        prev2 = prev1;
        prev1 = cur;
    }
    return prev1;
}

// Backward recurrence D_{i,j} = D_{i+1,j} - lambda c_i D_{i+2,j}.
template <std::floating_point R>
Complex<R> continuant_backward(const CVec<R>& c, long i, long j, Complex<R> lambda = Complex<R>(1)) {
    if (j < i - 2) throw Error(Errc::WindowOrderViolation, "continuant window with j < i - 2");
    Complex<R> next2(1), next1(1);
    for (long k = j; k >= i; --k) {
        Complex<R> cur = next1 - lambda * cidx(c, k) * next2;
        next2 = next1;
        next1 = cur;
    }
    return next1;
}

// Subsets of {1..n} (or of a window [lo, hi]) without consecutive elements.
class SparseSubsets {
public:
    SparseSubsets(long n, long k, bool cyclic) : lo_(1), hi_(n), k_(k), cyclic_(cyclic) {}
    static SparseSubsets window(long lo, long hi, long k) {
        SparseSubsets s(hi - lo + 1, k, false);
        s.lo_ = lo;
        s.hi_ = hi;
        return s;
    }

    std::vector<std::vector<long>> all() const {
        std::vector<std::vector<long>> out;
        std::vector<long> cur;
        rec(lo_, cur, out);
        return out;
    }

    // n/(n-k) C(n-k, k) for cyclic subsets, C(n-k+1, k) for a path of length n
    static std::uint64_t count(long n, long k, bool cyclic) {
        if (k < 0) return 0;
        if (k == 0) return 1;
        if (cyclic) {
            if (2 * k > n) return 0;
            return static_cast<std::uint64_t>(n) * binom(n - k, k) / static_cast<std::uint64_t>(n - k);
        }
        return binom(n - k + 1, k);
    }

    static std::uint64_t binom(long a, long b) {
        if (b < 0 || a < b) return 0;
        std::uint64_t r = 1;
        for (long t = 1; t <= b; ++t) r = r * static_cast<std::uint64_t>(a - b + t) / static_cast<std::uint64_t>(t);
        return r;
    }

private:
    void rec(long next, std::vector<long>& cur, std::vector<std::vector<long>>& out) const {
        if (static_cast<long>(cur.size()) == k_) {
            if (cyclic_ && k_ >= 2 && cur.front() == lo_ && cur.back() == hi_) return;
            out.push_back(cur);
            return;
        }
        for (long t = next; t <= hi_; ++t) {
            cur.push_back(t);
            rec(t + 2, cur, out);
            cur.pop_back();
        }
    }

    long lo_, hi_, k_;
    bool cyclic_;
};

// Euler's rule: D_{i,j}(lambda) = sum over sparse I in [i,j] of (-lambda)^|I| c_I. Test oracle.
template <std::floating_point R>
Complex<R> continuant_by_euler(const CVec<R>& c, long i, long j, Complex<R> lambda = Complex<R>(1)) {
    if (j < i - 2) throw Error(Errc::WindowOrderViolation, "continuant window with j < i - 2");
    if (j - i + 1 > 24) throw Error(Errc::WindowTooLarge, "Euler enumeration limited to windows of length 24");
    Complex<R> sum(0);
    long len = j - i + 1;
    for (long k = 0; 2 * k <= len + 1; ++k) {
        for (auto& I : SparseSubsets::window(i, j, k).all()) {
            Complex<R> t(1);
            for (long s : I) t *= -lambda * cidx(c, s);
            sum += t;
        }
    }
    return sum;
}

// Elementary sums of products over sparse subsets of the path c_lo..c_hi, by size.
template <std::floating_point R> CVec<R> path_sparse_sums(const CVec<R>& c, long lo, long hi) {
    long len = std::max(0L, hi - lo + 1);
    // e0[k]: sparse sums over the prefix with last element excluded; e1[k]: included
    CVec<R> e0(static_cast<std::size_t>(len / 2 + 2), Complex<R>(0)), e1 = e0;
    e0[0] = 1;
    for (long t = lo; t <= hi; ++t) {
        Complex<R> ct = cidx(c, t);
        CVec<R> n0 = e0, n1(e0.size(), Complex<R>(0));
        for (std::size_t k = 0; k < e0.size(); ++k) n0[k] += e1[k];
        for (std::size_t k = 1; k < e0.size(); ++k) n1[k] = ct * e0[k - 1];
        e0 = std::move(n0);
        e1 = std::move(n1);
    }
    for (std::size_t k = 0; k < e0.size(); ++k) e0[k] += e1[k];
    return e0;
}

// F_0..F_{floor(n/2)}: sums of c_I over cyclically sparse I, split by whether 1 is in I.
template <std::floating_point R> CVec<R> F_all(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    long m = n / 2;
    CVec<R> A = path_sparse_sums(c, 2, n);
    CVec<R> B = path_sparse_sums(c, 3, n - 1);
    CVec<R> F(static_cast<std::size_t>(m + 1), Complex<R>(0));
    for (long k = 0; k <= m; ++k) {
        if (k < static_cast<long>(A.size())) F[static_cast<std::size_t>(k)] += A[static_cast<std::size_t>(k)];
        if (k >= 1 && k - 1 < static_cast<long>(B.size())) F[static_cast<std::size_t>(k)] += c[0] * B[static_cast<std::size_t>(k - 1)];
    }
    return F;
}

template <std::floating_point R> Complex<R> F_k(const CVec<R>& c, long k) {
    long n = static_cast<long>(c.size());
    if (k < 0 || k > n / 2) throw Error(Errc::KOutOfRange, "k outside 0..floor(n/2)");
    return F_all(c)[static_cast<std::size_t>(k)];
}

// sum_k (-1)^k F_k lambda^k
template <std::floating_point R> Complex<R> alternating_F_sum(const CVec<R>& F, Complex<R> lambda = Complex<R>(1)) {
    Complex<R> s(0), p(1);
    for (std::size_t k = 0; k < F.size(); ++k) {
        s += (k % 2 == 0 ? p : -p) * F[k];
        p *= lambda;
    }
    return s;
}

template <std::floating_point R> Matrix2<R> monodromy_from_c(const CVec<R>& c) {
    Matrix2<R> M = Matrix2<R>::identity();
    for (auto& x : c) {
        if (x == Complex<R>(0)) throw Error(Errc::ZeroCoordinate, "c_i = 0");
        M = M * frame_step<R>(x);
    }
    return M;
}

template <std::floating_point R> Matrix2<R> monodromy_closed_form(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    Complex<R> c1 = c[0];
    return {-c1 * continuant(c, 3, n - 1), c1 * continuant(c, 3, n), -continuant(c, 2, n - 1), continuant(c, 2, n)};
}

template <std::floating_point R> CVec<R> closure_residuals(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    CVec<R> r;
    for (long i = 1; i <= n; ++i) r.push_back(continuant(c, i, n - 3 + i));
    return r;
}

template <std::floating_point R> R max_abs(const CVec<R>& v) {
    R m = 0;
    for (auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

template <std::floating_point R> bool is_closed(const CVec<R>& c, R tol = R(1e-9)) { return max_abs(closure_residuals(c)) < tol; }

template <std::floating_point R> Complex<R> parabolicity_residual(const CVec<R>& c) {
    Complex<R> s = alternating_F_sum(F_all(c));
    return s * s - Complex<R>(4) * product(c);
}

struct IdentityResidual {
    std::string name;
    double residual;
};

// Classical identities; the closed-polygon ones are included only when c is closed.
template <std::floating_point R> std::vector<IdentityResidual> identity_suite(const CVec<R>& c, R closed_tol = R(1e-9)) {
    std::vector<IdentityResidual> out;
    long n = static_cast<long>(c.size());
    auto push = [&](const std::string& name, R v) { out.push_back({name, static_cast<double>(v)}); };

    // D_{1,m} D_{i,j} - D_{1,j} D_{i,m} = -c_{i-1}...c_{j+1} D_{1,i-3} D_{j+3,m}, a polynomial identity
    R worst = 0;
    long m = n;
    for (long i = 2; i <= m; ++i)
        for (long j = i - 1; j <= m - 1; ++j) {
            Complex<R> lhs = continuant(c, 1, m) * continuant(c, i, j) - continuant(c, 1, j) * continuant(c, i, m);
            Complex<R> p(1);
            for (long k = i - 1; k <= j + 1; ++k) p *= cidx(c, k);
            Complex<R> rhs = -p * continuant(c, 1, i - 3) * continuant(c, j + 3, m);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(R(1), std::abs(lhs)));
        }
    push("continuant_determinant", worst);

    R fb = 0;
    for (long i = 1; i <= n; ++i)
        for (long j = i - 2; j <= i + n; ++j) fb = std::max(fb, std::abs(continuant(c, i, j) - continuant_backward(c, i, j)));
    push("forward_backward", fb);

    if (!is_closed(c, closed_tol)) return out;

    CVec<R> F = F_all(c);
    Complex<R> half = alternating_F_sum(F) / Complex<R>(2);
    R more = 0, pairs = 0;
    for (long i = 1; i <= n; ++i) {
        more = std::max(more, std::abs(continuant(c, i, n - 2 + i) - half));
        pairs = std::max(pairs, std::abs(continuant(c, i, n - 1 + i) - continuant(c, i, n - 2 + i)));
    }
    push("half_trace_continuant", more);
    push("consecutive_continuants", pairs);

    Complex<R> lin(0);
    for (std::size_t k = 0; k < F.size(); ++k) lin += (k % 2 == 0 ? R(1) : R(-1)) * R(n - 2 * static_cast<long>(k)) * F[k];
    push("linear_relation", std::abs(lin));

    Complex<R> s = alternating_F_sum(F);
    push("square_relation", std::abs(s * s - Complex<R>(4) * product(c)));

    if (n == 5) {
        Complex<R> sum(0);
        for (auto& x : c) sum += x;
        push("gauss_pentagon", std::abs((sum - Complex<R>(2)) * (sum - Complex<R>(2)) - product(c)));
    }

    if (n % 2 == 1) {
        // D_{i,j-1} = K_{i,j} / (a_i ... a_j) with K_{i,j} = [V_{i-1}, V_{j+1}]
        auto P = reconstruct(c);
        P.monodromy = Matrix2<R>::identity();
        auto V = lift_to_vectors(P);
        R fr = 0;
        auto a = [&](long i) { return frieze_entry(V, i - 2, i); };  // a_i = [V_{i-1}, V_{i+1}], 0-based V
        for (long i = 1; i <= n; ++i)
            for (long j = i - 1; j <= i + n - 2; ++j) {
                Complex<R> prod(1);
                for (long k = i; k <= j; ++k) prod *= a(k);
                Complex<R> K = frieze_entry(V, i - 2, j);
                fr = std::max(fr, std::abs(continuant(c, i, j - 1) - K / prod));
            }
        push("frieze_continuant", fr);
    }
    return out;
}

} // namespace crd

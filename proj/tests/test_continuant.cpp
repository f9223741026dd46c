#include <gtest/gtest.h>

#include <set>

#include "crd/continuant.hpp"
#include "crd/random.hpp"

using namespace crd;
using C = Complex<double>;
using V = CVec<double>;

namespace {

// Independent oracle: determinant of the (j-i+2)-square tridiagonal matrix with unit
// diagonal and off-diagonal entries sqrt(lambda c_k), k = i..j, by Gaussian elimination.
C tridiagonal_det(const V& c, long i, long j, C lambda) {
    long len = j - i + 2;
    if (len <= 1) return 1;
    std::vector<std::vector<C>> A(len, std::vector<C>(len, C(0)));
    for (long r = 0; r < len; ++r) A[r][r] = 1;
    for (long r = 0; r + 1 < len; ++r) {
        C s = std::sqrt(lambda * cidx(c, i + r));
        A[r][r + 1] = s;
        A[r + 1][r] = s;
    }
    C d = 1;
    for (long k = 0; k < len; ++k) {
        long piv = k;
        for (long r = k + 1; r < len; ++r)
            if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
        if (piv != k) {
            std::swap(A[piv], A[k]);
            d = -d;
        }
        d *= A[k][k];
        for (long r = k + 1; r < len; ++r) {
            C f = A[r][k] / A[k][k];
            for (long s = k; s < len; ++s) A[r][s] -= f * A[k][s];
        }
    }
    return d;
}

// Brute-force cyclic sparse enumeration over all 2^n subsets.
C F_brute(const V& c, long k) {
    long n = static_cast<long>(c.size());
    C s = 0;
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        if (__builtin_popcountl(mask) != k) continue;
        bool ok = true;
        for (long t = 0; t < n && ok; ++t)
            if ((mask >> t & 1) && (mask >> ((t + 1) % n) & 1)) ok = false;
        if (!ok) continue;
        C p = 1;
        for (long t = 0; t < n; ++t)
            if (mask >> t & 1) p *= c[t];
        s += p;
    }
    return s;
}

double rel(C a, C b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST(Continuant, SmallWindows) {
    V c{C(0.3, 0.1), C(-1.2, 0.4), C(0.7, -0.5), C(2.0, 0.2)};
    EXPECT_LT(rel(continuant(c, 1, 1), 1.0 - c[0]), 1e-15);
    EXPECT_LT(rel(continuant(c, 1, 2), 1.0 - c[0] - c[1]), 1e-15);
    EXPECT_LT(rel(continuant(c, 1, 3), 1.0 - c[0] - c[1] - c[2] + c[0] * c[2]), 1e-15);
    EXPECT_EQ(continuant(c, 2, 0), C(1));
    EXPECT_EQ(continuant(c, 2, 1), C(1));
    EXPECT_THROW(continuant(c, 3, 0), Error);
}

TEST(Continuant, EulerAndTridiagonalOracles) {
    Rng rng(10);
    for (int t = 0; t < 30; ++t) {
        long n = 3 + t % 10;
        V c = random_c<double>(rng, n, Field::Complex);
        C lam = random_scalar<double>(rng, Field::Complex);
        for (long i = 1; i <= n; ++i)
            for (long len = 0; len <= 14; ++len) {
                long j = i + len - 1;
                C d = continuant(c, i, j, lam);
                EXPECT_LT(rel(d, continuant_by_euler(c, i, j, lam)), 1e-12 * (1 + std::abs(d)));
                EXPECT_LT(rel(d, tridiagonal_det(c, i, j, lam)), 1e-9 * (1 + std::abs(d)));
                EXPECT_LT(rel(d, continuant_backward(c, i, j, lam)), 1e-12 * (1 + std::abs(d)));
            }
    }
    V c(30, C(0.5));
    EXPECT_THROW(continuant_by_euler(c, 1, 25), Error);
}

TEST(SparseSubsets, CountsMatchFormulas) {
    for (long n = 3; n <= 14; ++n)
        for (long k = 0; k <= n / 2; ++k) {
            auto cyc = SparseSubsets(n, k, true).all();
            EXPECT_EQ(cyc.size(), SparseSubsets::count(n, k, true)) << n << " " << k;
            auto path = SparseSubsets(n, k, false).all();
            EXPECT_EQ(path.size(), SparseSubsets::count(n, k, false));
            std::set<std::vector<long>> uniq(cyc.begin(), cyc.end());
            EXPECT_EQ(uniq.size(), cyc.size());
            for (auto& I : cyc) {
                for (std::size_t s = 0; s + 1 < I.size(); ++s) EXPECT_GE(I[s + 1] - I[s], 2);
                if (I.size() >= 2) {
                    EXPECT_FALSE(I.front() == 1 && I.back() == n);
                }
            }
        }
}

TEST(Integrals, FkAgainstBruteForce) {
    Rng rng(11);
    for (long n = 3; n <= 13; ++n) {
        V c = random_c<double>(rng, n, Field::Complex);
        V F = F_all(c);
        ASSERT_EQ(static_cast<long>(F.size()), n / 2 + 1);
        EXPECT_EQ(F[0], C(1));
        C sum = 0;
        for (auto& x : c) sum += x;
        EXPECT_LT(rel(F[1], sum), 1e-13);
        for (long k = 0; k <= n / 2; ++k) EXPECT_LT(rel(F[k], F_brute(c, k)), 1e-12) << n << " " << k;
        EXPECT_THROW(F_k(c, n / 2 + 1), Error);
    }
}

TEST(Integrals, PentagonF2) {
    Rng rng(12);
    V c = random_c<double>(rng, 5, Field::Complex);
    C s = 0;
    for (long i = 1; i <= 5; ++i) s += cidx(c, i - 1) * cidx(c, i + 1);
    EXPECT_LT(rel(F_k(c, 2), s), 1e-14);
}

TEST(Integrals, Homogeneity) {
    Rng rng(13);
    V c = random_c<double>(rng, 9, Field::Complex);
    C t(0.7, -0.3);
    V tc = c;
    for (auto& x : tc) x *= t;
    V F = F_all(c), G = F_all(tc);
    for (std::size_t k = 0; k < F.size(); ++k) EXPECT_LT(rel(G[k], std::pow(t, static_cast<int>(k)) * F[k]), 1e-13);
}

TEST(Monodromy, ProductEqualsClosedForm) {
    Rng rng(14);
    for (long n = 3; n <= 14; ++n)
        for (Field f : {Field::Real, Field::Complex}) {
            V c = random_c<double>(rng, n, f);
            Matrix2<double> A = monodromy_from_c(c), B = monodromy_closed_form(c);
            EXPECT_LT(max_abs_diff(A, B), 1e-10 * std::max(1.0, A.max_abs()));
            EXPECT_LT(rel(A.det(), product(c)), 1e-12);
            C s = alternating_F_sum(F_all(c));
            EXPECT_LT(rel(normalized_trace(A), s * s / product(c)), 1e-10);
        }
    V one{C(0.4, 0.2)};
    Matrix2<double> M1 = monodromy_from_c(one);
    EXPECT_LT(max_abs_diff(M1, Matrix2<double>{C(0), one[0], C(-1), C(1)}), 1e-16);
}

TEST(Monodromy, ShiftConjugate) {
    Rng rng(15);
    V c = random_c<double>(rng, 8, Field::Complex);
    V s(c.begin() + 1, c.end());
    s.push_back(c[0]);
    EXPECT_LT(rel(normalized_trace(monodromy_from_c(c)), normalized_trace(monodromy_from_c(s))), 1e-11);
}

TEST(Closure, PentagonConstant) {
    C g = (3 - std::sqrt(5.0)) / 2;
    V c(5, g);
    EXPECT_LT(max_abs(closure_residuals(c)), 1e-15);
    EXPECT_TRUE(is_closed(c));
    EXPECT_LT(std::abs(parabolicity_residual(c)), 1e-14);
    EXPECT_LT(std::abs(g + g + g - 1.0 - g * g), 1e-15);
    Rng rng(16);
    V r = random_c<double>(rng, 6, Field::Complex);
    EXPECT_GT(max_abs(closure_residuals(r)), 1e-3);
    EXPECT_GT(std::abs(parabolicity_residual(r)), 1e-3);
}

TEST(Closure, ScaledPentagonIsParabolic) {
    double s5 = std::sqrt(5.0);
    C alpha = (3 - s5) / (3 + s5);
    V c(5, C((3 - s5) / 2) / alpha);
    EXPECT_LT(std::abs(parabolicity_residual(c)), 1e-12);
}

TEST(IdentitySuite, RandomAndClosed) {
    Rng rng(17);
    for (long n = 4; n <= 11; ++n) {
        V c = random_c<double>(rng, n, Field::Complex);
        auto rep = identity_suite(c);
        ASSERT_EQ(rep.size(), 2u);
        for (auto& r : rep) EXPECT_LT(r.residual, 1e-9) << r.name << " n=" << n;

        auto P = random_polygon<double>(rng, n, Field::Complex, true);
        V cc = cross_ratios(P);
        auto rep2 = identity_suite(cc);
        EXPECT_GE(rep2.size(), 5u);
        for (auto& r : rep2) EXPECT_LT(r.residual, 1e-8) << r.name << " n=" << n;
        if (n == 5) {
            bool gauss = false;
            for (auto& r : rep2) gauss |= r.name == "gauss_pentagon";
            EXPECT_TRUE(gauss);
        }
    }
}

#pragma once

#include <functional>

#include "dynamics.hpp"

namespace crd {

// ---- bracket specifications ----

enum class BracketKind { CPencil, X, U, U2, ClusterX };

// CPencil: s {,}_1 + t {,}_2 on the cyclic c-chart.  X, U: cyclic log-canonical type brackets on n
// coordinates.  U2: the chain bracket on u_2..u_{n-2}.  ClusterX: the frieze-diagonal bracket on x_1..x_{n-3}.
template <std::floating_point R> struct BracketSpec {
    BracketKind kind = BracketKind::CPencil;
    Complex<R> s{1}, t{0};
};

template <std::floating_point R> BracketSpec<R> bracket_pencil(Complex<R> s, Complex<R> t) { return {BracketKind::CPencil, s, t}; }
template <std::floating_point R> BracketSpec<R> bracket_c1() { return bracket_pencil<R>(1, 0); }
template <std::floating_point R> BracketSpec<R> bracket_c2() { return bracket_pencil<R>(0, 1); }
// {,}_1 - beta {,}_2; E_alpha is a Casimir of beta = 1/alpha
template <std::floating_point R> BracketSpec<R> bracket_cpencil(Complex<R> beta) { return bracket_pencil<R>(1, -beta); }
// {,}_1 - {,}_2, the bracket for which closed polygons form a Poisson submanifold
template <std::floating_point R> BracketSpec<R> bracket_closed() { return bracket_pencil<R>(1, -1); }
// {c_i, c_{i+1}} = c_i c_{i+1} (c_i + c_{i+1} - alpha), {c_i, c_{i+2}} = c_i c_{i+1} c_{i+2}
template <std::floating_point R> BracketSpec<R> bracket_alpha_form(Complex<R> alpha) { return bracket_pencil<R>(-alpha, 1); }
template <std::floating_point R> BracketSpec<R> bracket_x() { return {BracketKind::X}; }
template <std::floating_point R> BracketSpec<R> bracket_u() { return {BracketKind::U}; }
template <std::floating_point R> BracketSpec<R> bracket_u2() { return {BracketKind::U2}; }
template <std::floating_point R> BracketSpec<R> bracket_cluster() { return {BracketKind::ClusterX}; }

inline const char* bracket_name(BracketKind k) {
    switch (k) {
    case BracketKind::CPencil: return "CPencil";
    case BracketKind::X: return "X";
    case BracketKind::U: return "U";
    case BracketKind::U2: return "U2";
    case BracketKind::ClusterX: return "ClusterX";
    }
    return "?";
}

template <std::floating_point R> void check_bracket_domain(const BracketSpec<R>& spec, const CVec<R>& z) {
    for (auto& v : z) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(Errc::ChartDomainViolation, "non-finite coordinate");
        switch (spec.kind) {
        case BracketKind::CPencil:
        case BracketKind::ClusterX:
            if (v == Complex<R>(0)) throw Error(Errc::ChartDomainViolation, "zero coordinate");
            break;
        case BracketKind::X:
            if (v == Complex<R>(0) || v == Complex<R>(1)) throw Error(Errc::ChartDomainViolation, "x in {0, 1}");
            break;
        case BracketKind::U:
        case BracketKind::U2:
            if (v == Complex<R>(0) || v == Complex<R>(-1)) throw Error(Errc::ChartDomainViolation, "u in {0, -1}");
            break;
        }
    }
}

// Structure matrix Pi with {z_i, z_j} = Pi(i, j).
template <std::floating_point R> CMatrix<R> structure_matrix(const BracketSpec<R>& spec, const CVec<R>& z) {
    check_bracket_domain(spec, z);
    long n = static_cast<long>(z.size());
    CMatrix<R> P = CMatrix<R>::Zero(n, n);
    auto add = [&](long i, long j, Complex<R> v) {
        i = ((i % n) + n) % n;
        j = ((j % n) + n) % n;
        P(i, j) += v;
        P(j, i) -= v;
    };
    auto at = [&](long i) { return z[static_cast<std::size_t>(((i % n) + n) % n)]; };
    switch (spec.kind) {
    case BracketKind::CPencil:
        for (long i = 0; i < n; ++i) {
            Complex<R> a = at(i), b = at(i + 1), c = at(i + 2);
            add(i, i + 1, spec.s * a * b + spec.t * a * b * (a + b));
            add(i, i + 2, spec.t * a * b * c);
        }
        break;
    case BracketKind::X:
        for (long i = 0; i < n; ++i) {
            Complex<R> a = at(i), b = at(i + 1);
            add(i, i + 1, a * (Complex<R>(1) - a) * b * (Complex<R>(1) - b));
        }
        break;
    case BracketKind::U:
        for (long i = 0; i < n; ++i) add(i, i + 1, at(i) * at(i + 1));
        break;
    case BracketKind::U2:
        for (long i = 0; i + 1 < n; ++i) add(i, i + 1, at(i) * at(i + 1));
        break;
    case BracketKind::ClusterX:
        // 1-based i odd < j even: {x_i, x_j} = -x_i x_j
        for (long i = 1; i <= n; ++i)
            for (long j = i + 1; j <= n; ++j)
                if (i % 2 == 1 && j % 2 == 0) add(i - 1, j - 1, -at(i - 1) * at(j - 1));
        break;
    }
    return P;
}

template <std::floating_point R> using ScalarFn = std::function<Complex<R>(const CVec<R>&)>;

// Central differences with step h relative to max(1, |z_j|), along the real direction.
template <std::floating_point R> CVec<R> fd_gradient(const ScalarFn<R>& f, const CVec<R>& z, R h = R(1e-6)) {
    CVec<R> g;
    for (std::size_t j = 0; j < z.size(); ++j) {
        R hj = h * std::max(R(1), std::abs(z[j]));
        CVec<R> a = z, b = z;
        a[j] += hj;
        b[j] -= hj;
        g.push_back((f(a) - f(b)) / (R(2) * hj));
    }
    return g;
}

template <std::floating_point R> Complex<R> bracket_grad(const CMatrix<R>& P, const CVec<R>& gf, const CVec<R>& gg) {
    Complex<R> s(0);
    for (long i = 0; i < P.rows(); ++i)
        for (long j = 0; j < P.cols(); ++j) s += gf[static_cast<std::size_t>(i)] * P(i, j) * gg[static_cast<std::size_t>(j)];
    return s;
}

template <std::floating_point R>
Complex<R> bracket(const BracketSpec<R>& spec, const ScalarFn<R>& f, const ScalarFn<R>& g, const CVec<R>& z) {
    return bracket_grad(structure_matrix(spec, z), fd_gradient(f, z), fd_gradient(g, z));
}

// max |sum_cyc sum_l Pi_il d_l Pi_jk| relative to max(1, |Pi| |dPi|), derivatives by central differences.
template <std::floating_point R> R jacobi_residual(const BracketSpec<R>& spec, const CVec<R>& z, R h = R(1e-5)) {
    long n = static_cast<long>(z.size());
    CMatrix<R> P = structure_matrix(spec, z);
    std::vector<CMatrix<R>> dP;
    R dmax = 0;
    for (long l = 0; l < n; ++l) {
        R hl = h * std::max(R(1), std::abs(z[static_cast<std::size_t>(l)]));
        CVec<R> a = z, b = z;
        a[static_cast<std::size_t>(l)] += hl;
        b[static_cast<std::size_t>(l)] -= hl;
        dP.push_back((structure_matrix(spec, a) - structure_matrix(spec, b)) / Complex<R>(2 * hl));
        dmax = std::max(dmax, dP.back().cwiseAbs().maxCoeff());
    }
    auto term = [&](long i, long j, long k) {
        Complex<R> s(0);
        for (long l = 0; l < n; ++l) s += P(i, l) * dP[static_cast<std::size_t>(l)](j, k);
        return s;
    };
    R worst = 0;
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
            for (long k = j + 1; k < n; ++k) worst = std::max(worst, std::abs(term(i, j, k) + term(j, k, i) + term(k, i, j)));
    R scale = std::max(R(1), (P.size() ? P.cwiseAbs().maxCoeff() : R(0)) * dmax);
    return worst / scale;
}

// ---- exact gradients of the built-in integrals ----

// F_k and continuants are affine in every c_j, so the partials are exact differences.
template <std::floating_point R> CMatrix<R> F_gradients(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    long m = n / 2;
    CMatrix<R> G(m + 1, n);
    for (long j = 0; j < n; ++j) {
        CVec<R> one = c, zero = c;
        one[static_cast<std::size_t>(j)] = 1;
        zero[static_cast<std::size_t>(j)] = 0;
        CVec<R> a = F_all(one), b = F_all(zero);
        for (long k = 0; k <= m; ++k) G(k, j) = a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
    }
    return G;
}

template <std::floating_point R> CVec<R> row(const CMatrix<R>& M, long k) {
    CVec<R> v;
    for (long j = 0; j < M.cols(); ++j) v.push_back(M(k, j));
    return v;
}

// gradient of F_k^2 / c_[n]
template <std::floating_point R> CVec<R> grad_H(const CVec<R>& c, long k, const CVec<R>& F, const CMatrix<R>& dF) {
    Complex<R> cp = product(c), Fk = F[static_cast<std::size_t>(k)];
    CVec<R> g;
    for (std::size_t j = 0; j < c.size(); ++j)
        g.push_back(R(2) * Fk * dF(k, static_cast<long>(j)) / cp - Fk * Fk / (cp * c[j]));
    return g;
}

// gradient of E_k = F_k / root with root^2 = c_[n]
template <std::floating_point R> CVec<R> grad_E(const CVec<R>& c, long k, const CVec<R>& F, const CMatrix<R>& dF, Complex<R> root) {
    CVec<R> g;
    long m = static_cast<long>(F.size()) - 1;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (k < 0 || k > m) g.push_back(0);
        else g.push_back(dF(k, static_cast<long>(j)) / root - F[static_cast<std::size_t>(k)] / (R(2) * root * c[j]));
    }
    return g;
}

// gradient of E_alpha = (sum (-1)^k F_k alpha^{-k})^2 / c_[n]
template <std::floating_point R> CVec<R> grad_E_alpha(const CVec<R>& c, Complex<R> alpha) {
    CVec<R> F = F_all(c);
    CMatrix<R> dF = F_gradients(c);
    Complex<R> lam = Complex<R>(1) / alpha, S = alternating_F_sum(F, lam), cp = product(c);
    CVec<R> g;
    for (long j = 0; j < static_cast<long>(c.size()); ++j) {
        Complex<R> dS(0), p(1);
        for (long k = 0; k < dF.rows(); ++k) {
            dS += (k % 2 == 0 ? p : -p) * dF(k, j);
            p *= lam;
        }
        g.push_back(R(2) * S * dS / cp - S * S / (cp * c[static_cast<std::size_t>(j)]));
    }
    return g;
}

// Hamiltonian vector field X_f with X_f(z_i) = {f, z_i}
template <std::floating_point R> CVec<R> hamiltonian_field(const CMatrix<R>& P, const CVec<R>& grad) {
    CVec<R> v;
    for (long i = 0; i < P.rows(); ++i) {
        Complex<R> s(0);
        for (long l = 0; l < P.rows(); ++l) s += grad[static_cast<std::size_t>(l)] * P(l, i);
        v.push_back(s);
    }
    return v;
}

// ---- Casimirs ----

struct NamedResidual {
    std::string name;
    double residual;
};

template <std::floating_point R> R casimir_residual_of(const CMatrix<R>& P, const CVec<R>& grad) {
    R gmax = max_abs(grad), pmax = P.cwiseAbs().maxCoeff();
    return max_abs(hamiltonian_field(P, grad)) / std::max(R(1), gmax * pmax);
}

// Casimirs known for the chart: the E_alpha member of the pencil (c_[n] for {,}_1, F_m^2/c_[n] for
// {,}_2), c_even/c_odd for even n; u_[n] (and u_odd, u_even for even n) on the u-chart; the pullback
// u_[n] on the x-chart; the alternating product for U2 with an odd number of variables.
template <std::floating_point R> std::vector<NamedResidual> casimir_residuals(const BracketSpec<R>& spec, const CVec<R>& z) {
    CMatrix<R> P = structure_matrix(spec, z);
    long n = static_cast<long>(z.size());
    std::vector<NamedResidual> out;
    auto push = [&](std::string name, const CVec<R>& g) { out.push_back({std::move(name), static_cast<double>(casimir_residual_of(P, g))}); };
    auto log_grad = [&](auto pred) {
        Complex<R> prod(1);
        for (long i = 0; i < n; ++i)
            if (pred(i)) prod *= z[static_cast<std::size_t>(i)];
        CVec<R> g;
        for (long i = 0; i < n; ++i) g.push_back(pred(i) ? prod / z[static_cast<std::size_t>(i)] : Complex<R>(0));
        return g;
    };
    switch (spec.kind) {
    case BracketKind::CPencil: {
        if (spec.t == Complex<R>(0)) push("c_prod", log_grad([](long) { return true; }));
        else if (spec.s == Complex<R>(0)) {
            CVec<R> F = F_all(z);
            push("F_top_sq_over_cprod", grad_H(z, n / 2, F, F_gradients(z)));
        } else {
            Complex<R> alpha = -spec.s / spec.t;
            push("E_alpha", grad_E_alpha(z, alpha));
        }
        if (n % 2 == 0) {
            // c_even / c_odd, 1-based even indices are 0-based odd
            Complex<R> r = c_even_over_odd(z);
            CVec<R> g;
            for (long i = 0; i < n; ++i) g.push_back((i % 2 == 1 ? r : -r) / z[static_cast<std::size_t>(i)]);
            push("c_even_over_odd", g);
        }
        break;
    }
    case BracketKind::U:
        push("u_prod", log_grad([](long) { return true; }));
        if (n % 2 == 0) {
            push("u_odd", log_grad([](long i) { return i % 2 == 0; }));
            push("u_even", log_grad([](long i) { return i % 2 == 1; }));
        }
        break;
    case BracketKind::X: {
        // u_[n] with u_i = 1/x_i - 1
        Complex<R> prod(1);
        for (auto& x : z) prod *= Complex<R>(1) / x - Complex<R>(1);
        CVec<R> g;
        for (auto& x : z) g.push_back(prod / (Complex<R>(1) / x - Complex<R>(1)) * (-Complex<R>(1) / (x * x)));
        push("u_prod_pullback", g);
        break;
    }
    case BracketKind::U2:
        if (n % 2 == 1) push("alternating_product", log_grad([](long i) { return i % 2 == 0; }));
        break;
    case BracketKind::ClusterX: break;
    }
    return out;
}

// ---- involution, Lenard-Magri, span of Hamiltonian fields ----

template <std::floating_point R> struct InvolutionReport {
    R bracket1 = 0, bracket2 = 0;  // max |{F_k^2/c, F_l^2/c}| relative
    R lenard_magri = 0;             // max |{c_i, E_k}_1 + {c_i, E_{k-1}}_2|
};

template <std::floating_point R> InvolutionReport<R> involution_check(const CVec<R>& c) {
    InvolutionReport<R> r;
    long m = static_cast<long>(c.size()) / 2;
    CVec<R> F = F_all(c);
    CMatrix<R> dF = F_gradients(c);
    CMatrix<R> P1 = structure_matrix(bracket_c1<R>(), c), P2 = structure_matrix(bracket_c2<R>(), c);
    std::vector<CVec<R>> gH;
    for (long k = 0; k <= m; ++k) gH.push_back(grad_H(c, k, F, dF));
    for (long k = 0; k <= m; ++k)
        for (long l = k + 1; l <= m; ++l) {
            auto& a = gH[static_cast<std::size_t>(k)];
            auto& b = gH[static_cast<std::size_t>(l)];
            R scale = std::max(R(1), max_abs(a) * max_abs(b));
            r.bracket1 = std::max(r.bracket1, std::abs(bracket_grad(P1, a, b)) / (scale * std::max(R(1), P1.cwiseAbs().maxCoeff())));
            r.bracket2 = std::max(r.bracket2, std::abs(bracket_grad(P2, a, b)) / (scale * std::max(R(1), P2.cwiseAbs().maxCoeff())));
        }
    Complex<R> root = std::sqrt(product(c));
    for (long k = 0; k <= m + 1; ++k) {
        CVec<R> a = hamiltonian_field(P1, grad_E(c, k, F, dF, root));
        CVec<R> b = hamiltonian_field(P2, grad_E(c, k - 1, F, dF, root));
        R scale = std::max({R(1), max_abs(a), max_abs(b)});
        for (std::size_t i = 0; i < a.size(); ++i) r.lenard_magri = std::max(r.lenard_magri, std::abs(a[i] + b[i]) / scale);
    }
    return r;
}

template <std::floating_point R> CMatrix<R> to_matrix(const std::vector<CVec<R>>& cols) {
    CMatrix<R> M(static_cast<long>(cols.front().size()), static_cast<long>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].size(); ++i) M(static_cast<long>(i), static_cast<long>(j)) = cols[j][i];
    return M;
}

// Orthonormal basis of the numerical column space.
template <std::floating_point R> CMatrix<R> column_basis(const CMatrix<R>& A, R rel = R(1e-8)) {
    Eigen::JacobiSVD<CMatrix<R>> svd(A, Eigen::ComputeThinU);
    long r = numerical_rank(A, rel);
    return svd.matrixU().leftCols(r);
}

// sin of the largest principal angle between two subspaces given by orthonormal bases (1 if dims differ).
template <std::floating_point R> R subspace_distance(const CMatrix<R>& Q1, const CMatrix<R>& Q2) {
    if (Q1.cols() != Q2.cols()) return 1;
    if (Q1.cols() == 0) return 0;
    CMatrix<R> D = Q2 - Q1 * (Q1.adjoint() * Q2);
    Eigen::JacobiSVD<CMatrix<R>> svd(D);
    return svd.singularValues()(0);
}

template <std::floating_point R> struct SpanReport {
    std::vector<long> dims;
    R max_angle = 0;
};

// Span of the Hamiltonian fields of F_k^2/c_[n], k = 0..m, for a list of pencil members.
template <std::floating_point R> SpanReport<R> hamiltonian_span_check(const CVec<R>& c, const std::vector<BracketSpec<R>>& specs) {
    SpanReport<R> r;
    long m = static_cast<long>(c.size()) / 2;
    CVec<R> F = F_all(c);
    CMatrix<R> dF = F_gradients(c);
    std::vector<CMatrix<R>> bases;
    for (auto& spec : specs) {
        CMatrix<R> P = structure_matrix(spec, c);
        std::vector<CVec<R>> cols;
        for (long k = 0; k <= m; ++k) cols.push_back(hamiltonian_field(P, grad_H(c, k, F, dF)));
        bases.push_back(column_basis(to_matrix(cols), R(1e-7)));
        r.dims.push_back(bases.back().cols());
    }
    for (std::size_t i = 1; i < bases.size(); ++i) r.max_angle = std::max(r.max_angle, subspace_distance(bases[0], bases[i]));
    return r;
}

template <std::floating_point R> long corank(const BracketSpec<R>& spec, const CVec<R>& z, R rel = R(1e-8)) {
    CMatrix<R> P = structure_matrix(spec, z);
    return P.rows() - numerical_rank(P, rel);
}

// ---- Poisson maps ----

// Central-difference Jacobian of a vector map.
template <std::floating_point R>
CMatrix<R> fd_jacobian(const std::function<CVec<R>(const CVec<R>&)>& f, const CVec<R>& z, R h = R(1e-6)) {
    CVec<R> f0 = f(z);
    CMatrix<R> J(static_cast<long>(f0.size()), static_cast<long>(z.size()));
    for (std::size_t j = 0; j < z.size(); ++j) {
        R hj = h * std::max(R(1), std::abs(z[j]));
        CVec<R> a = z, b = z;
        a[j] += hj;
        b[j] -= hj;
        CVec<R> fa = f(a), fb = f(b);
        for (std::size_t i = 0; i < f0.size(); ++i) J(static_cast<long>(i), static_cast<long>(j)) = (fa[i] - fb[i]) / (R(2) * hj);
    }
    return J;
}

template <std::floating_point R> R relative_matrix_diff(const CMatrix<R>& A, const CMatrix<R>& B) {
    return (A - B).cwiseAbs().maxCoeff() / std::max(R(1), B.cwiseAbs().maxCoeff());
}

// pi_alpha: X -> C is Poisson from the x-bracket to {,}_1 - alpha^{-1} {,}_2 (exact Jacobian).
template <std::floating_point R> R pi_alpha_poisson_residual(const CVec<R>& x, Complex<R> alpha) {
    long n = static_cast<long>(x.size());
    CMatrix<R> J = CMatrix<R>::Zero(n, n);
    for (long i = 0; i < n; ++i) {
        long j = (i + 1) % n;
        J(i, i) += alpha * (Complex<R>(1) - x[static_cast<std::size_t>(j)]);
        J(i, j) += -alpha * x[static_cast<std::size_t>(i)];
    }
    CMatrix<R> push = J * structure_matrix(bracket_x<R>(), x) * J.transpose();
    return relative_matrix_diff(push, structure_matrix(bracket_cpencil<R>(Complex<R>(1) / alpha), pi_alpha(x, alpha)));
}

// tau: x -> 1 - x preserves the x-bracket.
template <std::floating_point R> R tau_poisson_residual(const CVec<R>& x) {
    CVec<R> y;
    for (auto& v : x) y.push_back(Complex<R>(1) - v);
    // Jacobian -I leaves the structure matrix unchanged
    return relative_matrix_diff(structure_matrix(bracket_x<R>(), y), structure_matrix(bracket_x<R>(), x));
}

// u_i = 1/x_i - 1 carries the x-bracket to the u-bracket.
template <std::floating_point R> R x_to_u_poisson_residual(const CVec<R>& x) {
    long n = static_cast<long>(x.size());
    CMatrix<R> J = CMatrix<R>::Zero(n, n);
    CVec<R> u;
    for (long i = 0; i < n; ++i) {
        Complex<R> v = x[static_cast<std::size_t>(i)];
        J(i, i) = -Complex<R>(1) / (v * v);
        u.push_back(Complex<R>(1) / v - Complex<R>(1));
    }
    CMatrix<R> push = J * structure_matrix(bracket_x<R>(), x) * J.transpose();
    return relative_matrix_diff(push, structure_matrix(bracket_u<R>(), u));
}

template <std::floating_point R> struct InvarianceReport {
    R residual = 0;
    int branch = 0;
};

// The moduli map on a branch continued from the reference seed x1_ref; throws when the two
// candidates are too close to tell apart.
template <std::floating_point R>
ModuliStep<R> moduli_map_continued(const CVec<R>& c, Complex<R> alpha, const Point<R>& x1_ref, R ambiguity = R(0.25)) {
    auto fp = x_fixed_points(c, alpha);
    if (fp.size() != 2) throw Error(Errc::BranchDiscontinuity, "fixed points are not simple");
    R d0 = chordal(fp[0], x1_ref), d1 = chordal(fp[1], x1_ref);
    if (std::min(d0, d1) > ambiguity * std::max(d0, d1)) throw Error(Errc::BranchDiscontinuity, "branch crossing");
    Point<R> x1 = d0 <= d1 ? fp[0] : fp[1];
    ModuliStep<R> out;
    out.x = x_from_seed(c, alpha, x1);
    CVec<R> y;
    for (auto& v : out.x) y.push_back(Complex<R>(1) - v);
    out.d = pi_alpha(y, alpha);
    return out;
}

// Pushforward of {,}_1 - alpha^{-1} {,}_2 by the moduli-level map equals the bracket at the image.
template <std::floating_point R>
InvarianceReport<R> invariance_check(const CVec<R>& c, Complex<R> alpha, int branch = 0, R h = R(1e-6)) {
    auto fp = x_fixed_points(c, alpha);
    if (fp.size() != 2) throw Error(Errc::BranchDiscontinuity, "fixed points are not simple");
    Point<R> ref = fp[static_cast<std::size_t>(branch)];
    std::function<CVec<R>(const CVec<R>&)> map = [&](const CVec<R>& v) { return moduli_map_continued(v, alpha, ref).d; };
    CVec<R> d = map(c);
    CMatrix<R> J = fd_jacobian(map, c, h);
    BracketSpec<R> spec = bracket_cpencil<R>(Complex<R>(1) / alpha);
    CMatrix<R> push = J * structure_matrix(spec, c) * J.transpose();
    return {relative_matrix_diff(push, structure_matrix(spec, d)), branch};
}

// ---- closed polygons: the embedding rho, the cluster structure ----

// rho(u_2..u_{n-2}) in the c-chart; lands in the closed-polygon locus.
template <std::floating_point R> CVec<R> rho_embedding(const CVec<R>& u) {
    long n = static_cast<long>(u.size()) + 3;
    if (n < 4) throw Error(Errc::ChartDomainViolation, "need n >= 4");
    auto U = [&](long i) { return u[static_cast<std::size_t>(i - 2)]; };
    for (auto& v : u)
        if (v == Complex<R>(0) || v == Complex<R>(-1)) throw Error(Errc::DenominatorVanishes, "u_i in {0, -1}");
    CVec<R> c(static_cast<std::size_t>(n));
    Complex<R> one(1);
    c[0] = U(2) / (one + U(2));
    for (long i = 2; i <= n - 3; ++i) c[static_cast<std::size_t>(i - 1)] = U(i + 1) / ((one + U(i)) * (one + U(i + 1)));
    c[static_cast<std::size_t>(n - 3)] = one / (one + U(n - 2));
    Complex<R> S(1), t(1);
    for (long i = 2; i <= n - 2; ++i) {
        t *= U(i);
        S += t;
    }
    if (std::abs(S) < R(1e-300)) throw Error(Errc::DenominatorVanishes, "1 + u_2 + u_2 u_3 + ... = 0");
    c[static_cast<std::size_t>(n - 2)] = t / S;
    c[static_cast<std::size_t>(n - 1)] = one / S;
    return c;
}

// Triangular inversion of the first n-3 equations of rho.
template <std::floating_point R> CVec<R> rho_inverse(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    CVec<R> u;
    Complex<R> one(1), prev(0);  // formally u_1 = 0
    for (long i = 1; i <= n - 3; ++i) {
        Complex<R> t = c[static_cast<std::size_t>(i - 1)] * (one + prev);
        if (t == one) throw Error(Errc::DenominatorVanishes, "c_i (1 + u_i) = 1");
        prev = t / (one - t);
        u.push_back(prev);
    }
    return u;
}

template <std::floating_point R> struct RhoReport {
    R closure = 0;  // max |D_{i,n-3+i}(rho(u))|
    R poisson = 0;  // pushforward of the u-chain bracket vs the closed-polygon bracket
    R inverse = 0;  // rho_inverse(rho(u)) vs u
};

template <std::floating_point R> RhoReport<R> rho_poisson_check(const CVec<R>& u) {
    RhoReport<R> r;
    CVec<R> c = rho_embedding(u);
    r.closure = max_abs(closure_residuals(c));
    std::function<CVec<R>(const CVec<R>&)> f = [](const CVec<R>& v) { return rho_embedding(v); };
    CMatrix<R> J = fd_jacobian(f, u);
    CMatrix<R> push = J * structure_matrix(bracket_u2<R>(), u) * J.transpose();
    r.poisson = relative_matrix_diff(push, structure_matrix(bracket_closed<R>(), c));
    CVec<R> back = rho_inverse(c);
    for (std::size_t i = 0; i < u.size(); ++i) r.inverse = std::max(r.inverse, std::abs(back[i] - u[i]) / std::max(R(1), std::abs(u[i])));
    return r;
}

// omega = sum_{i=1}^{n-4} dx_i ^ dx_{i+1} / (x_i x_{i+1}) on the frieze diagonal x_1..x_{n-3}.
template <std::floating_point R> CMatrix<R> cluster_form(const CVec<R>& x) {
    long m = static_cast<long>(x.size());
    if ((m + 3) % 2 == 0) throw Error(Errc::EvenN, "the cluster form needs odd n");
    for (auto& v : x)
        if (v == Complex<R>(0)) throw Error(Errc::ChartDomainViolation, "x_i = 0");
    CMatrix<R> W = CMatrix<R>::Zero(m, m);
    for (long i = 0; i + 1 < m; ++i) {
        Complex<R> w = Complex<R>(1) / (x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + 1)]);
        W(i, i + 1) = w;
        W(i + 1, i) = -w;
    }
    return W;
}

template <std::floating_point R> struct ClusterReport {
    R inverse_form = 0;    // omega^{-1} against the listed cluster bracket
    R induced = 0;         // bracket induced from the u-chain (hence from {,}_1 - {,}_2) against -omega^{-1}
    R chain = 0;           // pushforward of the cluster bracket to c against -({,}_1 - {,}_2)
    long rank = 0;         // rank of omega
};

// Compares the cluster symplectic form with the structure induced from the closed-polygon bracket
// through x -> u (u_i = x_{i-2}/x_i) -> c (rho).  The induced bivector is -omega^{-1}, i.e. it is the
// Poisson structure of omega under the convention i_{X_f} omega = df.
template <std::floating_point R> ClusterReport<R> cluster_check(const CVec<R>& x) {
    ClusterReport<R> r;
    CMatrix<R> W = cluster_form(x);
    r.rank = numerical_rank(W);
    CMatrix<R> Winv = W.inverse();
    CMatrix<R> Pc = structure_matrix(bracket_cluster<R>(), x);
    r.inverse_form = relative_matrix_diff(Pc, Winv);
    std::function<CVec<R>(const CVec<R>&)> xu = [](const CVec<R>& v) { return detail::friezex_to_u(v); };
    CVec<R> u = xu(x);
    CMatrix<R> Ju = fd_jacobian(xu, x);
    CMatrix<R> K = Ju.inverse();
    CMatrix<R> induced = K * structure_matrix(bracket_u2<R>(), u) * K.transpose();
    r.induced = relative_matrix_diff(induced, CMatrix<R>(-Winv));
    std::function<CVec<R>(const CVec<R>&)> xc = [](const CVec<R>& v) { return rho_embedding(detail::friezex_to_u(v)); };
    CMatrix<R> Jc = fd_jacobian(xc, x);
    CMatrix<R> push = Jc * Pc * Jc.transpose();
    r.chain = relative_matrix_diff(CMatrix<R>(-push), structure_matrix(bracket_closed<R>(), xc(x)));
    return r;
}

// The a-chart bracket on closed odd-gons, induced from {,}_1 - {,}_2, against the closed-form list
// {a_i, a_j} = (-1)^{j-i} a_i a_j (j >= i + 2, (i, j) != (1, n)), {a_i, a_{i+1}} = 1 - a_i a_{i+1},
// {a_1, a_n} = a_1 a_n - 1.  Returns the residuals for the list as printed and for its negative.
template <std::floating_point R> std::pair<R, R> a_chart_bracket_residuals(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    if (n % 2 == 0) throw Error(Errc::EvenNForAChart, "the a-chart needs odd n");
    CVec<R> a = detail::c_to_a(c);
    CMatrix<R> J = CMatrix<R>::Zero(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            bool in = false;
            for (long t = 0; t < (n - 1) / 2; ++t) in |= ((i + 1 + 2 * t) % n) == j;
            J(i, j) = a[static_cast<std::size_t>(i)] * ((in ? R(1) : R(0)) - R(0.5)) / c[static_cast<std::size_t>(j)];
        }
    CMatrix<R> induced = J * structure_matrix(bracket_closed<R>(), c) * J.transpose();
    CMatrix<R> L = CMatrix<R>::Zero(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
            Complex<R> ai = a[static_cast<std::size_t>(i)], aj = a[static_cast<std::size_t>(j)], v;
            if (j == i + 1) v = Complex<R>(1) - ai * aj;
            else if (i == 0 && j == n - 1) v = ai * aj - Complex<R>(1);
            else v = ((j - i) % 2 == 0 ? R(1) : R(-1)) * ai * aj;
            L(i, j) = v;
            L(j, i) = -v;
        }
    return {relative_matrix_diff(induced, L), relative_matrix_diff(induced, CMatrix<R>(-L))};
}

// ---- independence of the integrals ----

// Rows: gradients of F_1..F_m and c_[n].
template <std::floating_point R> CMatrix<R> integral_jacobian(const CVec<R>& c) {
    long n = static_cast<long>(c.size()), m = n / 2;
    CMatrix<R> dF = F_gradients(c);
    CMatrix<R> J(m + 1, n);
    Complex<R> cp = product(c);
    for (long k = 1; k <= m; ++k) J.row(k - 1) = dF.row(k);
    for (long j = 0; j < n; ++j) J(m, j) = cp / c[static_cast<std::size_t>(j)];
    return J;
}

// Rank is unchanged by nonsingular diagonal scalings; using c_j d/dc_j and unit rows keeps points
// with widely spread coordinates (such as c_i = eps^i) within reach of a relative SVD threshold.
template <std::floating_point R> CMatrix<R> equilibrate(CMatrix<R> J, const CVec<R>& c) {
    for (long j = 0; j < J.cols(); ++j) J.col(j) *= c[static_cast<std::size_t>(j)];
    for (long i = 0; i < J.rows(); ++i) {
        R s = J.row(i).cwiseAbs().maxCoeff();
        if (s > 0) J.row(i) /= Complex<R>(s);
    }
    return J;
}

template <std::floating_point R> long independence_rank(const CVec<R>& c, R rel = R(1e-8)) {
    return numerical_rank(equilibrate(integral_jacobian(c), c), rel);
}

// Tangent space of the closed locus: null space of the gradients of D_{i,n-3+i}.
template <std::floating_point R> CMatrix<R> closed_tangent_basis(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    CMatrix<R> G(n, n);
    for (long i = 1; i <= n; ++i)
        for (long j = 0; j < n; ++j) {
            CVec<R> one = c, zero = c;
            one[static_cast<std::size_t>(j)] = 1;
            zero[static_cast<std::size_t>(j)] = 0;
            G(i - 1, j) = continuant(one, i, n - 3 + i) - continuant(zero, i, n - 3 + i);
        }
    Eigen::JacobiSVD<CMatrix<R>> svd(G, Eigen::ComputeFullV);
    long r = numerical_rank(G, R(1e-8));
    return svd.matrixV().rightCols(n - r);
}

template <std::floating_point R> struct ClosedIntegralReport {
    long tangent_dim = 0;
    long rank_full = 0;           // rank of dF_1..dF_m, dc_[n] as covectors on all twisted polygons
    long relations = 0;           // floor(n/2) + 1 - rank_full
    long rank_restricted = 0;     // rank after restriction to the closed locus
    R sum_relation = 0;           // |sum (-1)^k F_k - 2 sqrt c_[n]| with the better square root
    R weighted_relation = 0;      // |sum (-1)^k (n - 2k) F_k|
    R differential_relation = 0;  // |d(sum (-1)^k F_k / sqrt c_[n])| relative to its terms
};

// At a closed point the monodromy is scalar, where the discriminant (sum (-1)^k F_k)^2 - 4 c_[n] of the
// Lax trace vanishes to second order.  Hence d(sum (-1)^k F_k / sqrt c_[n]) = 0 there as a covector on
// the whole twisted space: one linear relation among the differentials.
template <std::floating_point R> ClosedIntegralReport<R> closed_integral_check(const CVec<R>& c, R rel = R(1e-8)) {
    ClosedIntegralReport<R> r;
    long n = static_cast<long>(c.size()), m = n / 2;
    CMatrix<R> T = closed_tangent_basis(c);
    r.tangent_dim = T.cols();
    CMatrix<R> J = equilibrate(integral_jacobian(c), c);
    r.rank_full = numerical_rank(J, rel);
    r.relations = m + 1 - r.rank_full;
    r.rank_restricted = numerical_rank(CMatrix<R>(integral_jacobian(c) * T), rel);
    CVec<R> F = F_all(c);
    Complex<R> S = alternating_F_sum(F), root = std::sqrt(product(c)), W(0);
    for (long k = 0; k <= m; ++k) W += (k % 2 ? R(-1) : R(1)) * R(n - 2 * k) * F[static_cast<std::size_t>(k)];
    R scale = std::max(R(1), max_abs(F));
    r.sum_relation = std::min(std::abs(S - R(2) * root), std::abs(S + R(2) * root)) / scale;
    r.weighted_relation = std::abs(W) / scale;
    CMatrix<R> dF = F_gradients(c);
    R worst = 0, size = 0;
    for (long j = 0; j < n; ++j) {
        Complex<R> dS(0);
        for (long k = 0; k <= m; ++k) dS += (k % 2 ? R(-1) : R(1)) * dF(k, j);
        // c_j d/dc_j of S / root
        Complex<R> a = c[static_cast<std::size_t>(j)] * dS / root, b = S / (R(2) * root);
        worst = std::max(worst, std::abs(a - b));
        size = std::max({size, std::abs(a), std::abs(b)});
    }
    r.differential_relation = worst / std::max(R(1e-300), size);
    return r;
}

// c_i = eps^i, the witness point for independence.
template <std::floating_point R> CVec<R> epsilon_point(long n, R eps = R(1e-2)) {
    CVec<R> c;
    R p = 1;
    for (long i = 1; i <= n; ++i) {
        p *= eps;
        c.push_back(p);
    }
    return c;
}

// The kernel field as a Hamiltonian field: {E_m, c_i} under {,}_1 - {,}_2 with E_m = F_m / root.
template <std::floating_point R> R xi_hamiltonian_residual(const CVec<R>& c, Complex<R> root) {
    long n = static_cast<long>(c.size());
    if (n % 2 == 0) throw Error(Errc::EvenN, "the kernel field needs odd n");
    CVec<R> F = F_all(c);
    CVec<R> v = hamiltonian_field(structure_matrix(bracket_closed<R>(), c), grad_E(c, n / 2, F, F_gradients(c), root));
    CVec<R> xi = xi_moduli(c, root);
    R worst = 0;
    for (long i = 0; i < n; ++i) worst = std::max(worst, std::abs(v[static_cast<std::size_t>(i)] - xi[static_cast<std::size_t>(i)]));
    return worst / std::max(R(1), max_abs(xi));
}

} // namespace crd

#pragma once

#include <optional>

#include "lax.hpp"

namespace crd {

enum class RelationKind { Zero, One, Two, Infinite };

inline const char* relation_name(RelationKind k) {
    switch (k) {
    case RelationKind::Zero: return "Zero";
    case RelationKind::One: return "One";
    case RelationKind::Two: return "Two";
    case RelationKind::Infinite: return "Infinite";
    }
    return "?";
}

template <std::floating_point R> struct RelationResult {
    RelationKind classification = RelationKind::Two;
    std::vector<TwistedPolygon<R>> partners;
    std::vector<bool> degenerate;          // per partner: vertex separation below tolerance
    R residual = 0;                        // max |[p_i, p_{i+1}, q_i, q_{i+1}] - alpha| over partners
    Complex<R> eigenvalue_ratio{1};        // of the Lax matrix at alpha^{-1}
    bool complexified = false;             // real polygon whose partners are complex
};

template <std::floating_point R> void require_alpha(Complex<R> alpha) {
    if (alpha == Complex<R>(0) || alpha == Complex<R>(1)) throw Error(Errc::ForbiddenAlpha, "alpha must avoid 0 and 1");
}

// Partner with q_1 = z, vertices propagated by q_{i+1} = A_{1/alpha}(p_i, p_{i+1}) q_i.
template <std::floating_point R>
TwistedPolygon<R> partner_from_seed(const TwistedPolygon<R>& P, Complex<R> alpha, const Point<R>& z) {
    TwistedPolygon<R> Q;
    Q.monodromy = P.monodromy;
    Q.field = P.field;
    Point<R> q = z;
    Complex<R> lam = Complex<R>(1) / alpha;
    for (long i = 0; i < P.n(); ++i) {
        Q.vertices.push_back(q);
        q = apply(loxodromic_matrix(P.vertex(i), P.vertex(i + 1), lam), q);
    }
    if (Q.field == Field::Real)
        for (auto& v : Q.vertices)
            if (std::abs(v.num.imag()) + std::abs(v.den.imag()) > R(1e-12)) Q.field = Field::Complex;
    return Q;
}

// Loxodromic case: q_i is the fixed point, for the eigenvalue `mu`, of the rotated product
// A_{i-1} ... A_1 M^{-1} A_n ... A_i, which is the same point as q_1 pushed through the edges but stays
// accurate when the fixed point is repelling (no amplification along the propagation).
template <std::floating_point R>
TwistedPolygon<R> partner_from_eigenvalue(const TwistedPolygon<R>& P, Complex<R> alpha, Complex<R> mu) {
    long n = P.n();
    Complex<R> lam = Complex<R>(1) / alpha;
    std::vector<Matrix2<R>> A;
    for (long i = 0; i < n; ++i) A.push_back(loxodromic_matrix(P.vertex(i), P.vertex(i + 1), lam));
    Matrix2<R> Minv = P.monodromy.inverse();
    TwistedPolygon<R> Q;
    Q.monodromy = P.monodromy;
    Q.field = P.field;
    for (long i = 0; i < n; ++i) {
        // conjugate to the Lax matrix, hence the same eigenvalue mu
        Matrix2<R> Rm = Matrix2<R>::identity();
        for (long k = i; k < n; ++k) Rm = A[static_cast<std::size_t>(k)] * Rm;
        Rm = Minv * Rm;
        for (long k = 0; k < i; ++k) Rm = A[static_cast<std::size_t>(k)] * Rm;
        Q.vertices.push_back(detail::eigenvector(Rm, mu));
    }
    if (Q.field == Field::Real)
        for (auto& v : Q.vertices)
            if (std::abs(v.num.imag()) + std::abs(v.den.imag()) > R(1e-12)) Q.field = Field::Complex;
    return Q;
}

// max_i |[p_i, p_{i+1}, q_i, q_{i+1}] - alpha| relative to max(1, |alpha|)
template <std::floating_point R>
R relation_residual(const TwistedPolygon<R>& P, const TwistedPolygon<R>& Q, Complex<R> alpha) {
    R worst = 0;
    for (long i = 0; i < P.n(); ++i) {
        Point<R> x = cross_ratio(P.vertex(i), P.vertex(i + 1), Q.vertex(i), Q.vertex(i + 1));
        R d = x.is_infinite() ? std::numeric_limits<R>::infinity() : std::abs(x.value() - alpha);
        worst = std::max(worst, d / std::max(R(1), std::abs(alpha)));
    }
    return worst;
}

template <std::floating_point R> bool is_real_point(const Point<R>& p, R tol = R(1e-9)) {
    return std::abs(p.num.imag()) <= tol && std::abs(p.den.imag()) <= tol;
}

// All polygons Q with [p_i, p_{i+1}, q_i, q_{i+1}] = alpha and the same monodromy matrix as P.
// Infinite fibres are represented by `samples` partners drawn from seeded random seeds z.
template <std::floating_point R>
RelationResult<R> alpha_related(const TwistedPolygon<R>& P, Complex<R> alpha, const Tolerances<R>& tol = {},
                                bool allow_complex = false, std::uint64_t seed = 0, int samples = 2) {
    require_alpha(alpha);
    require_nondegenerate(P, tol);
    RelationResult<R> out;
    Matrix2<R> L = lax_matrix(P, Complex<R>(1) / alpha, tol);
    MoebiusClass<R> cls = classify(L, tol);
    out.eigenvalue_ratio = cls.eigenvalue_ratio;
    std::vector<Point<R>> seeds;
    switch (cls.kind) {
    case MoebiusKind::Identity: {
        out.classification = RelationKind::Infinite;
        Rng rng(seed);
        while (static_cast<int>(seeds.size()) < samples) {
            Point<R> z = random_point<R>(rng, P.field);
            bool far = true;
            for (long i = 0; i < P.n(); ++i) far &= chordal(z, P.vertex(i)) > R(1e-3);
            if (far) seeds.push_back(z);
        }
        break;
    }
    case MoebiusKind::Parabolic:
        out.classification = RelationKind::One;
        seeds = cls.fixed_points;
        break;
    case MoebiusKind::Loxodromic:
        out.classification = RelationKind::Two;
        seeds = cls.fixed_points;
        break;
    }
    bool real_problem = P.field == Field::Real && alpha.imag() == R(0);
    if (real_problem && out.classification == RelationKind::Two &&
        !(is_real_point(seeds[0], tol.cls) && is_real_point(seeds[1], tol.cls))) {
        out.classification = RelationKind::Zero;
        out.complexified = true;
        if (!allow_complex) return out;
    }
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        TwistedPolygon<R> Q = cls.kind == MoebiusKind::Loxodromic ? partner_from_eigenvalue(P, alpha, cls.eigenvalues[k])
                                                                       : partner_from_seed(P, alpha, seeds[k]);
        if (real_problem && !out.complexified) {
            for (auto& v : Q.vertices) v = Point<R>::from(Complex<R>(v.num.real()), Complex<R>(v.den.real()));
            Q.field = Field::Real;
        }
        out.residual = std::max(out.residual, relation_residual(P, Q, alpha));
        out.degenerate.push_back(separation(Q) <= tol.deg);
        out.partners.push_back(std::move(Q));
    }
    return out;
}

enum class BranchPolicy { NoBacktrack, EigenLargest, EigenSmallest };

inline const char* branch_name(BranchPolicy b) {
    switch (b) {
    case BranchPolicy::NoBacktrack: return "no-backtrack";
    case BranchPolicy::EigenLargest: return "eigen-largest";
    case BranchPolicy::EigenSmallest: return "eigen-smallest";
    }
    return "?";
}

template <std::floating_point R> struct OrbitState {
    TwistedPolygon<R> current;
    std::optional<TwistedPolygon<R>> previous;
    Complex<R> alpha{-1};
    long step = 0;
    BranchPolicy branch_policy = BranchPolicy::NoBacktrack;
    R residual = 0;
    R condition = 0;  // |log|eigenvalue ratio|| of the Lax matrix; small means near-parabolic
    bool regauge = true;  // renormalize by a Moebius map after every step
};

// Moebius map sending (p_k, p_{k+1}, p_{k+2}) to (0, sqrt 3, -sqrt 3), three equally spaced points of a
// great circle, for the k that maximizes the vertex separation of the image. Real when P is real.
template <std::floating_point R> Matrix2<R> spreading_gauge(const TwistedPolygon<R>& P) {
    R r3 = std::sqrt(R(3));
    // B sends (0, inf, 1) to (0, sqrt 3, -sqrt 3)
    Matrix2<R> B{Complex<R>(r3), Complex<R>(0), Complex<R>(1), Complex<R>(-2)};
    Matrix2<R> best = Matrix2<R>::identity();
    R best_sep = -1;
    for (long k = 0; k < P.n(); ++k) {
        Point<R> a = P.vertex(k), b = P.vertex(k + 1), c = P.vertex(k + 2);
        // z -> [z, a; c, b] style map with a -> 0, b -> inf, c -> 1
        Complex<R> cb = det(c, b), ca = det(c, a);
        Matrix2<R> T{a.den * cb, -a.num * cb, b.den * ca, -b.num * ca};
        Matrix2<R> Psi = B * T;
        Psi = (Complex<R>(1) / Psi.max_abs()) * Psi;
        R sep = separation(apply_moebius(Psi, P));
        if (sep > best_sep) {
            best_sep = sep;
            best = Psi;
        }
    }
    return best;
}

// One step of the 2-2 dynamics.
template <std::floating_point R> OrbitState<R> step(const OrbitState<R>& s, const Tolerances<R>& tol = {}, bool allow_complex = false) {
    RelationResult<R> rel = alpha_related(s.current, s.alpha, tol, allow_complex);
    if (rel.classification == RelationKind::Zero && !allow_complex)
        throw Error(Errc::RealFieldNoFixedPoints, "real polygon has no real partner");
    if (rel.classification == RelationKind::One || rel.classification == RelationKind::Infinite)
        throw Error(Errc::OrbitTerminated, std::string("relation is ") + relation_name(rel.classification));
    std::size_t pick = 0;
    switch (s.branch_policy) {
    case BranchPolicy::EigenLargest: pick = 0; break;
    case BranchPolicy::EigenSmallest: pick = 1; break;
    case BranchPolicy::NoBacktrack:
        if (s.previous) {
            Point<R> back = s.previous->vertices[0];
            pick = chordal(rel.partners[1].vertices[0], back) > chordal(rel.partners[0].vertices[0], back) ? 1 : 0;
        }
        break;
    }
    if (rel.degenerate[pick]) throw Error(Errc::OrbitTerminated, "partner is degenerate");
    OrbitState<R> next;
    next.previous = s.current;
    next.current = rel.partners[pick];
    next.alpha = s.alpha;
    next.step = s.step + 1;
    next.branch_policy = s.branch_policy;
    next.residual = relation_residual(s.current, next.current, s.alpha);
    next.condition = std::abs(std::log(std::abs(rel.eigenvalue_ratio)));
    next.regauge = s.regauge;
    if (s.regauge) {
        Matrix2<R> Psi = spreading_gauge(next.current);
        next.current = apply_moebius(Psi, next.current);
        next.previous = apply_moebius(Psi, *next.previous);
    }
    return next;
}

// ---- Bianchi permutability ----

template <std::floating_point R> struct BianchiResult {
    TwistedPolygon<R> S, S_alt;
    R route_difference = 0;  // max chordal distance between the two constructions
    R residual_QS = 0, residual_RS = 0;
};

template <std::floating_point R>
BianchiResult<R> bianchi_fourth(const TwistedPolygon<R>& P, const TwistedPolygon<R>& Q, const TwistedPolygon<R>& Rp, Complex<R> alpha,
                                Complex<R> beta, R rel_tol = R(1e-9)) {
    if (std::abs(alpha - beta) <= R(1e-14) * std::max(R(1), std::abs(alpha))) throw Error(Errc::EqualAlphaBeta, "alpha = beta");
    require_alpha(alpha);
    require_alpha(beta);
    if (relation_residual(P, Q, alpha) > rel_tol) throw Error(Errc::InputsNotRelated, "P and Q are not alpha-related");
    if (relation_residual(P, Rp, beta) > rel_tol) throw Error(Errc::InputsNotRelated, "P and R are not beta-related");
    BianchiResult<R> out;
    Complex<R> one(1);
    Complex<R> mu = (one - alpha) / (one - alpha / beta);
    Complex<R> mu2 = (one - beta) / (one - beta / alpha);
    Point<R> p1 = P.vertex(0), q1 = Q.vertex(0), r1 = Rp.vertex(0);
    Point<R> s1 = apply(loxodromic_matrix(p1, q1, one / mu), r1);
    Point<R> s1b = apply(loxodromic_matrix(p1, r1, one / mu2), q1);
    out.S = partner_from_seed(Q, beta, s1);
    out.S_alt = partner_from_seed(Rp, alpha, s1b);
    for (long i = 0; i < P.n(); ++i) out.route_difference = std::max(out.route_difference, chordal(out.S.vertex(i), out.S_alt.vertex(i)));
    out.residual_QS = relation_residual(Q, out.S, beta);
    out.residual_RS = relation_residual(Rp, out.S, alpha);
    return out;
}

// ---- auxiliary coordinates and the moduli-level map ----

template <std::floating_point R> struct AuxReport {
    CVec<R> x, y;
    R sum_residual = 0, c_residual = 0, d_residual = 0;
};

template <std::floating_point R>
AuxReport<R> aux_coordinates(const TwistedPolygon<R>& P, const TwistedPolygon<R>& Q, Complex<R> alpha, R rel_tol = R(1e-9)) {
    if (relation_residual(P, Q, alpha) > rel_tol) throw Error(Errc::InputsNotRelated, "polygons are not alpha-related");
    AuxReport<R> r;
    long n = P.n();
    for (long i = 0; i < n; ++i) {
        r.x.push_back(cr(P.vertex(i), P.vertex(i + 1), P.vertex(i - 1), Q.vertex(i)));
        r.y.push_back(cr(Q.vertex(i), Q.vertex(i + 1), Q.vertex(i - 1), P.vertex(i)));
    }
    CVec<R> c = cross_ratios(P), d = cross_ratios(Q);
    for (long i = 0; i < n; ++i) {
        std::size_t a = static_cast<std::size_t>(i), b = static_cast<std::size_t>((i + 1) % n);
        r.sum_residual = std::max(r.sum_residual, std::abs(r.x[a] + r.y[a] - Complex<R>(1)));
        r.c_residual = std::max(r.c_residual, std::abs(c[a] - alpha * r.x[a] * (Complex<R>(1) - r.x[b])) / std::max(R(1), std::abs(c[a])));
        r.d_residual = std::max(r.d_residual, std::abs(d[a] - alpha * r.y[a] * (Complex<R>(1) - r.y[b])) / std::max(R(1), std::abs(d[a])));
    }
    return r;
}

// c_i = alpha x_i (1 - x_{i+1})
template <std::floating_point R> CVec<R> pi_alpha(const CVec<R>& x, Complex<R> alpha) {
    CVec<R> c;
    for (std::size_t i = 0; i < x.size(); ++i) c.push_back(alpha * x[i] * (Complex<R>(1) - x[(i + 1) % x.size()]));
    return c;
}

// x solving x_i = c_i / (alpha (1 - x_{i+1})) from the fixed point x_1 of M(c / alpha).
template <std::floating_point R> CVec<R> x_from_seed(const CVec<R>& c, Complex<R> alpha, const Point<R>& x1) {
    long n = static_cast<long>(c.size());
    CVec<R> x(static_cast<std::size_t>(n));
    Point<R> cur = x1;  // x_{n+1} = x_1
    for (long i = n; i >= 1; --i) {
        cur = apply(frame_step<R>(c[static_cast<std::size_t>(i - 1)] / alpha), cur);
        x[static_cast<std::size_t>(i - 1)] = cur.value();
    }
    return x;
}

template <std::floating_point R> CVec<R> scaled(const CVec<R>& c, Complex<R> t) {
    CVec<R> out;
    for (auto& v : c) out.push_back(v * t);
    return out;
}

// Fixed points of M(c / alpha) in classification order.
template <std::floating_point R> std::vector<Point<R>> x_fixed_points(const CVec<R>& c, Complex<R> alpha, const Tolerances<R>& tol = {}) {
    return classify(monodromy_from_c(scaled(c, Complex<R>(1) / alpha)), tol).fixed_points;
}

template <std::floating_point R> struct ModuliStep {
    CVec<R> x, d;
};

// d = moduli image of c under the alpha relation on the chosen branch (0 or 1).
template <std::floating_point R>
ModuliStep<R> moduli_map(const CVec<R>& c, Complex<R> alpha, int branch = 0, Field field = Field::Complex, const Tolerances<R>& tol = {}) {
    require_alpha(alpha);
    auto fp = x_fixed_points(c, alpha, tol);
    if (fp.empty()) throw Error(Errc::OrbitTerminated, "infinite fibre: supply a seed");
    Point<R> x1 = fp[std::min<std::size_t>(static_cast<std::size_t>(branch), fp.size() - 1)];
    if (field == Field::Real && !is_real_point(x1, tol.cls)) throw Error(Errc::NoRealFixedPoint, "fixed point is not real");
    ModuliStep<R> out;
    out.x = x_from_seed(c, alpha, x1);
    CVec<R> y;
    for (auto& v : out.x) y.push_back(Complex<R>(1) - v);
    out.d = pi_alpha(y, alpha);
    return out;
}

enum class ExceptionalKind { Infinite, One, Generic };

inline const char* exceptional_name(ExceptionalKind k) {
    switch (k) {
    case ExceptionalKind::Infinite: return "Infinite";
    case ExceptionalKind::One: return "One";
    case ExceptionalKind::Generic: return "Generic";
    }
    return "?";
}

template <std::floating_point R> struct ExceptionalReport {
    ExceptionalKind kind = ExceptionalKind::Generic;
    CVec<R> closure;          // D_{i,n-3+i}(c / alpha)
    Complex<R> trace_residual; // alpha^n E_alpha - 4
    CVec<R> u;                // u-chart point of one fibre element
    CVec<R> u_sums;           // 1 + u_i + u_i u_{i+1} + ... + u_[i, i+n-2]
    Complex<R> u_product;     // u_[n]
    R dij_residual = 0;       // D_{i,j}(c/alpha) against its u-chart expression
};

template <std::floating_point R>
ExceptionalReport<R> exceptional_classify(const CVec<R>& c, Complex<R> alpha, R tau = R(1e-9), std::uint64_t seed = 0) {
    require_alpha(alpha);
    ExceptionalReport<R> r;
    long n = static_cast<long>(c.size());
    CVec<R> cs = scaled(c, Complex<R>(1) / alpha);
    r.closure = closure_residuals(cs);
    Complex<R> s = alternating_F_sum(F_all(cs));
    r.trace_residual = s * s / product(cs) - Complex<R>(4);
    bool all_zero = max_abs(r.closure) < tau;
    if (all_zero) r.kind = ExceptionalKind::Infinite;
    else if (std::abs(r.trace_residual) < tau) r.kind = ExceptionalKind::One;

    // a fibre point: fixed point of M(c/alpha), or x_i = [p_i, p_{i+1}, p_{i-1}, z] on an infinite fibre
    CVec<R> x;
    try {
        if (all_zero) {
            auto P = reconstruct(cs);
            Rng rng(seed);
            Point<R> z = random_point<R>(rng, Field::Complex);
            for (long i = 0; i < n; ++i) x.push_back(cr(P.vertex(i), P.vertex(i + 1), P.vertex(i - 1), z));
        } else {
            x = x_from_seed(c, alpha, x_fixed_points(c, alpha)[0]);
        }
    } catch (const Error&) {
        return r;
    }
    for (auto& v : x) r.u.push_back(Complex<R>(1) / v - Complex<R>(1));
    auto u = [&](long i) { return r.u[static_cast<std::size_t>((((i - 1) % n) + n) % n)]; };
    r.u_product = 1;
    for (long i = 1; i <= n; ++i) r.u_product *= u(i);
    for (long i = 1; i <= n; ++i) {
        Complex<R> sum(1), term(1);
        for (long k = i; k <= i + n - 2; ++k) {
            term *= u(k);
            sum += term;
        }
        r.u_sums.push_back(sum);
    }
    for (long i = 1; i <= n; ++i)
        for (long j = i - 1; j <= i + n - 2; ++j) {
            Complex<R> num(1), term(1), den(1);
            for (long k = i; k <= j + 1; ++k) {
                term *= u(k);
                num += term;
                den *= Complex<R>(1) + u(k);
            }
            Complex<R> D = continuant(cs, i, j);
            r.dij_residual = std::max(r.dij_residual, std::abs(D - num / den) / std::max(R(1), std::abs(D)));
        }
    return r;
}

} // namespace crd

#pragma once

#include <numbers>
#include <optional>

#include "poisson.hpp"
#include "random.hpp"

namespace crd {

// Moebius map sending 0, infinity, 1 to a, b, c.
template <std::floating_point R> Matrix2<R> three_point_map(const Point<R>& a, const Point<R>& b, const Point<R>& c) {
    Complex<R> D = det(a, b);
    if (std::abs(D) <= R(1e-14) * a.norm() * b.norm()) throw Error(Errc::DegenerateQuadruple, "coincident points");
    Complex<R> s = det(c, b) / D, t = det(a, c) / D;
    return {t * b.num, s * a.num, t * b.den, s * a.den};
}

// The point z2 with [z1, z2, z3, z4] = X.
template <std::floating_point R> Point<R> second_point_with_cross_ratio(const Point<R>& z1, const Point<R>& z3, const Point<R>& z4, const Point<R>& X) {
    // z -> [z1, z, z3, z4] sends z4 -> 0, z3 -> infinity, z1 -> 1
    return apply(three_point_map(z4, z3, z1), X);
}

template <std::floating_point R> Complex<R> finite_value(const Point<R>& p) { return p.num / p.den; }

// ---- quadrilaterals ----

// Roots of a binary quadratic a X^2 + b XY + c Y^2 as points of P^1.
template <std::floating_point R> std::array<Point<R>, 2> quadratic_roots(Complex<R> a, Complex<R> b, Complex<R> c) {
    Complex<R> s = std::sqrt(b * b - R(4) * a * c);
    Complex<R> q = std::abs(b + s) >= std::abs(b - s) ? -(b + s) / R(2) : -(b - s) / R(2);
    if (q == Complex<R>(0)) throw Error(Errc::DegeneratePolygon, "degenerate quadratic");
    return {Point<R>::from(q, a), Point<R>::from(c, q)};
}

// Common perpendicular of the lines z1 z3 and z2 z4: the pair harmonic to both point pairs.
template <std::floating_point R>
std::array<Point<R>, 2> common_perpendicular(const Point<R>& z1, const Point<R>& z2, const Point<R>& z3, const Point<R>& z4) {
    auto form = [](const Point<R>& p, const Point<R>& q) {
        return std::array<Complex<R>, 3>{p.den * q.den, -(p.den * q.num + p.num * q.den), p.num * q.num};
    };
    auto f = form(z1, z3), g = form(z2, z4);
    // Jacobian of the two quadratic forms
    return quadratic_roots(f[0] * g[1] - g[0] * f[1], R(2) * (f[0] * g[2] - g[0] * f[2]), f[1] * g[2] - g[1] * f[2]);
}

template <std::floating_point R> struct QuadReport {
    std::array<Point<R>, 2> axis;
    std::vector<TwistedPolygon<R>> partners;
    R axis_difference = 0;    // max pair distance between the axis of P and those of its partners
    R isometry = 0;           // max over partners of min over cyclic relabelings |cr(Q) - cr(P)|
    R normal_form = 0;        // P and partners are (z, w, -z, -w), (x, y, -x, -y) in the axis gauge
    R quad_equations = 0;     // zx + yw and (1 - alpha)(xy + zw) - (wx + zy), relative
};

template <std::floating_point R> QuadReport<R> quad_axis_check(const TwistedPolygon<R>& P, Complex<R> alpha) {
    if (P.n() != 4) throw Error(Errc::DegeneratePolygon, "quadrilateral expected");
    require_nondegenerate(P);
    QuadReport<R> r;
    auto ax = [](const TwistedPolygon<R>& Q) { return common_perpendicular(Q.vertices[0], Q.vertices[1], Q.vertices[2], Q.vertices[3]); };
    r.axis = ax(P);
    auto rel = alpha_related(P, alpha, {}, true);
    r.partners = rel.partners;
    // axis gauge: axis endpoints to 0 and infinity
    const Point<R>& u = r.axis[0];
    const Point<R>& v = r.axis[1];
    Matrix2<R> T{u.den, -u.num, v.den, -v.num};
    auto val = [&](const Point<R>& p) { return finite_value(apply(T, p)); };
    auto sym = [&](const TwistedPolygon<R>& Q) {
        Complex<R> a = val(Q.vertices[0]), b = val(Q.vertices[1]);
        R s = std::max(R(1), std::max(std::abs(a), std::abs(b)));
        return std::max(std::abs(val(Q.vertices[2]) + a), std::abs(val(Q.vertices[3]) + b)) / s;
    };
    auto crq = [](const TwistedPolygon<R>& Q, long s) {
        return cr(Q.vertex(s), Q.vertex(s + 1), Q.vertex(s + 2), Q.vertex(s + 3));
    };
    Complex<R> c0 = crq(P, 0), z = val(P.vertices[0]), w = val(P.vertices[1]);
    r.normal_form = sym(P);
    for (auto& Q : r.partners) {
        r.axis_difference = std::max(r.axis_difference, pair_distance(r.axis, ax(Q)));
        R best = std::numeric_limits<R>::infinity();
        for (long s = 0; s < 4; ++s) best = std::min(best, std::abs(crq(Q, s) - c0) / std::max(R(1), std::abs(c0)));
        r.isometry = std::max(r.isometry, best);
        r.normal_form = std::max(r.normal_form, sym(Q));
        Complex<R> x = val(Q.vertices[0]), y = val(Q.vertices[1]);
        R scale = std::max({R(1), std::abs(z * x), std::abs(y * w), std::abs(x * y), std::abs(z * w)});
        R e1 = std::abs(z * x + y * w) / scale;
        R e2 = std::abs((Complex<R>(1) - alpha) * (x * y + z * w) - (w * x + z * y)) / scale;
        r.quad_equations = std::max({r.quad_equations, e1, e2});
    }
    return r;
}

// The expression 4 lambda / (lambda^2 - 1) as printed for [z, w, -z, -w] with lambda = z/w.
template <std::floating_point R> Complex<R> quad_lambda_expression(Complex<R> lambda) {
    return R(4) * lambda / (lambda * lambda - Complex<R>(1));
}

// [z, w, -z, -w] as a function of lambda = z/w.
template <std::floating_point R> Complex<R> quad_cross_ratio(Complex<R> lambda) {
    return R(4) * lambda / ((lambda + Complex<R>(1)) * (lambda + Complex<R>(1)));
}

// ---- exceptional pentagons and hexagon ----

template <std::floating_point R> Complex<R> pentagon_alpha(bool pentagram = false) {
    R s5 = std::sqrt(R(5));
    return pentagram ? (R(3) + s5) / (R(3) - s5) : (R(3) - s5) / (R(3) + s5);
}

// Constant cross-ratio coordinates of the closed alpha-exceptional pentagon, if alpha is one of the
// two exceptional values; c solves c^2 - 3c + 1 = 0.
template <std::floating_point R> std::optional<CVec<R>> exceptional_pentagon(Complex<R> alpha, R tau = R(1e-9)) {
    R s5 = std::sqrt(R(5));
    for (bool star : {false, true}) {
        Complex<R> a = pentagon_alpha<R>(star);
        if (std::abs(alpha - a) <= tau * std::max(R(1), std::abs(a)))
            return CVec<R>(5, Complex<R>(star ? (R(3) + s5) / R(2) : (R(3) - s5) / R(2)));
    }
    return std::nullopt;
}

// Regular ideal pentagon (or pentagram) with the exceptional cross-ratios.
template <std::floating_point R> TwistedPolygon<R> regular_polygon(long n, long step = 1, Field f = Field::Real) {
    TwistedPolygon<R> P;
    P.field = f;
    for (long j = 0; j < n; ++j) {
        R t = std::numbers::pi_v<R> * R(j * step) / R(n);
        P.vertices.push_back(Point<R>::from(Complex<R>(std::sin(t)), Complex<R>(std::cos(t))));
    }
    return P;
}

template <std::floating_point R> struct EquidistanceReport {
    long samples = 0;
    R closure = 0;   // max chordal(q_6, q_1)
    R distance = 0;  // max |side-to-side complex distance - log(5)/2|
};

// Partners of the regular pentagon at the exceptional alpha from random starting points.
template <std::floating_point R> EquidistanceReport<R> pentagon_equidistance(long samples, std::uint64_t seed) {
    TwistedPolygon<R> P = regular_polygon<R>(5);
    Complex<R> alpha = pentagon_alpha<R>();
    Rng rng(seed);
    EquidistanceReport<R> r;
    std::uniform_real_distribution<R> ang(0, std::numbers::pi_v<R>);
    while (r.samples < samples) {
        R t = ang(rng);
        Point<R> z = Point<R>::from(Complex<R>(std::sin(t)), Complex<R>(std::cos(t)));
        bool far = true;
        for (long i = 0; i < 5; ++i) far &= chordal(z, P.vertex(i)) > R(1e-2);
        if (!far) continue;
        TwistedPolygon<R> Q = partner_from_seed(P, alpha, z);
        Point<R> q6 = apply(loxodromic_matrix(P.vertex(4), P.vertex(5), Complex<R>(1) / alpha), Q.vertices[4]);
        r.closure = std::max(r.closure, chordal(q6, Q.vertices[0]));
        for (long i = 0; i < 5; ++i) {
            Complex<R> chi = complex_distance(Q.vertex(i), Q.vertex(i + 1), P.vertex(i), P.vertex(i + 1));
            r.distance = std::max(r.distance, std::abs(chi - R(0.5) * std::log(R(5))));
        }
        ++r.samples;
    }
    return r;
}

// Vertices of a regular ideal octahedron along a six-edge cycle: (0, 1, i, infinity, -1, -i).
template <std::floating_point R> TwistedPolygon<R> exceptional_hexagon() {
    TwistedPolygon<R> P;
    Complex<R> I(0, 1);
    for (Complex<R> z : {Complex<R>(0), Complex<R>(1), I}) P.vertices.push_back(Point<R>::affine(z));
    P.vertices.push_back(Point<R>::infinity());
    for (Complex<R> z : {Complex<R>(-1), -I}) P.vertices.push_back(Point<R>::affine(z));
    return P;
}

// ---- octagons orthogonal to infinitely many octagons ----

// Closure conditions for c and -c: the even and odd parts of D_{i,i+5}.
template <std::floating_point R> CVec<R> octagon_residuals(const CVec<R>& c) {
    CVec<R> m;
    for (auto& v : c) m.push_back(-v);
    CVec<R> a = closure_residuals(c), b = closure_residuals(m), out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back((a[i] + b[i]) / R(2));
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back((a[i] - b[i]) / R(2));
    return out;
}

// Residuals are affine in every c_j, so the Jacobian is exact.
template <std::floating_point R> CMatrix<R> octagon_jacobian(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    CMatrix<R> J(2 * n, n);
    for (long j = 0; j < n; ++j) {
        CVec<R> one = c, zero = c;
        one[static_cast<std::size_t>(j)] = 1;
        zero[static_cast<std::size_t>(j)] = 0;
        CVec<R> a = octagon_residuals(one), b = octagon_residuals(zero);
        for (long i = 0; i < 2 * n; ++i) J(i, j) = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    }
    return J;
}

template <std::floating_point R> struct OctagonSolution {
    CVec<R> c;
    R residual = 0;
    long nullity = 0;
    bool infinite = false;     // exceptional classification at alpha = -1
    R reflections = 0;         // composition of side reflections vs scalar
    long iterations = 0;
};

// Damped Gauss-Newton (minimum-norm steps) from one seed; throws NoConvergence.
template <std::floating_point R> OctagonSolution<R> octagon_newton(CVec<R> c, R tol = R(1e-12), long max_iter = 200) {
    auto norm = [](const CVec<R>& v) { return max_abs(v); };
    R f = norm(octagon_residuals(c));
    long it = 0;
    for (; it < max_iter && f > tol; ++it) {
        CMatrix<R> J = octagon_jacobian(c);
        CVec<R> r = octagon_residuals(c);
        CColumn<R> rv(static_cast<long>(r.size()));
        for (std::size_t i = 0; i < r.size(); ++i) rv(static_cast<long>(i)) = -r[i];
        CColumn<R> d = J.completeOrthogonalDecomposition().solve(rv);
        R step = 1;
        bool moved = false;
        for (int s = 0; s < 30; ++s, step /= 2) {
            CVec<R> trial = c;
            for (std::size_t j = 0; j < c.size(); ++j) trial[j] += step * d(static_cast<long>(j));
            R ft = norm(octagon_residuals(trial));
            if (std::isfinite(ft) && ft < f) {
                c = trial;
                f = ft;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        if (max_abs(c) > R(1e6)) break;
    }
    if (!(f <= tol)) throw Error(Errc::NoConvergence, "octagon Newton did not converge");
    OctagonSolution<R> s;
    s.c = c;
    s.residual = f;
    s.iterations = it;
    s.nullity = static_cast<long>(c.size()) - numerical_rank(octagon_jacobian(c), R(1e-8));
    s.infinite = exceptional_classify(c, Complex<R>(-1)).kind == ExceptionalKind::Infinite;
    TwistedPolygon<R> P = reconstruct(c);
    Matrix2<R> E = edge_product(P, Complex<R>(-1));
    R scale = std::max(std::abs(E.a), std::abs(E.d));
    s.reflections = std::max({std::abs(E.b), std::abs(E.c), std::abs(E.a - E.d)}) / scale;
    return s;
}

// Seeds: the alternating ansatz (a, b, a, b, ...) first, then unstructured complex seeds.
template <std::floating_point R> std::vector<OctagonSolution<R>> exceptional_octagon_scan(long seeds, std::uint64_t seed, R tol = R(1e-12)) {
    Rng rng(seed);
    std::vector<OctagonSolution<R>> out;
    for (long s = 0; s < seeds; ++s) {
        CVec<R> c;
        if (s % 2 == 0) {
            Complex<R> a = random_scalar<R>(rng, Field::Complex), b = random_scalar<R>(rng, Field::Complex);
            for (int i = 0; i < 8; ++i) c.push_back((i % 2 ? b : a) + R(0.1) * random_scalar<R>(rng, Field::Complex));
        } else
            c = random_c<R>(rng, 8, Field::Complex);
        try {
            out.push_back(octagon_newton(c, tol));
        } catch (const Error&) {
        }
    }
    return out;
}

// ---- loxogons ----

// The 2n-gon tan(pi j/n - beta), tan(pi j/n + beta), j = 1..n: an (N, K)-loxogon with N = 2n, K = 2k+1.
template <std::floating_point R> TwistedPolygon<R> make_loxogon(long N, long K, R beta, R pole_tol = R(1e-12)) {
    if (N % 2 != 0) throw Error(Errc::OddN, "the construction needs even n");
    if (K % 2 == 0 || K < 3 || K > N - 2) throw Error(Errc::KOutOfRange, "the construction needs odd 3 <= k <= n-2");
    long n = N / 2;
    TwistedPolygon<R> P;
    P.field = Field::Real;
    for (long j = 1; j <= n; ++j)
        for (R sgn : {R(-1), R(1)}) {
            R t = std::numbers::pi_v<R> * R(j) / R(n) + sgn * beta;
            if (std::abs(std::cos(t)) < pole_tol) throw Error(Errc::PoleBeta, "vertex at a pole of tan");
            P.vertices.push_back(Point<R>::affine(Complex<R>(std::tan(t))));
        }
    require_nondegenerate(P);
    return P;
}

template <std::floating_point R> bool loxogon_rigidity_case(long n, long k) {
    return k == 2 || k == n - 2 || (n % 2 == 1 && (k == 3 || k == n - 3)) || n == 2 * k + 1 || n == 2 * (n - k) + 1;
}

// Residual of the Moebius map p_1, p_2, p_3 -> p_2, p_3, p_4 as a cyclic symmetry.
template <std::floating_point R> R projective_regularity(const TwistedPolygon<R>& P) {
    Matrix2<R> A = three_point_map(P.vertex(0), P.vertex(1), P.vertex(2));
    Matrix2<R> B = three_point_map(P.vertex(1), P.vertex(2), P.vertex(3));
    Matrix2<R> phi = B * A.adjugate();
    R worst = 0;
    for (long i = 0; i < P.n(); ++i) worst = std::max(worst, chordal(apply(phi, P.vertex(i)), P.vertex(i + 1)));
    return worst;
}

template <std::floating_point R> struct LoxogonReport {
    Complex<R> alpha;
    R residual = 0;
    bool is_loxogon = false;
    bool rigidity_case = false;
    R regularity = 0;
    bool projectively_regular = false;
    bool triviality_violation = false;
};

template <std::floating_point R> LoxogonReport<R> verify_loxogon(const TwistedPolygon<R>& P, long k, R tol = R(1e-9)) {
    long n = P.n();
    if (k < 2 || k > n - 2) throw Error(Errc::KOutOfRange, "2 <= k <= n-2");
    LoxogonReport<R> r;
    r.alpha = cr(P.vertex(0), P.vertex(1), P.vertex(k), P.vertex(k + 1));
    for (long i = 1; i < n; ++i)
        r.residual = std::max(r.residual, std::abs(cr(P.vertex(i), P.vertex(i + 1), P.vertex(i + k), P.vertex(i + k + 1)) - r.alpha) /
                                              std::max(R(1), std::abs(r.alpha)));
    r.is_loxogon = r.residual < tol;
    r.rigidity_case = loxogon_rigidity_case<R>(n, k);
    r.regularity = projective_regularity(P);
    r.projectively_regular = r.regularity < R(1e-8);
    r.triviality_violation = r.rigidity_case && r.is_loxogon && !r.projectively_regular;
    return r;
}

template <std::floating_point R> struct LoxogonSearchReport {
    long trials = 0, converged = 0, regular = 0, nonregular = 0;
    R max_regularity_of_converged = 0;
};

// Falsification harness for odd n: perturb the regular n-gon, project back onto the (n, k)-loxogon
// equations by Gauss-Newton (gauge p_1, p_2, p_3 = 0, 1, infinity), and classify the limits.
template <std::floating_point R>
LoxogonSearchReport<R> loxogon_search(long n, long k, long trials, std::uint64_t seed, R perturbation = R(0.05)) {
    Rng rng(seed);
    std::normal_distribution<R> g;
    LoxogonSearchReport<R> rep;
    TwistedPolygon<R> reg = regular_polygon<R>(n);
    Matrix2<R> G = three_point_map(reg.vertex(0), reg.vertex(2), reg.vertex(1)).adjugate();  // p1,p2,p3 -> 0,1,inf
    std::vector<R> base;
    for (long i = 3; i < n; ++i) base.push_back(finite_value(apply(G, reg.vertex(i))).real());
    auto build = [&](const std::vector<R>& x) {
        TwistedPolygon<R> P;
        P.field = Field::Real;
        P.vertices = {Point<R>::affine(Complex<R>(0)), Point<R>::affine(Complex<R>(1)), Point<R>::infinity()};
        for (R v : x) P.vertices.push_back(Point<R>::affine(Complex<R>(v)));
        return P;
    };
    auto residuals = [&](const std::vector<R>& x) {
        TwistedPolygon<R> P = build(x);
        Eigen::Matrix<R, Eigen::Dynamic, 1> f(n - 1);
        Complex<R> a = cr(P.vertex(0), P.vertex(1), P.vertex(k), P.vertex(k + 1));
        for (long i = 1; i < n; ++i) f(i - 1) = (cr(P.vertex(i), P.vertex(i + 1), P.vertex(i + k), P.vertex(i + k + 1)) - a).real();
        return f;
    };
    for (long t = 0; t < trials; ++t) {
        ++rep.trials;
        std::vector<R> x = base;
        for (auto& v : x) v += perturbation * g(rng) * std::max(R(1), std::abs(v));
        bool ok = false;
        try {
            for (int it = 0; it < 60; ++it) {
                auto f = residuals(x);
                if (f.cwiseAbs().maxCoeff() < R(1e-12)) {
                    ok = true;
                    break;
                }
                Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic> J(f.size(), static_cast<long>(x.size()));
                for (std::size_t j = 0; j < x.size(); ++j) {
                    R h = R(1e-7) * std::max(R(1), std::abs(x[j]));
                    auto xp = x, xm = x;
                    xp[j] += h;
                    xm[j] -= h;
                    J.col(static_cast<long>(j)) = (residuals(xp) - residuals(xm)) / (R(2) * h);
                }
                Eigen::Matrix<R, Eigen::Dynamic, 1> d = J.completeOrthogonalDecomposition().solve(-f);
                for (std::size_t j = 0; j < x.size(); ++j) x[j] += d(static_cast<long>(j));
            }
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) continue;
        ++rep.converged;
        R reg_res = projective_regularity(build(x));
        rep.max_regularity_of_converged = std::max(rep.max_regularity_of_converged, reg_res);
        if (reg_res < R(1e-8)) ++rep.regular;
        else ++rep.nonregular;
    }
    return rep;
}

// ---- infinitesimal rigidity of regular odd-gons ----

// Eigenvalue j of the circulant system mu_{k-1} c_j - mu_{k+1} c_{j+1} + mu_{k+1} c_{j+k} - mu_{k-1} c_{j+k+1}.
template <std::floating_point R> Complex<R> rigidity_eigenvalue(long n, long k, long j) {
    auto mu = [n](long t) { return std::sin(std::numbers::pi_v<R> * R(t) / R(n)); };
    auto w = [n, j](long p) { return std::polar(R(1), R(2) * std::numbers::pi_v<R> * R((j * p) % n) / R(n)); };
    return mu(k - 1) - mu(k + 1) * w(1) + mu(k + 1) * w(k) - mu(k - 1) * w(k + 1);
}

// Integer form of the solvability criterion: n = 2(j + k) and n | (j-1)(k-1).
inline bool rigidity_criterion(long n, long j, long k) { return n == 2 * (j + k) && ((j - 1) * (k - 1)) % n == 0; }

// The criterion up to the symmetries j -> n - j (conjugate eigenvalue) and k -> n - k.
inline bool rigidity_criterion_symmetric(long n, long j, long k) {
    for (long jj : {j, n - j})
        for (long kk : {k, n - k})
            if (rigidity_criterion(n, jj, kk)) return true;
    return false;
}

// sin(pi j(k+1)/n) sin(pi(k-1)/n) = sin(pi j(k-1)/n) sin(pi(k+1)/n), the pole-free form of
// tan(pi j/n) tan(pi k/n) = tan(pi jk/n) tan(pi/n).
template <std::floating_point R> bool tangent_equation_holds(long n, long j, long k, R tol = R(1e-10)) {
    auto s = [n](long t) { return std::sin(std::numbers::pi_v<R> * R(t % (2 * n)) / R(n)); };
    return std::abs(s(j * (k + 1)) * s(k - 1) - s(j * (k - 1)) * s(k + 1)) < tol;
}

template <std::floating_point R> struct RigidityReport {
    long n = 0, k = 0;
    std::vector<Complex<R>> eigenvalues;
    std::vector<long> zero_indices;   // |lambda_j| < tol
    std::vector<long> nontrivial;     // zero indices other than 0, 1, n-1
    long kernel_dim = 0;
};

template <std::floating_point R> RigidityReport<R> rigidity_spectrum(long n, long k, R tol = R(1e-10)) {
    if (n < 5 || k < 2 || k > n - 2) throw Error(Errc::KOutOfRange, "n >= 5 and 2 <= k <= n-2");
    RigidityReport<R> r;
    r.n = n;
    r.k = k;
    for (long j = 0; j < n; ++j) {
        Complex<R> l = rigidity_eigenvalue<R>(n, k, j);
        r.eigenvalues.push_back(l);
        if (std::abs(l) < tol) {
            r.zero_indices.push_back(j);
            if (j != 0 && j != 1 && j != n - 1) r.nontrivial.push_back(j);
        }
    }
    r.kernel_dim = static_cast<long>(r.zero_indices.size());
    return r;
}

struct RigidityScan {
    long cases = 0;          // (n, j, k) triples compared
    long eigen_mismatch = 0; // zero eigenvalue vs criterion
    long tangent_mismatch = 0;
    std::vector<std::array<long, 3>> solutions;  // (n, j, k) with j, k < n/2 satisfying the criterion
};

// Brute-force comparison of zero eigenvalues and of the tangent equation with the integer criterion,
// over 2 <= j, k <= n-2 with j, k != n/2 (where a tangent is infinite and extra zeros occur).
template <std::floating_point R> RigidityScan rigidity_scan(long n_min, long n_max) {
    RigidityScan s;
    for (long n = n_min; n <= n_max; ++n)
        for (long k = 2; k <= n - 2; ++k) {
            if (2 * k == n) continue;
            for (long j = 2; j <= n - 2; ++j) {
                if (2 * j == n) continue;
                ++s.cases;
                bool crit = rigidity_criterion_symmetric(n, j, k);
                bool zero = std::abs(rigidity_eigenvalue<R>(n, k, j)) < R(1e-10);
                if (zero != crit) ++s.eigen_mismatch;
                if (tangent_equation_holds<R>(n, j, k) != crit) ++s.tangent_mismatch;
                if (rigidity_criterion(n, j, k) && 2 * j < n && 2 * k < n) s.solutions.push_back({n, j, k});
            }
        }
    return s;
}

// ---- consistent labelings of an ideal tetrahedron ----

using Perm4 = std::array<int, 4>;

inline std::vector<Perm4> even_permutations() {
    std::vector<Perm4> out;
    Perm4 p{0, 1, 2, 3};
    do {
        int inv = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) inv += p[static_cast<std::size_t>(a)] > p[static_cast<std::size_t>(b)];
        if (inv % 2 == 0) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

template <std::floating_point R> struct TetrahedronLabeling {
    std::array<Point<R>, 4> u;
    std::array<std::array<Complex<R>, 4>, 4> c{};

    Complex<R> label(int i, int j) const { return c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    Matrix2<R> A(int i, int j) const { return loxodromic_matrix(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)], label(i, j)); }
};

template <std::floating_point R> Complex<R> tetra_cr(const std::array<Point<R>, 4>& u, const Perm4& p) {
    return cr(u[static_cast<std::size_t>(p[0])], u[static_cast<std::size_t>(p[1])], u[static_cast<std::size_t>(p[2])], u[static_cast<std::size_t>(p[3])]);
}

// All labels from c_01 by c_ik = (1 - X)/(1 - X c_ij), X = [u_i, u_j, u_k, u_l] with ijkl even.
template <std::floating_point R>
TetrahedronLabeling<R> consistent_labeling(const std::array<Point<R>, 4>& u, Complex<R> c01, R tol = R(1e-10)) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (chordal(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)]) <= tol)
                throw Error(Errc::DegenerateTetrahedron, "tetrahedron vertices coincide");
    TetrahedronLabeling<R> L;
    L.u = u;
    auto next = [&](Complex<R> cij, const Perm4& p) {
        Complex<R> X = tetra_cr(u, p);
        Complex<R> den = Complex<R>(1) - X * cij;
        if (cij == Complex<R>(0) || std::abs(den) <= tol * std::max(R(1), std::abs(X * cij)))
            throw Error(Errc::ExcludedLabelValue, "label is 0 or the inverse cross-ratio");
        return (Complex<R>(1) - X) / den;
    };
    Complex<R> c02 = next(c01, {0, 1, 2, 3});
    Complex<R> c03 = next(c02, {0, 2, 3, 1});
    auto set = [&](int i, int j, Complex<R> v) {
        L.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        L.c[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
    };
    set(0, 1, c01);
    set(2, 3, c01);
    set(0, 2, c02);
    set(1, 3, c02);
    set(0, 3, c03);
    set(1, 2, c03);
    return L;
}

template <std::floating_point R> struct LabelingReport {
    R opposite = 0;        // |c_ij - c_kl|
    R vertex_product = 0;  // |c_ij c_ik c_il - 1|
    R adjacency = 0;       // |[u_i,u_j,u_k,u_l] c_ij + [u_i,u_k,u_j,u_l] / c_ik - 1| over 12 even permutations
    R matrix_identity = 0; // |A_ij A_ik A_il - Id|
    R matrix_pairs = 0;    // |A_ij A_ik - A_jl A_kl|
};

template <std::floating_point R> LabelingReport<R> verify_labeling(const TetrahedronLabeling<R>& L) {
    LabelingReport<R> r;
    const Matrix2<R> Id = Matrix2<R>::identity();
    for (const Perm4& p : even_permutations()) {
        int i = p[0], j = p[1], k = p[2], l = p[3];
        r.opposite = std::max(r.opposite, std::abs(L.label(i, j) - L.label(k, l)));
        r.vertex_product = std::max(r.vertex_product, std::abs(L.label(i, j) * L.label(i, k) * L.label(i, l) - Complex<R>(1)));
        Complex<R> e = tetra_cr(L.u, p) * L.label(i, j) + tetra_cr(L.u, {i, k, j, l}) / L.label(i, k) - Complex<R>(1);
        r.adjacency = std::max(r.adjacency, std::abs(e));
        Matrix2<R> Aij = L.A(i, j), Aik = L.A(i, k);
        r.matrix_identity = std::max(r.matrix_identity, max_abs_diff(Aij * Aik * L.A(i, l), Id));
        r.matrix_pairs = std::max(r.matrix_pairs, max_abs_diff(Aij * Aik, L.A(j, l) * L.A(k, l)));
    }
    return r;
}

template <std::floating_point R> struct CubeReport {
    std::array<Point<R>, 4> v;
    R faces = 0;         // |[u_i, u_j, v_k, v_l] - c_ij| over even permutations
    R transports = 0;    // chordal(v_i, L_jk(v_l)) over even permutations
    R cross_ratio = 0;   // |[u_0..u_3] - [v_0..v_3]|
};

template <std::floating_point R> CubeReport<R> cube_complete(const TetrahedronLabeling<R>& L, const Point<R>& v0, R tol = R(1e-10)) {
    for (int i = 1; i < 4; ++i)
        if (chordal(v0, L.u[static_cast<std::size_t>(i)]) <= tol) throw Error(Errc::DegenerateV0, "v0 coincides with u_1, u_2 or u_3");
    CubeReport<R> r;
    r.v = {v0, apply(L.A(3, 2), v0), apply(L.A(1, 3), v0), apply(L.A(2, 1), v0)};
    for (const Perm4& p : even_permutations()) {
        int i = p[0], j = p[1], k = p[2], l = p[3];
        Complex<R> f = cr(L.u[static_cast<std::size_t>(i)], L.u[static_cast<std::size_t>(j)], r.v[static_cast<std::size_t>(k)], r.v[static_cast<std::size_t>(l)]);
        r.faces = std::max(r.faces, std::abs(f - L.label(i, j)) / std::max(R(1), std::abs(L.label(i, j))));
        r.transports = std::max(r.transports, chordal(r.v[static_cast<std::size_t>(i)], apply(L.A(j, k), r.v[static_cast<std::size_t>(l)])));
    }
    Complex<R> a = tetra_cr(L.u, {0, 1, 2, 3}), b = tetra_cr(r.v, {0, 1, 2, 3});
    r.cross_ratio = std::abs(a - b) / std::max(R(1), std::abs(a));
    return r;
}

// Fourth polygon of the permutability square from the cube: [p_i, s_i, q_i, r_i] = alpha(beta-1)/((alpha-1)beta).
template <std::floating_point R>
TwistedPolygon<R> bianchi_from_cube(const TwistedPolygon<R>& P, const TwistedPolygon<R>& Q, const TwistedPolygon<R>& Rp, Complex<R> alpha, Complex<R> beta) {
    Complex<R> c01 = (alpha - Complex<R>(1)) / alpha, c03 = beta / (beta - Complex<R>(1));
    Point<R> X = Point<R>::affine(Complex<R>(1) / (c01 * c03));
    TwistedPolygon<R> S;
    S.monodromy = P.monodromy;
    S.field = P.field;
    for (long i = 0; i < P.n(); ++i) S.vertices.push_back(second_point_with_cross_ratio(P.vertices[static_cast<std::size_t>(i)], Q.vertices[static_cast<std::size_t>(i)], Rp.vertices[static_cast<std::size_t>(i)], X));
    return S;
}

// ---- pentagons: area form and commuting fields ----

// Diagonal frieze coordinates from u_2..u_{n-2} (odd n): x_i = x_{i-2}/u_i from x_0 = 1 and
// x_{i-2} = u_i x_i from x_{n-2} = 1.
template <std::floating_point R> CVec<R> friezex_from_u(const CVec<R>& u) {
    long n = static_cast<long>(u.size()) + 3;
    if (n % 2 == 0) throw Error(Errc::EvenN, "needs odd n");
    auto U = [&](long i) { return u[static_cast<std::size_t>(i - 2)]; };
    CVec<R> x(static_cast<std::size_t>(n - 3));
    auto X = [&](long i) -> Complex<R>& { return x[static_cast<std::size_t>(i - 1)]; };
    Complex<R> prev(1);
    for (long i = 2; i <= n - 3; i += 2) prev = X(i) = prev / U(i);
    prev = Complex<R>(1);
    for (long i = n - 2; i >= 3; i -= 2) prev = X(i - 2) = U(i) * prev;
    return x;
}

template <std::floating_point R> CVec<R> friezex_to_c(const CVec<R>& x) { return rho_embedding(detail::friezex_to_u(x)); }
template <std::floating_point R> CVec<R> friezex_from_c(const CVec<R>& c) { return friezex_from_u(rho_inverse(c)); }

// G_2 on closed pentagons in the diagonal chart.
template <std::floating_point R> Complex<R> pentagon_G2(Complex<R> x, Complex<R> y) {
    Complex<R> one(1);
    return x + (one + y) / x + (one + x) / y + y + (one + x + y) / (x * y);
}

template <std::floating_point R> struct AreaReport {
    R distortion = 0;   // |det J x y / (x' y') - 1|: pullback of dx^dy/(xy) against itself
    R printed_form = 0; // |det J x' y' / (x y) - 1|
    R g2_drift = 0;
    Complex<R> image_x, image_y;
};

template <std::floating_point R>
AreaReport<R> pentagon_area_check(Complex<R> x, Complex<R> y, Complex<R> alpha, int branch = 0, R h = R(1e-6)) {
    CVec<R> xy{x, y};
    CVec<R> c = friezex_to_c(xy);
    auto fp = x_fixed_points(c, alpha);
    if (fp.size() != 2) throw Error(Errc::BranchDiscontinuity, "fixed points are not simple");
    Point<R> ref = fp[static_cast<std::size_t>(branch)];
    std::function<CVec<R>(const CVec<R>&)> T = [&](const CVec<R>& v) { return friezex_from_c(moduli_map_continued(friezex_to_c(v), alpha, ref).d); };
    CVec<R> im = T(xy);
    CMatrix<R> J = fd_jacobian(T, xy, h);
    Complex<R> dJ = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    AreaReport<R> r;
    r.image_x = im[0];
    r.image_y = im[1];
    r.distortion = std::abs(dJ * x * y / (im[0] * im[1]) - Complex<R>(1));
    r.printed_form = std::abs(dJ * im[0] * im[1] / (x * y) - Complex<R>(1));
    Complex<R> g = pentagon_G2(x, y);
    r.g2_drift = std::abs(pentagon_G2(im[0], im[1]) - g) / std::max(R(1), std::abs(g));
    return r;
}

// nu = K u - 2J v + I w on affine vertices.
template <std::floating_point R> CVec<R> nu_field(const CVec<R>& z) {
    IJK<R> v = ijk_affine(make_closed_affine(z));
    CVec<R> out;
    for (auto& p : z) out.push_back(v.K - R(2) * v.J * p + v.I * p * p);
    return out;
}

template <std::floating_point R> CVec<R> xi_affine(const CVec<R>& z) { return xi_field(make_closed_affine(z)); }

// Lie bracket [X, Y] = DY X - DX Y of holomorphic fields by central differences, relative to its terms.
template <std::floating_point R>
R lie_bracket_residual(const std::function<CVec<R>(const CVec<R>&)>& X, const std::function<CVec<R>(const CVec<R>&)>& Y, const CVec<R>& z, R h = R(1e-5)) {
    CMatrix<R> DX = fd_jacobian(X, z, h), DY = fd_jacobian(Y, z, h);
    CVec<R> x = X(z), y = Y(z);
    CColumn<R> xv(static_cast<long>(x.size())), yv(static_cast<long>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        xv(static_cast<long>(i)) = x[i];
        yv(static_cast<long>(i)) = y[i];
    }
    CColumn<R> a = DY * xv, b = DX * yv;
    R scale = std::max({R(1e-300), a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

} // namespace crd

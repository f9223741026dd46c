#pragma once

#include <optional>

#include <Eigen/Dense>

#include "continuant.hpp"
#include "random.hpp"

namespace crd {

template <std::floating_point R> using CMatrix = Eigen::Matrix<Complex<R>, Eigen::Dynamic, Eigen::Dynamic>;
template <std::floating_point R> using CColumn = Eigen::Matrix<Complex<R>, Eigen::Dynamic, 1>;

// M^{-1} A_lambda(p_n, p_{n+1}) ... A_lambda(p_1, p_2), with M the stored monodromy.
template <std::floating_point R> Matrix2<R> lax_matrix(const TwistedPolygon<R>& P, Complex<R> lambda, const Tolerances<R>& tol = {}) {
    require_nondegenerate(P, tol);
    if (lambda == Complex<R>(0)) throw Error(Errc::ZeroParameter, "lambda = 0");
    Matrix2<R> A = Matrix2<R>::identity();
    for (long i = 0; i < P.n(); ++i) A = loxodromic_matrix(P.vertex(i), P.vertex(i + 1), lambda, tol.deg) * A;
    return P.monodromy.inverse() * A;
}

// tr^2 / det of the Lax matrix, with det = lambda^n / det M taken from the factors rather than
// from the product (the product's determinant cancels catastrophically for large n).
template <std::floating_point R> Complex<R> lax_normalized_trace(const TwistedPolygon<R>& P, Complex<R> lambda, const Tolerances<R>& tol = {}) {
    Matrix2<R> L = lax_matrix(P, lambda, tol);
    Complex<R> tr = L.trace();
    return tr * tr * P.monodromy.det() / std::pow(lambda, static_cast<int>(P.n()));
}

// Product A_lambda(p_n, p_{n+1}) ... A_lambda(p_1, p_2) without the monodromy factor.
template <std::floating_point R> Matrix2<R> edge_product(const TwistedPolygon<R>& P, Complex<R> lambda) {
    Matrix2<R> A = Matrix2<R>::identity();
    for (long i = 0; i < P.n(); ++i) A = loxodromic_matrix(P.vertex(i), P.vertex(i + 1), lambda) * A;
    return A;
}

// G_0..G_{floor(n/2)}, each term a ratio of 2x2 determinants of the homogeneous vertices.
// Closed polygons sum over cyclically sparse index sets, twisted ones over sparse sets of 1..n.
template <std::floating_point R> CVec<R> G_all(const TwistedPolygon<R>& P, const Tolerances<R>& tol = {}) {
    require_nondegenerate(P, tol);
    long n = P.n();
    bool closed = P.is_closed(tol);
    std::vector<Point<R>> p;
    for (long i = 0; i <= n; ++i) p.push_back(P.vertex(i));
    CVec<R> G(static_cast<std::size_t>(n / 2 + 1), Complex<R>(0));
    G[0] = 2;
    for (long k = 1; k <= n / 2; ++k) {
        for (auto& I : SparseSubsets(n, k, closed).all()) {
            Complex<R> num(1), den(1);
            for (long s = 0; s < k; ++s) {
                long is = I[static_cast<std::size_t>(s)] - 1;
                long prev = I[static_cast<std::size_t>((s + k - 1) % k)] - 1;
                num *= det(p[static_cast<std::size_t>(is)], p[static_cast<std::size_t>(prev + 1)]);
                den *= det(p[static_cast<std::size_t>(is)], p[static_cast<std::size_t>(is + 1)]);
            }
            G[static_cast<std::size_t>(k)] += num / den;
        }
    }
    return G;
}

// (sum_k (-1)^k F_k alpha^{-k})^2 / c_[n]
template <std::floating_point R> Complex<R> E_alpha(const CVec<R>& c, Complex<R> alpha) {
    if (alpha == Complex<R>(0)) throw Error(Errc::ZeroParameter, "alpha = 0");
    Complex<R> s = alternating_F_sum(F_all(c), Complex<R>(1) / alpha);
    return s * s / product(c);
}

// prod det(p_{2j-1}, p_{2j}) / prod det(p_{2j}, p_{2j+1})
template <std::floating_point R> Complex<R> alternating_perimeter(const TwistedPolygon<R>& P, const Tolerances<R>& tol = {}) {
    if (P.n() % 2 != 0) throw Error(Errc::OddN, "alternating perimeter needs even n");
    require_nondegenerate(P, tol);
    Complex<R> num(1), den(1);
    for (long j = 0; j < P.n(); j += 2) {
        num *= det(P.vertex(j), P.vertex(j + 1));
        den *= det(P.vertex(j + 1), P.vertex(j + 2));
    }
    return num / den;
}

template <std::floating_point R> Complex<R> c_even_over_odd(const CVec<R>& c) {
    if (c.size() % 2 != 0) throw Error(Errc::OddN, "c_even/c_odd needs even n");
    Complex<R> e(1), o(1);
    for (std::size_t i = 0; i < c.size(); ++i) (i % 2 == 0 ? o : e) *= c[i];
    return e / o;
}

template <std::floating_point R> struct IJK {
    Complex<R> I, J, K;
    Matrix2<R> gauge = Matrix2<R>::identity();  // Moebius map applied before evaluation
};

// Sums over the sides in the affine chart; the polygon must have all vertices finite.
template <std::floating_point R> IJK<R> ijk_affine(const TwistedPolygon<R>& P, R finite_tol = R(1e-8)) {
    IJK<R> out{};
    long n = P.n();
    for (long i = 0; i < n; ++i) {
        Point<R> a = P.vertex(i), b = P.vertex(i + 1);
        if (std::abs(a.den) <= finite_tol || std::abs(b.den) <= finite_tol)
            throw Error(Errc::InfiniteVertexForIJK, "vertex at infinity in the chosen chart");
        Complex<R> p = a.value(), q = b.value(), d = p - q;
        out.I += Complex<R>(1) / d;
        out.J += (p + q) / (Complex<R>(2) * d);
        out.K += p * q / d;
    }
    return out;
}

// I, J, K with an automatic deterministic gauge when a vertex sits at (or near) infinity.
template <std::floating_point R> IJK<R> ijk(const TwistedPolygon<R>& P, std::uint64_t seed = 0, R finite_tol = R(1e-3)) {
    bool finite = true;
    for (auto& v : P.vertices) finite &= std::abs(v.den) > finite_tol;
    if (finite) return ijk_affine(P);
    Rng rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Matrix2<R> Psi = random_matrix<R>(rng, P.field);
        auto Q = apply_moebius(Psi, P);
        bool ok = true;
        for (auto& v : Q.vertices) ok &= std::abs(v.den) > finite_tol;
        if (!ok) continue;
        IJK<R> out = ijk_affine(Q);
        out.gauge = Psi;
        return out;
    }
    throw Error(Errc::InfiniteVertexForIJK, "no finite gauge found");
}

// Eigen-directions of [[-J + n/2, K], [-I, J + n/2]], mapped back through the gauge.
template <std::floating_point R> std::array<Point<R>, 2> axis_from_ijk(const IJK<R>& v, long n, const Tolerances<R>& tol = {}) {
    Complex<R> h(R(n) / 2);
    Matrix2<R> A{-v.J + h, v.K, -v.I, v.J + h};
    // subtract the scalar part so the scalar test is relative to the traceless part
    Matrix2<R> T{-v.J, v.K, -v.I, v.J};
    R scale = std::max(R(1), h.real());
    if (T.max_abs() <= tol.scalar * scale) throw Error(Errc::ScalarAxisMatrix, "axis matrix is scalar");
    Complex<R> disc = std::sqrt(v.J * v.J - v.I * v.K);
    Point<R> e1 = detail::eigenvector(A, h + disc), e2 = detail::eigenvector(A, h - disc);
    Matrix2<R> back = v.gauge.inverse();
    std::array<Point<R>, 2> out{apply(back, e1), apply(back, e2)};
    if (detail::lex_less(out[1], out[0])) std::swap(out[0], out[1]);
    return out;
}

template <std::floating_point R> std::array<Point<R>, 2> axis(const TwistedPolygon<R>& P, const Tolerances<R>& tol = {}) {
    return axis_from_ijk(ijk(P), P.n(), tol);
}

// Distance between unordered point pairs.
template <std::floating_point R> R pair_distance(const std::array<Point<R>, 2>& a, const std::array<Point<R>, 2>& b) {
    R s = std::max(chordal(a[0], b[0]), chordal(a[1], b[1]));
    R t = std::max(chordal(a[0], b[1]), chordal(a[1], b[0]));
    return std::min(s, t);
}

template <std::floating_point R> struct IntegralReport {
    CVec<R> F, G;
    Complex<R> c_prod{1}, alpha{1}, E_alpha{0};
    std::optional<Complex<R>> alt_perimeter;
    std::optional<IJK<R>> ijk;
    std::optional<std::array<Point<R>, 2>> axis;
    bool closed = false;
};

template <std::floating_point R>
IntegralReport<R> integrals(const TwistedPolygon<R>& P, Complex<R> alpha = Complex<R>(-1), const Tolerances<R>& tol = {}) {
    IntegralReport<R> r;
    CVec<R> c = cross_ratios(P, tol);
    r.closed = P.is_closed(tol);
    r.F = F_all(c);
    r.G = G_all(P, tol);
    r.c_prod = product(c);
    r.alpha = alpha;
    r.E_alpha = E_alpha(c, alpha);
    if (P.n() % 2 == 0) r.alt_perimeter = alternating_perimeter(P, tol);
    if (r.closed) {
        r.ijk = ijk(P);
        try {
            r.axis = axis_from_ijk(*r.ijk, P.n(), tol);
        } catch (const Error&) {
        }
    }
    return r;
}

// ---- presymplectic form and the odd-n kernel field ----

template <std::floating_point R> std::vector<Complex<R>> affine_vertices(const TwistedPolygon<R>& P, R finite_tol = R(1e-8)) {
    std::vector<Complex<R>> z;
    for (auto& v : P.vertices) {
        if (std::abs(v.den) <= finite_tol) throw Error(Errc::InfiniteVertex, "vertex at infinity");
        z.push_back(v.value());
    }
    return z;
}

// W with Omega(a, b) = a^T W b for Omega = sum dp_i ^ dp_{i+1} / (p_i - p_{i+1})^2 (cyclic).
template <std::floating_point R> CMatrix<R> presymplectic_matrix(const TwistedPolygon<R>& P) {
    auto z = affine_vertices(P);
    long n = static_cast<long>(z.size());
    CMatrix<R> W = CMatrix<R>::Zero(n, n);
    for (long i = 0; i < n; ++i) {
        long j = (i + 1) % n;
        Complex<R> d = z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
        Complex<R> w = Complex<R>(1) / (d * d);
        W(i, j) += w;
        W(j, i) -= w;
    }
    return W;
}

template <std::floating_point R> Complex<R> presymplectic_eval(const TwistedPolygon<R>& P, const CVec<R>& a, const CVec<R>& b) {
    CMatrix<R> W = presymplectic_matrix(P);
    Complex<R> s(0);
    for (long i = 0; i < W.rows(); ++i)
        for (long j = 0; j < W.cols(); ++j) s += a[static_cast<std::size_t>(i)] * W(i, j) * b[static_cast<std::size_t>(j)];
    return s;
}

// v_i = d_i d_{i+2} ... d_{i+n-1} / (d_{i+1} ... d_{i+n-2}), d_j = p_j - p_{j+1}; solves v_i v_{i+1} = d_i^2.
template <std::floating_point R> CVec<R> xi_field(const TwistedPolygon<R>& P) {
    long n = P.n();
    if (n % 2 == 0) throw Error(Errc::EvenN, "the kernel field needs odd n");
    auto z = affine_vertices(P);
    auto d = [&](long j) {
        long a = ((j % n) + n) % n;
        return z[static_cast<std::size_t>(a)] - z[static_cast<std::size_t>((a + 1) % n)];
    };
    CVec<R> v;
    for (long i = 0; i < n; ++i) {
        Complex<R> s(1);
        for (long k = 0; k <= n - 1; k += 2) s *= d(i + k);
        for (long k = 1; k <= n - 2; k += 2) s /= d(i + k);
        v.push_back(s);
    }
    return v;
}

template <std::floating_point R> long numerical_rank(const CMatrix<R>& A, R rel = R(1e-8)) {
    Eigen::JacobiSVD<CMatrix<R>> svd(A);
    auto s = svd.singularValues();
    if (s.size() == 0 || s(0) == R(0)) return 0;
    long r = 0;
    for (long i = 0; i < s.size(); ++i)
        if (s(i) > rel * s(0)) ++r;
    return r;
}

// Kernel direction of Omega: the xi field for odd n; for even n a null vector when one exists.
template <std::floating_point R> std::optional<CVec<R>> presymplectic_kernel(const TwistedPolygon<R>& P, R rel = R(1e-8)) {
    if (P.n() % 2 == 1) return xi_field(P);
    CMatrix<R> W = presymplectic_matrix(P);
    Eigen::JacobiSVD<CMatrix<R>> svd(W, Eigen::ComputeFullV);
    auto s = svd.singularValues();
    if (s(s.size() - 1) > rel * s(0)) return std::nullopt;
    CColumn<R> v = svd.matrixV().col(s.size() - 1);
    return CVec<R>(v.data(), v.data() + v.size());
}

// The moduli field (1/sqrt c_[n]) sum (c_i c_{i+2} ... c_{i+n-1} - c_{i+1} c_{i+3} ... c_{i+n}) d/dc_i
template <std::floating_point R> CVec<R> xi_moduli(const CVec<R>& c, Complex<R> sqrt_cprod) {
    long n = static_cast<long>(c.size());
    if (n % 2 == 0) throw Error(Errc::EvenN, "the moduli field needs odd n");
    CVec<R> out;
    for (long i = 1; i <= n; ++i) {
        Complex<R> a(1), b(1);
        for (long k = 0; k <= n - 1; k += 2) a *= cidx(c, i + k);
        for (long k = 1; k <= n; k += 2) b *= cidx(c, i + k);
        out.push_back((a - b) / sqrt_cprod);
    }
    return out;
}

template <std::floating_point R> CVec<R> xi_moduli(const CVec<R>& c) { return xi_moduli(c, std::sqrt(product(c))); }

// sqrt(c_[n]) fixed by the polygon: prod (p_i - p_{i+1}) / prod (p_i - p_{i+2}).
template <std::floating_point R> Complex<R> polygon_sqrt_cprod(const TwistedPolygon<R>& P) {
    Complex<R> s(1);
    for (long i = 0; i < P.n(); ++i) s *= det(P.vertex(i), P.vertex(i + 1)) / det(P.vertex(i), P.vertex(i + 2));
    return s;
}

} // namespace crd

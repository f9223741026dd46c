#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "projective.hpp"

namespace crd {

enum class Field { Real, Complex };

inline const char* field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

template <std::floating_point R> using CVec = std::vector<Complex<R>>;

// One period p_1..p_n (stored 0-based) with p_{i+n} = monodromy(p_i).
template <std::floating_point R> struct TwistedPolygon {
    std::vector<Point<R>> vertices;
    Matrix2<R> monodromy = Matrix2<R>::identity();
    Field field = Field::Complex;

    long n() const { return static_cast<long>(vertices.size()); }

    // Vertex at any integer offset, 0-based; the seam goes through the monodromy.
    Point<R> vertex(long i) const {
        long N = n();
        long k = i >= 0 ? i / N : -((-i + N - 1) / N);
        Point<R> p = vertices[static_cast<std::size_t>(i - k * N)];
        if (k > 0)
            for (long s = 0; s < k; ++s) p = apply(monodromy, p);
        else if (k < 0) {
            Matrix2<R> inv = monodromy.adjugate();
            for (long s = 0; s < -k; ++s) p = apply(inv, p);
        }
        return p;
    }

    bool is_closed(const Tolerances<R>& tol = {}) const { return classify(monodromy, tol).kind == MoebiusKind::Identity; }
};

template <std::floating_point R> using Polygon = TwistedPolygon<R>;

template <std::floating_point R> TwistedPolygon<R> make_closed(const std::vector<Point<R>>& v, Field f = Field::Complex) {
    return {v, Matrix2<R>::identity(), f};
}

template <std::floating_point R>
TwistedPolygon<R> make_closed_affine(const CVec<R>& z, Field f = Field::Complex) {
    TwistedPolygon<R> P;
    for (auto& x : z) P.vertices.push_back(Point<R>::affine(x));
    P.field = f;
    return P;
}

// Smallest chordal separation among p_i,p_{i+1} and p_i,p_{i+2}.
template <std::floating_point R> R separation(const TwistedPolygon<R>& P) {
    R best = R(10);
    long N = P.n();
    for (long i = 0; i < N; ++i) {
        Point<R> p = P.vertex(i);
        best = std::min(best, chordal(p, P.vertex(i + 1)));
        best = std::min(best, chordal(p, P.vertex(i + 2)));
    }
    return best;
}

template <std::floating_point R> void require_nondegenerate(const TwistedPolygon<R>& P, const Tolerances<R>& tol = {}) {
    if (P.n() < 3) throw Error(Errc::DegeneratePolygon, "fewer than three vertices");
    if (separation(P) <= tol.deg) throw Error(Errc::DegeneratePolygon, "coincident neighbouring vertices");
}

// c_i = [p_i, p_{i+1}, p_{i-1}, p_{i+2}]
template <std::floating_point R> CVec<R> cross_ratios(const TwistedPolygon<R>& P, const Tolerances<R>& tol = {}) {
    require_nondegenerate(P, tol);
    long N = P.n();
    CVec<R> c(static_cast<std::size_t>(N));
    for (long i = 0; i < N; ++i) c[static_cast<std::size_t>(i)] = cr(P.vertex(i), P.vertex(i + 1), P.vertex(i - 1), P.vertex(i + 2));
    return c;
}

template <std::floating_point R> Matrix2<R> frame_step(Complex<R> ci) { return {Complex<R>(0), ci, Complex<R>(-1), Complex<R>(1)}; }

template <std::floating_point R> Field infer_field(const CVec<R>& v) {
    for (auto& x : v)
        if (x.imag() != R(0)) return Field::Complex;
    return Field::Real;
}

// Polygon with the given cross-ratios in the gauge p_0 = 1, p_1 = inf, p_2 = 0.
template <std::floating_point R> TwistedPolygon<R> reconstruct(const CVec<R>& c, const Tolerances<R>& tol = {}) {
    if (c.size() < 3) throw Error(Errc::DegenerateCoordinates, "need n >= 3");
    for (auto& x : c)
        if (x == Complex<R>(0)) throw Error(Errc::DegenerateCoordinates, "zero cross-ratio");
    TwistedPolygon<R> P;
    P.field = infer_field(c);
    Matrix2<R> F = Matrix2<R>::identity();
    for (std::size_t k = 0; k < c.size(); ++k) {
        P.vertices.push_back(apply(F, Point<R>::infinity()));
        F = F * frame_step<R>(c[k]);
    }
    P.monodromy = F;
    if (separation(P) <= tol.deg) throw Error(Errc::DegenerateCoordinates, "reconstruction has coincident vertices");
    return P;
}

template <std::floating_point R> TwistedPolygon<R> apply_moebius(const Matrix2<R>& Psi, const TwistedPolygon<R>& P) {
    require_nonsingular(Psi);
    TwistedPolygon<R> Q;
    Q.field = P.field;
    for (auto& p : P.vertices) Q.vertices.push_back(apply(Psi, p));
    // scalar monodromies commute with everything; keep them exact instead of accumulating rounding
    const Matrix2<R>& M = P.monodromy;
    bool scalar = M.b == Complex<R>(0) && M.c == Complex<R>(0) && M.a == M.d;
    Q.monodromy = scalar ? M : Psi * M * Psi.inverse();
    return Q;
}

template <std::floating_point R> TwistedPolygon<R> index_shift(const TwistedPolygon<R>& P, long k) {
    TwistedPolygon<R> Q;
    Q.field = P.field;
    Q.monodromy = P.monodromy;
    for (long i = 0; i < P.n(); ++i) Q.vertices.push_back(P.vertex(i + k));
    return Q;
}

// Coordinate charts: C (cross-ratios), X, U (auxiliary), A (second frieze row), FriezeX (diagonal frieze).
enum class Chart { C, X, U, A, FriezeX };

inline const char* chart_name(Chart c) {
    switch (c) {
    case Chart::C: return "C";
    case Chart::X: return "X";
    case Chart::U: return "U";
    case Chart::A: return "A";
    case Chart::FriezeX: return "FriezeX";
    }
    return "?";
}

template <std::floating_point R> struct CoordVector {
    Chart chart = Chart::C;
    CVec<R> values;
    // n of the underlying polygon
    std::size_t n() const { return chart == Chart::FriezeX ? values.size() + 3 : values.size(); }
};

namespace detail {

template <std::floating_point R> void check_chart(const CoordVector<R>& v) {
    for (auto& z : v.values) {
        bool bad = false;
        switch (v.chart) {
        case Chart::C: bad = z == Complex<R>(0); break;
        case Chart::X: bad = z == Complex<R>(0) || z == Complex<R>(1); break;
        case Chart::U: bad = z == Complex<R>(0) || z == Complex<R>(-1); break;
        case Chart::A: bad = z == Complex<R>(0); break;
        case Chart::FriezeX: bad = z == Complex<R>(0); break;
        }
        if (bad) throw Error(Errc::ChartDomainViolation, std::string("value outside chart ") + chart_name(v.chart));
    }
}

template <std::floating_point R> const Complex<R>& cyc(const CVec<R>& v, long i) {
    long n = static_cast<long>(v.size());
    return v[static_cast<std::size_t>(((i % n) + n) % n)];
}

template <std::floating_point R> CVec<R> c_to_a(const CVec<R>& c) {
    long n = static_cast<long>(c.size());
    if (n % 2 == 0) throw Error(Errc::EvenNForAChart, "a-coordinates need odd n");
    Complex<R> prod(1);
    for (auto& x : c) prod *= x;
    Complex<R> root = std::sqrt(prod);
    CVec<R> a(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        Complex<R> s(1);
        for (long k = 1; k <= n - 2; k += 2) s *= cyc(c, i + k);
        a[static_cast<std::size_t>(i)] = s / root;
    }
    return a;
}

template <std::floating_point R> CVec<R> a_to_c(const CVec<R>& a) {
    long n = static_cast<long>(a.size());
    CVec<R> c(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = Complex<R>(1) / (cyc(a, i) * cyc(a, i + 1));
    return c;
}

// extended diagonal coordinates x_{-1}..x_{n-1}
template <std::floating_point R> CVec<R> frieze_extended(const CVec<R>& x) {
    CVec<R> e;
    e.push_back(0);
    e.push_back(1);
    for (auto& v : x) e.push_back(v);
    e.push_back(1);
    e.push_back(0);
    return e;
}

template <std::floating_point R> CVec<R> friezex_to_a(const CVec<R>& x) {
    long n = static_cast<long>(x.size()) + 3;
    CVec<R> e = frieze_extended(x);
    auto X = [&](long k) { return e[static_cast<std::size_t>(k + 1)]; };
    CVec<R> a(static_cast<std::size_t>(n));
    for (long i = 1; i <= n - 1; ++i) a[static_cast<std::size_t>(i - 1)] = (X(i - 2) + X(i)) / X(i - 1);
    Complex<R> s(0);
    for (long k = 0; k <= n - 3; ++k) s += Complex<R>(1) / (X(k) * X(k + 1));
    a[static_cast<std::size_t>(n - 1)] = s;
    return a;
}

// u_i = x_{i-2}/x_i, i = 2..n-2
template <std::floating_point R> CVec<R> friezex_to_u(const CVec<R>& x) {
    long n = static_cast<long>(x.size()) + 3;
    CVec<R> e = frieze_extended(x);
    auto X = [&](long k) { return e[static_cast<std::size_t>(k + 1)]; };
    CVec<R> u;
    for (long i = 2; i <= n - 2; ++i) u.push_back(X(i - 2) / X(i));
    return u;
}

} // namespace detail

// Conversions between charts. U produced from FriezeX is the (n-3)-vector u_2..u_{n-2}.
template <std::floating_point R> CoordVector<R> chart_convert(const CoordVector<R>& v, Chart target) {
    detail::check_chart(v);
    if (v.chart == target) return v;
    CoordVector<R> out;
    out.chart = target;
    auto fail = [&] {
        throw Error(Errc::ChartDomainViolation,
                    std::string("no conversion ") + chart_name(v.chart) + " -> " + chart_name(target));
    };
    switch (v.chart) {
    case Chart::C:
        if (target == Chart::A) out.values = detail::c_to_a(v.values);
        else fail();
        break;
    case Chart::A:
        if (target == Chart::C) out.values = detail::a_to_c(v.values);
        else fail();
        break;
    case Chart::X:
        if (target != Chart::U) fail();
        for (auto& x : v.values) out.values.push_back(Complex<R>(1) / x - Complex<R>(1));
        break;
    case Chart::U:
        if (target != Chart::X) fail();
        for (auto& u : v.values) out.values.push_back(Complex<R>(1) / (Complex<R>(1) + u));
        break;
    case Chart::FriezeX:
        if (target == Chart::A) out.values = detail::friezex_to_a(v.values);
        else if (target == Chart::C) out.values = detail::a_to_c(detail::friezex_to_a(v.values));
        else if (target == Chart::U) out.values = detail::friezex_to_u(v.values);
        else fail();
        break;
    }
    return out;
}

template <std::floating_point R> using Vec2 = std::array<Complex<R>, 2>;

template <std::floating_point R> Complex<R> det(const Vec2<R>& v, const Vec2<R>& w) { return v[0] * w[1] - v[1] * w[0]; }

// Lift of a closed odd-gon: [V_i, V_{i+1}] = 1, V_{i+n} = -V_i.
template <std::floating_point R> std::vector<Vec2<R>> lift_to_vectors(const TwistedPolygon<R>& P, const Tolerances<R>& tol = {}) {
    long n = P.n();
    if (n % 2 == 0) throw Error(Errc::EvenN, "normalized lifts need odd n");
    if (!P.is_closed(tol)) throw Error(Errc::DegeneratePolygon, "lift needs a closed polygon");
    require_nondegenerate(P, tol);
    std::vector<Vec2<R>> W;
    for (auto& p : P.vertices) W.push_back({p.num, p.den});
    // scales t_i with t_i t_{i+1} [W_i, W_{i+1}] = 1, t_{n+1} = -t_1
    std::vector<Complex<R>> t(static_cast<std::size_t>(n + 1));
    t[0] = 1;
    for (long i = 0; i < n; ++i) {
        const Vec2<R>& nxt = W[static_cast<std::size_t>((i + 1) % n)];
        t[static_cast<std::size_t>(i + 1)] = Complex<R>(1) / (det(W[static_cast<std::size_t>(i)], nxt) * t[static_cast<std::size_t>(i)]);
    }
    // t_{n+1} scales as 1/t_1 for odd n
    Complex<R> t1 = std::sqrt(-t[static_cast<std::size_t>(n)]);
    std::vector<Vec2<R>> V;
    Complex<R> ti = t1;
    for (long i = 0; i < n; ++i) {
        const Vec2<R>& w = W[static_cast<std::size_t>(i)];
        V.push_back({ti * w[0], ti * w[1]});
        const Vec2<R>& nxt = W[static_cast<std::size_t>((i + 1) % n)];
        ti = Complex<R>(1) / (det(w, nxt) * ti);
    }
    return V;
}

// V_i extended antiperiodically; i is 0-based.
template <std::floating_point R> Vec2<R> lifted(const std::vector<Vec2<R>>& V, long i) {
    long n = static_cast<long>(V.size());
    long k = i >= 0 ? i / n : -((-i + n - 1) / n);
    Vec2<R> v = V[static_cast<std::size_t>(i - k * n)];
    if (k % 2 != 0) v = {-v[0], -v[1]};
    return v;
}

template <std::floating_point R> Complex<R> frieze_entry(const std::vector<Vec2<R>>& V, long i, long j) {
    return det(lifted(V, i), lifted(V, j));
}

} // namespace crd

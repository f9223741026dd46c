#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <ostream>
#include <vector>

#include "error.hpp"

namespace crd {

template <std::floating_point R> using Complex = std::complex<R>;

// Default tolerances; every operation that needs one accepts an override.
template <std::floating_point R = double> struct Tolerances {
    R deg = R(1e-10);    // chordal separation of points
    R cls = R(1e-9);     // |tr^2/det - 4| for parabolic detection
    R scalar = R(1e-9);  // relative off-diagonal size for scalar matrices
    R rel = R(1e-9);     // relation residuals
};

// Point of P^1 as a homogeneous pair num/den, infinity = (1, 0).
// The component of larger modulus is always exactly 1.
template <std::floating_point R> struct ProjectivePoint {
    Complex<R> num{1}, den{0};

    ProjectivePoint() = default;

    static ProjectivePoint from(Complex<R> num, Complex<R> den) {
        R an = std::abs(num), ad = std::abs(den);
        if (!(an > 0) && !(ad > 0)) throw Error(Errc::DegenerateQuadruple, "zero homogeneous pair");
        if (!std::isfinite(an) || !std::isfinite(ad)) throw Error(Errc::DegenerateCoordinates, "non-finite homogeneous pair");
        ProjectivePoint p;
        if (an >= ad) {
            p.den = den / num;
            p.num = 1;
        } else {
            p.num = num / den;
            p.den = 1;
        }
        return p;
    }
    static ProjectivePoint affine(Complex<R> z) { return from(z, Complex<R>(1)); }
    static ProjectivePoint infinity() { return ProjectivePoint(); }

    bool is_infinite(R tol = R(0)) const { return std::abs(den) <= tol; }
    Complex<R> value() const { return num / den; }
    R norm() const { return std::hypot(std::abs(num), std::abs(den)); }

    friend std::ostream& operator<<(std::ostream& os, const ProjectivePoint& p) {
        if (p.den == Complex<R>(0)) return os << "inf";
        return os << p.value();
    }
};

template <std::floating_point R> using Point = ProjectivePoint<R>;

// [p, q] = num_p den_q - num_q den_p
template <std::floating_point R> Complex<R> det(const Point<R>& p, const Point<R>& q) {
    return p.num * q.den - q.num * p.den;
}

template <std::floating_point R> R chordal(const Point<R>& p, const Point<R>& q) {
    return std::abs(det(p, q)) / (p.norm() * q.norm());
}

// Cross-ratio [z1,z2,z3,z4] = (z1-z3)(z2-z4)/((z1-z4)(z2-z3)) as a point of P^1.
template <std::floating_point R>
Point<R> cross_ratio(const Point<R>& z1, const Point<R>& z2, const Point<R>& z3, const Point<R>& z4,
                     R tol = R(1e-10)) {
    Complex<R> num = det(z1, z3) * det(z2, z4);
    Complex<R> den = det(z1, z4) * det(z2, z3);
    R scale = z1.norm() * z2.norm() * z3.norm() * z4.norm();
    if (std::abs(num) <= tol * scale && std::abs(den) <= tol * scale)
        throw Error(Errc::DegenerateQuadruple, "three or more coincident points");
    return Point<R>::from(num, den);
}

// Finite cross-ratio value; throws when the value is infinite.
template <std::floating_point R>
Complex<R> cr(const Point<R>& z1, const Point<R>& z2, const Point<R>& z3, const Point<R>& z4) {
    Complex<R> num = det(z1, z3) * det(z2, z4);
    Complex<R> den = det(z1, z4) * det(z2, z3);
    if (den == Complex<R>(0)) {
        if (num == Complex<R>(0)) throw Error(Errc::DegenerateQuadruple, "three or more coincident points");
        throw Error(Errc::InfiniteCrossRatio, "cross-ratio is infinite");
    }
    return num / den;
}

// Row-major 2x2 matrix over C.
template <std::floating_point R> struct Matrix2 {
    Complex<R> a{1}, b{0}, c{0}, d{1};

    static Matrix2 identity() { return {}; }
    static Matrix2 scalar(Complex<R> s) { return {s, 0, 0, s}; }

    Complex<R> det() const { return a * d - b * c; }
    Complex<R> trace() const { return a + d; }
    Matrix2 adjugate() const { return {d, -b, -c, a}; }
    Matrix2 inverse() const {
        Complex<R> D = det();
        if (D == Complex<R>(0)) throw Error(Errc::SingularMatrix, "inverse of singular matrix");
        return {d / D, -b / D, -c / D, a / D};
    }
    R norm() const { return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d)); }
    R max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }

    friend Matrix2 operator*(const Matrix2& A, const Matrix2& B) {
        return {A.a * B.a + A.b * B.c, A.a * B.b + A.b * B.d, A.c * B.a + A.d * B.c, A.c * B.b + A.d * B.d};
    }
    friend Matrix2 operator*(Complex<R> s, const Matrix2& A) { return {s * A.a, s * A.b, s * A.c, s * A.d}; }
    friend Matrix2 operator+(const Matrix2& A, const Matrix2& B) { return {A.a + B.a, A.b + B.b, A.c + B.c, A.d + B.d}; }
    friend Matrix2 operator-(const Matrix2& A, const Matrix2& B) { return {A.a - B.a, A.b - B.b, A.c - B.c, A.d - B.d}; }

    friend std::ostream& operator<<(std::ostream& os, const Matrix2& M) {
        return os << "[[" << M.a << ", " << M.b << "], [" << M.c << ", " << M.d << "]]";
    }
};

template <std::floating_point R> R max_abs_diff(const Matrix2<R>& A, const Matrix2<R>& B) { return (A - B).max_abs(); }

template <std::floating_point R> void require_nonsingular(const Matrix2<R>& M, R tol = R(1e-14)) {
    R n = M.max_abs();
    if (!(n > 0) || std::abs(M.det()) <= tol * n * n) throw Error(Errc::SingularMatrix, "determinant vanishes");
}

template <std::floating_point R> Point<R> apply(const Matrix2<R>& M, const Point<R>& z) {
    return Point<R>::from(M.a * z.num + M.b * z.den, M.c * z.num + M.d * z.den);
}

template <std::floating_point R> Matrix2<R> compose(const Matrix2<R>& M, const Matrix2<R>& N) { return M * N; }

template <std::floating_point R> Complex<R> normalized_trace(const Matrix2<R>& M) {
    require_nonsingular(M);
    Complex<R> t = M.trace();
    return t * t / M.det();
}

// A_lambda(p,q): fixes p with eigenvalue 1 and q with eigenvalue lambda; det = lambda.
template <std::floating_point R>
Matrix2<R> loxodromic_matrix(const Point<R>& p, const Point<R>& q, Complex<R> lambda, R tol = R(1e-10)) {
    if (lambda == Complex<R>(0)) throw Error(Errc::ZeroParameter, "lambda = 0");
    if (chordal(p, q) <= tol) throw Error(Errc::CoincidentAxisPoints, "p = q");
    // V diag(1, lambda) V^-1 with V = [p q] as columns
    Complex<R> D = det(p, q);
    return {(p.num * q.den - lambda * q.num * p.den) / D, p.num * q.num * (lambda - Complex<R>(1)) / D,
            p.den * q.den * (Complex<R>(1) - lambda) / D, (lambda * p.num * q.den - q.num * p.den) / D};
}

enum class MoebiusKind { Identity, Parabolic, Loxodromic };

inline const char* kind_name(MoebiusKind k) {
    switch (k) {
    case MoebiusKind::Identity: return "Identity";
    case MoebiusKind::Parabolic: return "Parabolic";
    case MoebiusKind::Loxodromic: return "Loxodromic";
    }
    return "?";
}

template <std::floating_point R> struct MoebiusClass {
    MoebiusKind kind = MoebiusKind::Identity;
    std::vector<Point<R>> fixed_points;   // larger-modulus eigenvalue first
    std::vector<Complex<R>> eigenvalues;  // matching fixed_points
    Complex<R> eigenvalue_ratio{1};
};

namespace detail {

template <std::floating_point R> Point<R> eigenvector(const Matrix2<R>& M, Complex<R> mu) {
    Complex<R> v1n = M.b, v1d = mu - M.a;
    Complex<R> v2n = mu - M.d, v2d = M.c;
    if (std::norm(v1n) + std::norm(v1d) >= std::norm(v2n) + std::norm(v2d)) return Point<R>::from(v1n, v1d);
    return Point<R>::from(v2n, v2d);
}

template <std::floating_point R> bool lex_less(const Point<R>& p, const Point<R>& q) {
    const R a[4] = {p.num.real(), p.num.imag(), p.den.real(), p.den.imag()};
    const R b[4] = {q.num.real(), q.num.imag(), q.den.real(), q.den.imag()};
    return std::lexicographical_compare(a, a + 4, b, b + 4);
}

} // namespace detail

template <std::floating_point R> MoebiusClass<R> classify(const Matrix2<R>& M, const Tolerances<R>& tol = {}) {
    require_nonsingular(M);
    MoebiusClass<R> out;
    R n = M.norm();
    Complex<R> tr = M.trace(), dt = M.det();
    R off = std::max({std::abs(M.b), std::abs(M.c), std::abs(M.a - M.d)}) / n;
    if (off <= tol.scalar) {
        out.kind = MoebiusKind::Identity;
        return out;
    }
    Complex<R> nt = tr * tr / dt;
    if (std::abs(nt - Complex<R>(4)) <= tol.cls) {
        out.kind = MoebiusKind::Parabolic;
        Complex<R> mu = tr / Complex<R>(2);
        out.fixed_points = {detail::eigenvector(M, mu)};
        out.eigenvalues = {mu};
        return out;
    }
    out.kind = MoebiusKind::Loxodromic;
    Complex<R> disc = std::sqrt(tr * tr - Complex<R>(4) * dt);
    Complex<R> l1 = std::abs(tr + disc) >= std::abs(tr - disc) ? (tr + disc) / Complex<R>(2) : (tr - disc) / Complex<R>(2);
    Complex<R> l2 = dt / l1;
    Point<R> f1 = detail::eigenvector(M, l1), f2 = detail::eigenvector(M, l2);
    R m1 = std::abs(l1), m2 = std::abs(l2);
    bool tie = std::abs(m1 - m2) <= R(1e-12) * std::max(m1, m2);
    bool swap = tie ? detail::lex_less(f2, f1) : (m2 > m1);
    if (swap) {
        std::swap(l1, l2);
        std::swap(f1, f2);
    }
    out.fixed_points = {f1, f2};
    out.eigenvalues = {l1, l2};
    out.eigenvalue_ratio = l1 / l2;
    return out;
}

// chi with tanh^2(chi/2) = [r,s,u,v]; principal branches.
template <std::floating_point R>
Complex<R> complex_distance(const Point<R>& u, const Point<R>& v, const Point<R>& r, const Point<R>& s,
                            R tol = R(1e-10)) {
    const Point<R>* pts[4] = {&u, &v, &r, &s};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (chordal(*pts[i], *pts[j]) <= tol) throw Error(Errc::DegenerateQuadruple, "points not distinct");
    Complex<R> x = cr(r, s, u, v);
    return Complex<R>(2) * std::atanh(std::sqrt(x));
}

} // namespace crd

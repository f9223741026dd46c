#pragma once

#include <algorithm>
#include <numbers>
#include <random>

#include "polygon.hpp"

namespace crd {

using Rng = std::mt19937_64;

// Seed for worker w derived from a master seed (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t w) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (w + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

template <std::floating_point R = double> Complex<R> random_scalar(Rng& rng, Field f, R scale = R(1)) {
    std::normal_distribution<R> g(0, scale);
    R re = g(rng);
    return f == Field::Real ? Complex<R>(re, 0) : Complex<R>(re, g(rng));
}

// Unit-scale point away from infinity with probability 1.
template <std::floating_point R = double> Point<R> random_point(Rng& rng, Field f) {
    return Point<R>::affine(random_scalar<R>(rng, f));
}

template <std::floating_point R = double> Matrix2<R> random_matrix(Rng& rng, Field f) {
    for (;;) {
        Matrix2<R> M{random_scalar<R>(rng, f), random_scalar<R>(rng, f), random_scalar<R>(rng, f), random_scalar<R>(rng, f)};
        if (std::abs(M.det()) > R(0.1)) return M;
    }
}

// Random polygon with well separated vertices; twisted ones get a random monodromy.
template <std::floating_point R = double>
TwistedPolygon<R> random_polygon(Rng& rng, long n, Field f, bool closed, R min_sep = R(0.05)) {
    for (;;) {
        TwistedPolygon<R> P;
        P.field = f;
        for (long i = 0; i < n; ++i) P.vertices.push_back(random_point<R>(rng, f));
        if (!closed) P.monodromy = random_matrix<R>(rng, f);
        if (separation(P) > min_sep) return P;
    }
}

// Real ideal polygon: vertices in cyclic order on the boundary circle (convex in the disk).
// Twisted ones get a real monodromy near the identity so the order continues across the seam.
template <std::floating_point R = double>
TwistedPolygon<R> random_ideal_polygon(Rng& rng, long n, bool closed, R min_sep = R(0.05)) {
    std::uniform_real_distribution<R> angle(0, 2 * std::numbers::pi_v<R>), eps(R(-0.3), R(0.3));
    for (;;) {
        std::vector<R> th(static_cast<std::size_t>(n));
        for (auto& t : th) t = angle(rng);
        std::sort(th.begin(), th.end());
        TwistedPolygon<R> P;
        P.field = Field::Real;
        for (R t : th) P.vertices.push_back(Point<R>::from(Complex<R>(std::sin(t / 2)), Complex<R>(std::cos(t / 2))));
        if (!closed)
            P.monodromy = Matrix2<R>{Complex<R>(1 + eps(rng)), Complex<R>(eps(rng)), Complex<R>(eps(rng)), Complex<R>(1 + eps(rng))};
        if (separation(P) > min_sep) return P;
    }
}

template <std::floating_point R = double> CVec<R> random_c(Rng& rng, long n, Field f) {
    CVec<R> c;
    for (long i = 0; i < n; ++i) {
        Complex<R> z;
        do z = random_scalar<R>(rng, f); while (std::abs(z) < R(0.1));
        c.push_back(z);
    }
    return c;
}

} // namespace crd

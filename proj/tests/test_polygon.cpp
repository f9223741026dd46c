#include <gtest/gtest.h>

#include <numbers>

#include "crd/continuant.hpp"
#include "crd/polygon.hpp"
#include "crd/random.hpp"

using namespace crd;
using C = Complex<double>;
using V = CVec<double>;
using Poly = TwistedPolygon<double>;

namespace {

const C I(0, 1);

Poly regular(long n) {
    V z;
    for (long j = 0; j < n; ++j) z.push_back(std::tan(std::numbers::pi * j / n));
    return make_closed_affine<double>(z, Field::Real);
}

double vdiff(const V& a, const V& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(CrossRatios, RegularPentagon) {
    V c = cross_ratios(regular(5));
    for (auto& x : c) EXPECT_LT(std::abs(x - (3 - std::sqrt(5.0)) / 2), 1e-14);
}

TEST(CrossRatios, OctahedronHexagon) {
    Poly P;
    for (C z : {C(0), C(1), I}) P.vertices.push_back(Point<double>::affine(z));
    P.vertices.push_back(Point<double>::infinity());
    for (C z : {C(-1), -I}) P.vertices.push_back(Point<double>::affine(z));
    V c = cross_ratios(P);
    for (int i = 0; i < 6; ++i) EXPECT_LT(std::abs(c[i] - (i % 2 == 0 ? I : -I)), 1e-15) << i;
}

TEST(CrossRatios, MoebiusInvariantAcrossSeam) {
    Rng rng(20);
    for (Field f : {Field::Real, Field::Complex})
        for (long n = 3; n <= 12; ++n) {
            Poly P = random_polygon<double>(rng, n, f, false);
            Matrix2<double> Psi = random_matrix<double>(rng, f);
            V a = cross_ratios(P), b = cross_ratios(apply_moebius(Psi, P));
            EXPECT_LT(vdiff(a, b), 1e-9 * (1 + max_abs(a)));
            Poly Q = apply_moebius(Psi, P);
            EXPECT_LT(std::abs(normalized_trace(Q.monodromy) - normalized_trace(P.monodromy)), 1e-9 * std::abs(normalized_trace(P.monodromy)));
        }
}

TEST(CrossRatios, Degenerate) {
    Poly P = make_closed_affine<double>(V{C(0), C(1), C(1), C(2)});
    EXPECT_THROW(cross_ratios(P), Error);
    Poly Q = make_closed_affine<double>(V{C(0), C(1), C(0), C(2)});
    EXPECT_THROW(cross_ratios(Q), Error);
}

TEST(Reconstruct, RoundTripAndGauge) {
    Rng rng(21);
    for (Field f : {Field::Real, Field::Complex})
        for (long n = 3; n <= 12; ++n) {
            V c = random_c<double>(rng, n, f);
            Poly P = reconstruct(c);
            EXPECT_EQ(P.field, f);
            EXPECT_TRUE(P.vertices[0].is_infinite());
            EXPECT_LT(std::abs(P.vertices[1].num), 1e-16);
            EXPECT_LT(chordal(P.vertex(-1), Point<double>::affine(1)), 1e-10);
            EXPECT_LT(max_abs_diff(P.monodromy, monodromy_from_c(c)), 1e-13 * P.monodromy.max_abs());
            EXPECT_LT(vdiff(cross_ratios(P), c), 1e-10 * (1 + max_abs(c)));
        }
    EXPECT_THROW(reconstruct(V{C(1), C(0), C(2)}), Error);
}

TEST(Reconstruct, ClosedPolygonsGiveScalarMonodromy) {
    Rng rng(22);
    for (long n = 4; n <= 12; ++n) {
        Poly P = random_polygon<double>(rng, n, Field::Complex, true);
        V c = cross_ratios(P);
        EXPECT_LT(max_abs(closure_residuals(c)), 1e-9);
        EXPECT_EQ(classify(reconstruct(c).monodromy).kind, MoebiusKind::Identity);
        // cross-ratios of a reconstruction match the input up to a Moebius map
        EXPECT_LT(vdiff(cross_ratios(reconstruct(c)), c), 1e-9);
    }
    V pent(5, C((3 - std::sqrt(5.0)) / 2));
    Poly R = reconstruct(pent);
    EXPECT_TRUE(R.is_closed());
    EXPECT_LT(vdiff(cross_ratios(R), cross_ratios(regular(5))), 1e-12);
}

TEST(IndexShift, CyclesCrossRatios) {
    Rng rng(23);
    Poly P = random_polygon<double>(rng, 7, Field::Complex, false);
    V c = cross_ratios(P);
    for (long k : {1L, 3L, -2L, 7L}) {
        Poly Q = index_shift(P, k);
        V d = cross_ratios(Q);
        for (long i = 0; i < 7; ++i) EXPECT_LT(std::abs(d[i] - c[((i + k) % 7 + 7) % 7]), 1e-9);
    }
    Poly S = index_shift(P, 7);
    for (long i = 0; i < 7; ++i) EXPECT_LT(chordal(S.vertices[i], apply(P.monodromy, P.vertices[i])), 1e-12);
    Poly Cl = random_polygon<double>(rng, 6, Field::Real, true);
    Poly T = index_shift(Cl, 6);
    for (long i = 0; i < 6; ++i) EXPECT_LT(chordal(T.vertices[i], Cl.vertices[i]), 1e-15);
}

TEST(Charts, ConstantAIsConstantC) {
    CoordVector<double> a{Chart::A, V(5, C(1))};
    auto c = chart_convert(a, Chart::C);
    for (auto& x : c.values) EXPECT_LT(std::abs(x - C(1)), 1e-15);
    auto back = chart_convert(c, Chart::A);
    // a is determined by c up to a global sign
    double s = std::abs(back.values[0] - C(1)) < 1e-12 ? 1 : -1;
    for (auto& x : back.values) EXPECT_LT(std::abs(x - s), 1e-14);
}

TEST(Charts, AToCRoundTripOddOnly) {
    Rng rng(24);
    for (long n : {3L, 5L, 7L, 9L}) {
        V c = random_c<double>(rng, n, Field::Complex);
        auto a = chart_convert(CoordVector<double>{Chart::C, c}, Chart::A);
        auto c2 = chart_convert(a, Chart::C);
        EXPECT_LT(vdiff(c, c2.values), 1e-12 * (1 + max_abs(c)));
    }
    try {
        chart_convert(CoordVector<double>{Chart::C, V(6, C(0.5))}, Chart::A);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EvenNForAChart);
    }
}

TEST(Charts, XUAndDomain) {
    V x{C(0.3, 0.1), C(2.0, -1.0), C(-0.5, 0.2)};
    auto u = chart_convert(CoordVector<double>{Chart::X, x}, Chart::U);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(std::abs(u.values[i] - (1.0 / x[i] - 1.0)), 1e-15);
    auto x2 = chart_convert(u, Chart::X);
    EXPECT_LT(vdiff(x, x2.values), 1e-14);
    EXPECT_THROW(chart_convert(CoordVector<double>{Chart::X, V{C(1)}}, Chart::U), Error);
    EXPECT_THROW(chart_convert(CoordVector<double>{Chart::U, V{C(-1)}}, Chart::X), Error);
    EXPECT_THROW(chart_convert(CoordVector<double>{Chart::C, V{C(0), C(1), C(1)}}, Chart::A), Error);
}

TEST(Charts, WidthTwoFrieze) {
    C x1(1.3, 0.2), x2(0.7, -0.4);
    auto a = chart_convert(CoordVector<double>{Chart::FriezeX, V{x1, x2}}, Chart::A);
    V expect{x1, (x2 + 1.0) / x1, (x1 + 1.0) / x2, x2, (x1 + x2 + 1.0) / (x1 * x2)};
    EXPECT_LT(vdiff(a.values, expect), 1e-14);
    auto c = chart_convert(CoordVector<double>{Chart::FriezeX, V{x1, x2}}, Chart::C);
    EXPECT_LT(max_abs(closure_residuals(c.values)), 1e-12);
}

TEST(Charts, FriezeXToU) {
    Rng rng(25);
    for (long n : {5L, 7L, 9L}) {
        V x = random_c<double>(rng, n - 3, Field::Complex);
        auto u = chart_convert(CoordVector<double>{Chart::FriezeX, x}, Chart::U);
        ASSERT_EQ(static_cast<long>(u.values.size()), n - 3);
        V ext{C(0), C(1)};
        ext.insert(ext.end(), x.begin(), x.end());
        ext.push_back(1);
        for (long i = 2; i <= n - 2; ++i) EXPECT_LT(std::abs(u.values[i - 2] - ext[i - 1] / ext[i + 1]), 1e-14);
        EXPECT_LT(max_abs(closure_residuals(chart_convert(CoordVector<double>{Chart::FriezeX, x}, Chart::C).values)), 1e-10);
    }
}

TEST(Lift, NormalizationDiamondsGlide) {
    Rng rng(26);
    for (long n : {3L, 5L, 7L, 9L, 11L})
        for (Field f : {Field::Real, Field::Complex}) {
            Poly P = random_polygon<double>(rng, n, f, true);
            auto Vv = lift_to_vectors(P);
            for (long i = 0; i < 2 * n; ++i) EXPECT_LT(std::abs(frieze_entry(Vv, i, i + 1) - C(1)), 1e-10);
            for (long i = 0; i < n; ++i)
                for (long j = i + 1; j < i + n; ++j) {
                    C E = frieze_entry(Vv, i, j), W = frieze_entry(Vv, i + 1, j + 1);
                    C N = frieze_entry(Vv, i, j + 1), S = frieze_entry(Vv, i + 1, j);
                    EXPECT_LT(std::abs(E * W - N * S - C(1)), 1e-8 * (1 + std::abs(E * W)));
                    EXPECT_LT(std::abs(frieze_entry(Vv, i, j) - frieze_entry(Vv, j, i + n)), 1e-10 * (1 + std::abs(E)));
                }
            // second row matches the a-chart
            V a;
            for (long i = 0; i < n; ++i) a.push_back(frieze_entry(Vv, i - 1, i + 1));
            auto c = chart_convert(CoordVector<double>{Chart::A, a}, Chart::C);
            EXPECT_LT(vdiff(c.values, cross_ratios(P)), 1e-9);
        }
    EXPECT_THROW(lift_to_vectors(random_polygon<double>(rng, 6, Field::Real, true)), Error);
}

TEST(Lift, RegularPentagonGolden) {
    auto Vv = lift_to_vectors(regular(5));
    double phi = (1 + std::sqrt(5.0)) / 2;
    for (long i = 0; i < 5; ++i) EXPECT_LT(std::abs(std::abs(frieze_entry(Vv, i - 1, i + 1)) - phi), 1e-12);
}

TEST(Lift, MonodromyFromA) {
    Rng rng(27);
    for (long n : {5L, 7L, 9L}) {
        V a = random_c<double>(rng, n, Field::Complex);
        V c = chart_convert(CoordVector<double>{Chart::A, a}, Chart::C).values;
        Matrix2<double> Ma = Matrix2<double>::identity();
        for (auto& ai : a) Ma = Ma * Matrix2<double>{C(0), C(-1), C(1), ai};
        C ta = normalized_trace(Ma), tc = normalized_trace(monodromy_from_c(c));
        EXPECT_LT(std::abs(ta - tc), 1e-10 * std::abs(ta));
    }
}

#include <gtest/gtest.h>

#include "crd/poisson.hpp"
#include "crd/random.hpp"

using namespace crd;
using C = Complex<double>;
using V = CVec<double>;
using Spec = BracketSpec<double>;

namespace {

V closed_c(Rng& rng, long n, Field f) {
    return cross_ratios(random_polygon<double>(rng, n, f, true, 0.1));
}

// unit-scale coordinates away from the chart's excluded values
V chart_point(Rng& rng, long n, BracketKind k) {
    V z;
    std::uniform_real_distribution<double> u(0.2, 0.8), w(0.5, 2.0);
    for (long i = 0; i < n; ++i) {
        if (k == BracketKind::X) z.push_back(C(u(rng), 0.1 * u(rng)));
        else z.push_back(C(w(rng), 0.2 * u(rng)));
    }
    return z;
}

std::vector<Spec> all_specs() {
    return {bracket_c1<double>(), bracket_c2<double>(), bracket_cpencil<double>(C(0.7, 0.2)), bracket_closed<double>(),
            bracket_alpha_form<double>(C(-1.5)), bracket_x<double>(), bracket_u<double>(), bracket_u2<double>(), bracket_cluster<double>()};
}

} // namespace

TEST(Bracket, BaseValues) {
    V c{C(2), C(3), C(5), C(7), C(11), C(13)};
    auto P1 = structure_matrix(bracket_c1<double>(), c);
    auto P2 = structure_matrix(bracket_c2<double>(), c);
    EXPECT_EQ(P1(0, 1), C(6));
    EXPECT_EQ(P1(1, 0), C(-6));
    EXPECT_EQ(P1(5, 0), C(26));
    EXPECT_EQ(P1(0, 2), C(0));
    EXPECT_EQ(P1(0, 3), C(0));
    EXPECT_EQ(P2(0, 1), C(6 * 5));
    EXPECT_EQ(P2(0, 2), C(30));
    EXPECT_EQ(P2(0, 3), C(0));
    C alpha(0.5);
    auto Pa = structure_matrix(bracket_alpha_form<double>(alpha), c);
    EXPECT_NEAR(std::abs(Pa(1, 2) - C(15) * (C(8) - alpha)), 0, 1e-12);
    EXPECT_NEAR(std::abs(Pa(1, 3) - C(3 * 5 * 7)), 0, 1e-12);
    auto Pu = structure_matrix(bracket_u<double>(), c);
    EXPECT_EQ(Pu(2, 3), C(35));
    EXPECT_EQ(Pu(5, 0), C(26));
    auto Pu2 = structure_matrix(bracket_u2<double>(), c);
    EXPECT_EQ(Pu2(5, 0), C(0));
    V x{C(0.5), C(0.25), C(0.1)};
    auto Px = structure_matrix(bracket_x<double>(), x);
    EXPECT_NEAR(std::abs(Px(0, 1) - C(0.5 * 0.5 * 0.25 * 0.75)), 0, 1e-15);
}

TEST(Bracket, ClusterValuesExact) {
    V x{C(2), C(3), C(5), C(7)};
    auto P = structure_matrix(bracket_cluster<double>(), x);
    EXPECT_EQ(P(0, 1), C(-6));
    EXPECT_EQ(P(0, 3), C(-14));
    EXPECT_EQ(P(2, 3), C(-35));
    EXPECT_EQ(P(1, 2), C(0));
    EXPECT_EQ(P(0, 2), C(0));
    EXPECT_EQ(P(1, 3), C(0));
}

TEST(Bracket, AntisymmetryAndLeibniz) {
    Rng rng(3);
    V c = random_c<double>(rng, 7, Field::Complex);
    Spec s = bracket_cpencil<double>(C(0.4, -0.1));
    ScalarFn<double> f = [](const V& z) { return z[0] * z[3] + std::exp(z[1] / C(4)); };
    ScalarFn<double> g = [](const V& z) { return z[2] * z[2] * z[4] - z[6]; };
    ScalarFn<double> h = [](const V& z) { return z[1] + z[5] * z[0]; };
    ScalarFn<double> gh = [&](const V& z) { return g(z) * h(z); };
    EXPECT_NEAR(std::abs(bracket(s, f, f, c)), 0, 1e-9);
    EXPECT_NEAR(std::abs(bracket(s, f, g, c) + bracket(s, g, f, c)), 0, 1e-9);
    C lhs = bracket(s, f, gh, c), rhs = bracket(s, f, g, c) * h(c) + g(c) * bracket(s, f, h, c);
    EXPECT_LT(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), 1e-7);
}

TEST(Bracket, DomainViolation) {
    V c{C(1), C(0), C(2), C(3), C(4)};
    EXPECT_THROW(structure_matrix(bracket_c1<double>(), c), Error);
    V x{C(0.5), C(1), C(0.3)};
    EXPECT_THROW(structure_matrix(bracket_x<double>(), x), Error);
    V u{C(0.5), C(-1), C(0.3)};
    EXPECT_THROW(structure_matrix(bracket_u<double>(), u), Error);
}

TEST(Bracket, JacobiAllSpecs) {
    Rng rng(11);
    for (const Spec& s : all_specs())
        for (long n : {5, 6, 7}) {
            double worst = 0;
            for (int t = 0; t < 50; ++t) worst = std::max(worst, jacobi_residual(s, chart_point(rng, n, s.kind)));
            EXPECT_LT(worst, s.kind == BracketKind::ClusterX ? 1e-10 : 1e-7) << bracket_name(s.kind) << " n=" << n;
        }
}

TEST(Bracket, PencilCompatibility) {
    Rng rng(12);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
        Spec s = bracket_pencil<double>(C(g(rng), g(rng)), C(g(rng), g(rng)));
        EXPECT_LT(jacobi_residual(s, chart_point(rng, 8, s.kind)), 1e-7);
    }
}

TEST(Casimir, PencilMembers) {
    Rng rng(5);
    for (long n : {5, 6, 7, 8}) {
        for (int t = 0; t < 5; ++t) {
            V c = random_c<double>(rng, n, Field::Complex);
            C alpha(0.3 + 0.5 * t, -0.2);
            for (const Spec& s : {bracket_cpencil<double>(C(1) / alpha), bracket_c1<double>(), bracket_c2<double>()}) {
                auto rep = casimir_residuals(s, c);
                ASSERT_EQ(rep.size(), n % 2 == 0 ? 2u : 1u);
                for (auto& r : rep) EXPECT_LT(r.residual, 1e-7) << r.name << " n=" << n;
            }
        }
    }
}

TEST(Casimir, EAlphaIsNotCasimirOfOtherMember) {
    Rng rng(6);
    V c = random_c<double>(rng, 6, Field::Real);
    auto P = structure_matrix(bracket_cpencil<double>(C(0.3)), c);
    EXPECT_GT(casimir_residual_of(P, grad_E_alpha(c, C(2.0))), 1e-4);
}

TEST(Casimir, UAndXCharts) {
    Rng rng(7);
    for (long n : {5, 6}) {
        V u = chart_point(rng, n, BracketKind::U);
        auto rep = casimir_residuals(bracket_u<double>(), u);
        ASSERT_EQ(rep.size(), n == 6 ? 3u : 1u);
        for (auto& r : rep) EXPECT_LT(r.residual, 1e-14) << r.name;
        V x = chart_point(rng, n, BracketKind::X);
        for (auto& r : casimir_residuals(bracket_x<double>(), x)) EXPECT_LT(r.residual, 1e-12) << r.name;
    }
    V u2 = chart_point(rng, 5, BracketKind::U2);
    auto rep = casimir_residuals(bracket_u2<double>(), u2);
    ASSERT_EQ(rep.size(), 1u);
    EXPECT_LT(rep[0].residual, 1e-14);
}

TEST(Involution, BothBracketsAndLadder) {
    Rng rng(8);
    for (long n : {5, 6, 7, 8, 9}) {
        for (int t = 0; t < 20; ++t) {
            V c = random_c<double>(rng, n, t % 2 ? Field::Real : Field::Complex);
            auto r = involution_check(c);
            EXPECT_LT(r.bracket1, 1e-6) << n;
            EXPECT_LT(r.bracket2, 1e-6) << n;
            EXPECT_LT(r.lenard_magri, 1e-6) << n;
        }
    }
}

TEST(Involution, IntegralsCommuteWithEAlpha) {
    Rng rng(9);
    V c = random_c<double>(rng, 7, Field::Complex);
    C alpha(1.7, 0.4);
    auto P = structure_matrix(bracket_cpencil<double>(C(1) / alpha), c);
    V F = F_all(c);
    auto dF = F_gradients(c);
    V gE = grad_E_alpha(c, alpha);
    for (long k = 0; k <= 3; ++k) {
        V gH = grad_H(c, k, F, dF);
        EXPECT_LT(std::abs(bracket_grad(P, gH, gE)) / std::max(1.0, max_abs(gH) * max_abs(gE) * P.cwiseAbs().maxCoeff()), 1e-10);
    }
}

TEST(Involution, ExactGradientsMatchFiniteDifferences) {
    Rng rng(10);
    V c = random_c<double>(rng, 8, Field::Complex);
    auto dF = F_gradients(c);
    for (long k = 0; k <= 4; ++k) {
        ScalarFn<double> f = [k](const V& z) { return F_all(z)[static_cast<std::size_t>(k)]; };
        V g = fd_gradient(f, c);
        for (long j = 0; j < 8; ++j) EXPECT_NEAR(std::abs(g[static_cast<std::size_t>(j)] - dF(k, j)), 0, 1e-7);
    }
}

TEST(Structure, Corank) {
    Rng rng(13);
    for (long n = 5; n <= 12; ++n)
        for (const Spec& s : {bracket_c1<double>(), bracket_c2<double>(), bracket_cpencil<double>(C(0.6, 0.3))})
            EXPECT_EQ(corank(s, random_c<double>(rng, n, Field::Complex)), n % 2 ? 1 : 2) << n;
}

TEST(Structure, HamiltonianSpanIndependentOfBracket) {
    Rng rng(14);
    for (long n : {5, 6, 7, 8}) {
        V c = random_c<double>(rng, n, Field::Complex);
        auto r = hamiltonian_span_check(c, {bracket_c1<double>(), bracket_c2<double>(), bracket_cpencil<double>(C(0.5)),
                                            bracket_cpencil<double>(C(-1.3, 0.2)), bracket_pencil<double>(C(2), C(0.7))});
        for (long d : r.dims) EXPECT_EQ(d, r.dims.front());
        EXPECT_LT(r.max_angle, 1e-5) << n;
    }
}

TEST(PoissonMap, PiAlphaTauAndU) {
    Rng rng(15);
    for (long n : {5, 6, 7}) {
        V x = chart_point(rng, n, BracketKind::X);
        for (C alpha : {C(-1), C(0.3, 0.2), C(2)}) EXPECT_LT(pi_alpha_poisson_residual(x, alpha), 1e-12);
        EXPECT_LT(tau_poisson_residual(x), 1e-15);
        EXPECT_LT(x_to_u_poisson_residual(x), 1e-12);
    }
}

TEST(PoissonMap, InvarianceUnderCorrespondence) {
    Rng rng(16);
    int done = 0;
    for (int t = 0; t < 40 && done < 8; ++t) {
        long n = 5 + t % 3;
        V c = closed_c(rng, n, Field::Complex);
        for (C alpha : {C(-1), C(0.3, 0.2)}) {
            try {
                EXPECT_LT(invariance_check(c, alpha, t % 2).residual, 1e-5) << n;
                ++done;
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), Errc::BranchDiscontinuity);
            }
        }
    }
    EXPECT_GE(done, 8);
}

TEST(PoissonMap, InvarianceOnTwistedPoints) {
    Rng rng(17);
    V c = random_c<double>(rng, 6, Field::Complex);
    EXPECT_LT(invariance_check(c, C(2), 0).residual, 1e-5);
}

TEST(Rho, EmbeddingExample) {
    V u{C(1), C(1)};
    V c = rho_embedding(u);
    ASSERT_EQ(c.size(), 5u);
    EXPECT_NEAR(std::abs(c[0] - C(0.5)), 0, 1e-15);
    EXPECT_NEAR(std::abs(c[1] - C(0.25)), 0, 1e-15);
    EXPECT_NEAR(std::abs(c[2] - C(0.5)), 0, 1e-15);
    EXPECT_NEAR(std::abs(c[3] - C(1.0 / 3)), 0, 1e-15);
    EXPECT_NEAR(std::abs(c[4] - C(1.0 / 3)), 0, 1e-15);
    EXPECT_LT(max_abs(closure_residuals(c)), 1e-12);
}

TEST(Rho, PoissonAndClosure) {
    Rng rng(18);
    for (long n = 5; n <= 10; ++n)
        for (int t = 0; t < 5; ++t) {
            auto r = rho_poisson_check(chart_point(rng, n - 3, BracketKind::U2));
            EXPECT_LT(r.closure, 1e-9) << n;
            EXPECT_LT(r.poisson, 1e-6) << n;
            EXPECT_LT(r.inverse, 1e-12) << n;
        }
}

TEST(Rho, DenominatorVanishes) {
    V u{C(1), C(-1)};
    EXPECT_THROW(rho_embedding(u), Error);
    V w{C(1), C(-2)};  // 1 + u_2 + u_2 u_3 = 0
    try {
        rho_embedding(w);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DenominatorVanishes);
    }
}

TEST(Cluster, FormMatchesInducedStructure) {
    Rng rng(19);
    for (long n : {5, 7, 9}) {
        for (int t = 0; t < 5; ++t) {
            V x = chart_point(rng, n - 3, BracketKind::ClusterX);
            auto r = cluster_check(x);
            EXPECT_EQ(r.rank, n - 3);
            EXPECT_LT(r.inverse_form, 1e-12) << n;
            EXPECT_LT(r.induced, 1e-6) << n;
            EXPECT_LT(r.chain, 1e-6) << n;
        }
    }
}

TEST(Cluster, EvenNRejected) {
    V x{C(1), C(2), C(3)};
    try {
        cluster_form(x);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EvenN);
    }
}

TEST(Cluster, AChartListHoldsUpToSign) {
    Rng rng(20);
    for (long n : {5, 7, 9}) {
        V c = closed_c(rng, n, Field::Complex);
        auto [plus, minus] = a_chart_bracket_residuals(c);
        EXPECT_LT(minus, 1e-6) << n;
        EXPECT_GT(plus, 1e-3) << n;
    }
}

TEST(Independence, RandomAndWitness) {
    Rng rng(21);
    for (long n = 4; n <= 12; ++n) {
        for (int t = 0; t < 20; ++t) EXPECT_EQ(independence_rank(random_c<double>(rng, n, Field::Complex)), n / 2 + 1) << n;
        EXPECT_EQ(independence_rank(epsilon_point<double>(n)), n / 2 + 1) << n;
    }
}

TEST(Independence, ClosedRelations) {
    Rng rng(22);
    for (long n = 5; n <= 12; ++n) {
        V c = closed_c(rng, n, Field::Complex);
        auto r = closed_integral_check(c);
        EXPECT_EQ(r.tangent_dim, n - 3);
        EXPECT_LT(r.sum_relation, 1e-9) << n;
        EXPECT_LT(r.weighted_relation, 1e-9) << n;
        EXPECT_LT(r.differential_relation, 1e-9) << n;
        EXPECT_EQ(r.relations, 1) << n;
        EXPECT_LE(r.rank_restricted, r.rank_full);
    }
}

TEST(Xi, HamiltonianOfTopIntegral) {
    Rng rng(23);
    for (long n : {5, 7, 9, 11}) {
        auto P = random_polygon<double>(rng, n, Field::Complex, true, 0.1);
        V c = cross_ratios(P);
        EXPECT_LT(xi_hamiltonian_residual(c, polygon_sqrt_cprod(P)), 1e-6) << n;
    }
}

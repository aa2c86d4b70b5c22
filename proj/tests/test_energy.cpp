#include "shared_lab.hpp"

#include "hartree/energy.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hartree;

namespace {
CVec W_c(const Lab& lab) { return lab.bubble().W_on(lab.grid()).cast<cplx>(); }
} // namespace

TEST_CASE("energy of the ground state") {
    const Lab& lab = testing::lab();
    // E(W) = 1/2 int |grad W|^2 - 1/4 int (|x|^-4 * W^2) W^2 = 1/4 int |grad W|^2
    CHECK(std::abs(energy(lab, W_c(lab)) / (0.25 * testing::kGradWSq) - 1.0) < 1e-8);
    // phase and critical scaling leave it unchanged
    const CVec u = lab.bubble().phased(lab.grid(), 1.1, 0.3);
    CHECK(std::abs(energy(lab, u) / (0.25 * testing::kGradWSq) - 1.0) < 1e-7);
    // W is critical
    CHECK(lab.grid().l2(energy_gradient(lab, W_c(lab))) / lab.grid().l2(lab.lap().apply(W_c(lab))) < 1e-6);
}

TEST_CASE("first and second variations against difference quotients") {
    const Lab& lab = testing::lab();
    std::mt19937_64 rng(21);
    const CVec u = W_c(lab) + 0.3 * random_bumps(lab, rng);
    const CVec g = random_bumps(lab, rng), h = random_bumps(lab, rng);
    const double eps = 1e-4;
    const double fd1 = (energy(lab, CVec(u + eps * g)) - energy(lab, CVec(u - eps * g))) / (2 * eps);
    const double d1 = energy_derivative(lab, u, g);
    CHECK(std::abs(fd1 - d1) <= 1e-6 * std::abs(d1));
    CHECK(std::abs(lab.grid().inner(energy_gradient(lab, u), g) - d1) <= 1e-6 * std::abs(d1));

    const double fd2 = (energy_derivative(lab, CVec(u + eps * h), g) - energy_derivative(lab, CVec(u - eps * h), g)) / (2 * eps);
    const double d2 = energy_hessian(lab, u, g, h);
    CHECK(std::abs(fd2 - d2) <= 1e-6 * std::abs(d2));
    CHECK(std::abs(energy_hessian(lab, u, h, g) - d2) <= 1e-10 * std::abs(d2));
    const Vec pot = potential(lab.kernel(), u);
    CHECK(energy_hessian(lab, u, pot, g, h) == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("cubic expansions are exact") {
    const Lab& lab = testing::lab();
    std::mt19937_64 rng(22);
    const CVec z1 = random_bumps(lab, rng), z2 = random_bumps(lab, rng);
    const CVec r = f_expansion_residual(lab, z1, z2);
    CHECK(lab.grid().l2(r) <= 1e-12 * lab.grid().l2(f_apply(lab.kernel(), CVec(z1 + z2))));
    const double F = lab.grid().integrate(F_density(lab.kernel(), CVec(z1 + z2)));
    CHECK(std::abs(F_expansion_residual(lab, z1, z2)) <= 1e-12 * std::abs(F));
}

TEST_CASE("two-bubble configuration") {
    const Lab& lab = testing::lab();
    TwoBubbleConfig cfg;
    cfg.lambda = 0.05;
    cfg.theta = 0.2;
    const CVec sum = two_bubble(lab, cfg);
    CHECK((sum - bubble_one(lab, cfg) - bubble_two(lab, cfg)).norm() <= 1e-15 * sum.norm());
    CHECK((bubble_one(lab, cfg) + cplx(0, 1) * W_c(lab)).cwiseAbs().maxCoeff() < 1e-15 * testing::kC0);
    CHECK((assemble(lab, cfg) - sum).norm() == 0.0);
    CHECK(smallness_gauge(lab, cfg) == doctest::Approx(0.25).epsilon(1e-12));
    TwoBubbleConfig bad = cfg;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.theta = 0.5;
    CHECK_THROWS_AS(two_bubble_energy_gap(lab, bad, 0.3), std::invalid_argument);
}

TEST_CASE("energy gap: even part from the self-interaction, odd part linear in theta") {
    const Lab& lab = testing::lab();
    const double c0 = testing::kC0;
    // theta-even part -V(0) C1 lambda^2 / 2, theta-odd part c0 C2 theta lambda^{5/2}
    const double even_coef = -0.5 * testing::kV0 * testing::kC1;
    const double odd_coef = c0 * testing::kC2;
    double prev_err = 1.0;
    for (double lambda : {0.04, 0.02, 0.01}) {
        TwoBubbleConfig cfg;
        cfg.lambda = lambda;
        cfg.theta = 0.1;
        const GapResult p = two_bubble_energy_gap(lab, cfg);
        cfg.theta = -0.1;
        const GapResult m = two_bubble_energy_gap(lab, cfg);
        cfg.theta = 0.0;
        const GapResult z = two_bubble_energy_gap(lab, cfg);
        CHECK(std::abs(z.self_energy) < 1e-9);
        CHECK(std::abs(z.gap / (even_coef * lambda * lambda) - 1.0) < 0.02);
        const double odd = 0.5 * (p.gap - m.gap) / (0.1 * std::pow(lambda, 2.5));
        const double err = std::abs(odd / odd_coef - 1.0);
        CHECK(err < prev_err);
        prev_err = err;
        CHECK(p.model == doctest::Approx(testing::kC2 * 0.1 * std::pow(lambda, 2.5)).epsilon(1e-6));
    }
    CHECK(prev_err < 0.01);
}

TEST_CASE("linear term vanishes for g = 0 and is linear in g") {
    const Lab& lab = testing::lab();
    TwoBubbleConfig cfg;
    cfg.lambda = 0.05;
    CHECK(linear_term(lab, cfg) == 0.0);
    std::mt19937_64 rng(23);
    cfg.g = random_bumps(lab, rng);
    const double a = linear_term(lab, cfg);
    cfg.g *= 2.0;
    CHECK(linear_term(lab, cfg) == doctest::Approx(2.0 * a).epsilon(1e-12));
}

TEST_CASE("Pi and Psi split") {
    const Lab& lab = testing::lab();
    const RadialGrid& g = lab.grid();
    std::mt19937_64 rng(24);
    const CVec u = random_bumps(lab, rng);
    const PiPsi s = project_pi_psi(lab, u, 0.5);
    CHECK((s.pi + s.psi - u).norm() <= 1e-14 * u.norm());
    for (Index i = 0; i < g.size(); ++i) {
        if (g.r()(i) <= 0.5)
            REQUIRE(s.pi(i) == s.pi(0));
        else
            REQUIRE(s.psi(i) == cplx(0.0));
    }
    CHECK_THROWS_AS(project_pi_psi(lab, u, 1e5), std::invalid_argument);
}

TEST_CASE("random fields and projections") {
    const Lab& lab = testing::lab();
    const RadialGrid& g = lab.grid();
    std::mt19937_64 a(7), b(7);
    CHECK((random_bumps(lab, a) - random_bumps(lab, b)).norm() == 0.0);
    CHECK(random_real_bumps(lab, a).allFinite());

    TwoBubbleConfig cfg;
    cfg.lambda = 0.05;
    const auto fields = orthogonality_fields(lab, cfg);
    REQUIRE(fields.size() == 4);
    const CVec p = project_out(lab, random_bumps(lab, a), fields);
    for (const CVec& f : fields) CHECK(std::abs(g.inner(f, p)) <= 1e-12 * g.l2(f) * g.l2(p));
    // projecting twice changes nothing
    CHECK((project_out(lab, p, fields) - p).norm() <= 1e-12 * p.norm());
}

TEST_CASE("mode amplitudes read off the unstable directions") {
    const Lab& lab = testing::lab();
    TwoBubbleConfig cfg;
    cfg.lambda = 0.05;
    const EigenPair& e = lab.eigen();
    const AlphaFields y1 = cY_fields(e, lab.grid(), cfg.zeta, cfg.mu);
    const AlphaFields y2 = cY_fields(e, lab.grid(), cfg.theta, cfg.lambda);
    const ModeAmplitudes m1 = mode_amplitudes(lab, cfg, CVec(0.3 * y1.plus));
    CHECK(m1.a1p == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(std::abs(m1.a1m) < 1e-6);
    const ModeAmplitudes m2 = mode_amplitudes(lab, cfg, CVec(-0.2 * y2.minus));
    CHECK(m2.a2m == doctest::Approx(-0.2).epsilon(1e-6));
    CHECK(std::abs(m2.a2p) < 1e-6);
    CHECK(m2.sum_sq() >= m2.a2m * m2.a2m);
}

TEST_CASE("H_lambda is symmetric") {
    const Lab& lab = testing::lab();
    TwoBubbleConfig cfg;
    cfg.lambda = 0.05;
    std::mt19937_64 rng(25);
    const CVec g = random_bumps(lab, rng), h = random_bumps(lab, rng);
    const double a = lab.grid().inner(h_lambda_apply(lab, cfg, g), h);
    const double b = lab.grid().inner(g, h_lambda_apply(lab, cfg, h));
    CHECK(std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)));
}

TEST_CASE("coercivity sampler on a small budget") {
    const Lab& lab = testing::lab();
    TwoBubbleConfig cfg;
    cfg.lambda = 0.05;
    CoercivityOptions opt;
    opt.trials = 40;
    opt.regional = false;
    const QuadraticFormReport r = coercivity_suite(lab, cfg, opt);
    CHECK(r.trials == 40);
    CHECK(r.ratios.size() == 40);
    CHECK(r.violations == 0);
    CHECK(r.min_ratio > 0.0);
    CHECK(r.max_orthogonality < 1e-10);
    // unstable directions mixed in lower the form without the correction
    CHECK(r.min_ratio_with_modes <= r.max_ratio);
    // deterministic for a fixed seed
    const QuadraticFormReport again = coercivity_suite(lab, cfg, opt);
    CHECK(again.min_ratio == r.min_ratio);
}

TEST_CASE("coercivity fit") {
    // Q + C P >= c with c half the smallest perpendicular value
    const CoercivityFit f = fit_coercivity({0.4, 0.6}, {0.1, 0.5}, {1.0, 0.0});
    CHECK(f.min_perp == doctest::Approx(0.4));
    CHECK(f.c == doctest::Approx(0.2));
    CHECK(f.C == doctest::Approx(0.1));
}

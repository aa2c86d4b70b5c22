#include "shared_lab.hpp"

#include "hartree/virial.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hartree;

namespace {
CVec inside_bumps(const Lab& lab, std::mt19937_64& rng, double lo, double hi) {
    BumpOptions bo;
    bo.r_lo = lo;
    bo.r_hi = hi;
    return random_bumps(lab, rng, bo);
}
} // namespace

TEST_CASE("cutoff profile") {
    CHECK(cutoff_sigma(-1.0) == 1.0);
    CHECK(cutoff_sigma(0.0) == 1.0);
    CHECK(cutoff_sigma(1.0) == 0.0);
    CHECK(cutoff_sigma(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    // flat to third order at both ends: sigma^(k) = O(s^{4-k})
    for (int k = 1; k <= 3; ++k) {
        CHECK(cutoff_sigma(0.0, k) == 0.0);
        CHECK(std::abs(cutoff_sigma(1e-3, k)) < 1e3 * std::pow(1e-3, 4 - k));
        CHECK(std::abs(cutoff_sigma(1.0 - 1e-3, k)) < 1e3 * std::pow(1e-3, 4 - k));
    }
    const double d = 1e-6;
    for (double s : {0.1, 0.37, 0.8})
        for (int k = 0; k < 3; ++k) {
            const double fd = (cutoff_sigma(s + d, k) - cutoff_sigma(s - d, k)) / (2 * d);
            CHECK(cutoff_sigma(s, k + 1) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    CHECK_THROWS_AS(cutoff_sigma(0.5, 4), std::invalid_argument);
}

TEST_CASE("weight derivatives are consistent") {
    const VirialWeight w(7, 0.05, 2.0, 1.0);
    CHECK(w.L() == doctest::Approx(20.0));
    CHECK(w.R_tilde() == doctest::Approx(2.0 * std::exp(20.0)));
    CHECK(w.q(1.0) == 0.5);
    CHECK(w.dq(1.5) == 1.5);
    CHECK(w.lap(1.0) == 7.0);
    CHECK(w.bilap(1.0) == 0.0);
    for (double r : {3.0, 40.0, 5e3, 1e6}) {
        const double d = 1e-5 * r;
        CHECK(w.dq(r) == doctest::Approx((w.q(r + d) - w.q(r - d)) / (2 * d)).epsilon(1e-7));
        CHECK(w.d2q(r) == doctest::Approx((w.dq(r + d) - w.dq(r - d)) / (2 * d)).epsilon(1e-6).scale(1.0));
        CHECK(w.lap(r) == doctest::Approx(w.d2q(r) + 6.0 * w.dq_over_r(r)).epsilon(1e-12));
        // Delta of the radial function lap(r)
        const double e = 1e-3 * r;
        const double l1 = (w.lap(r + e) - w.lap(r - e)) / (2 * e);
        const double l2 = (w.lap(r + e) - 2 * w.lap(r) + w.lap(r - e)) / (e * e);
        CHECK(w.r2_bilap(r) == doctest::Approx(r * r * (l2 + 6.0 * l1 / r)).epsilon(1e-4).scale(1e-3));
    }
    // q is continuous at R and flat past R~
    CHECK(w.q(2.0 * (1 + 1e-12)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(w.dq_over_r(w.R_tilde() * 1.01) == 0.0);
}

TEST_CASE("weight construction and audit") {
    const VirialWeight w = build_weight(7, 1e-3, 20.0);
    const WeightAudit a = w.audit();
    CHECK(a.ok());
    CHECK(a.p3_grad <= 1.0);
    CHECK(a.p3_lap <= 8.0);
    CHECK(a.nodes > 0);
    CHECK(w.Theta() >= 1.0);
    CHECK_THROWS_AS(build_weight(7, 0.2, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(build_weight(7, 1e-3, 0.5), std::invalid_argument);
}

TEST_CASE("Lambda_0 on the bubble and skewness") {
    const Lab& lab = testing::lab();
    const RadialGrid& g = lab.grid();
    const CVec W = lab.bubble().W_on(g).cast<cplx>();
    const CVec L0W = apply_Lambda0(g, W);
    const CVec LW = apply_Lambda(g, W);
    const Vec L0W_exact = lab.bubble().L0W_on(g), LW_exact = lab.bubble().LW_on(g);
    double e0 = 0.0, e1 = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        if (!testing::interior(i, g.size())) continue;
        e0 = std::max(e0, std::abs(L0W(i) - L0W_exact(i)));
        e1 = std::max(e1, std::abs(LW(i) - LW_exact(i)));
    }
    CHECK(e0 < 1e-8 * testing::kC0);
    CHECK(e1 < 1e-8 * testing::kC0);

    std::mt19937_64 rng(41);
    const CVec a = inside_bumps(lab, rng, 1e-2, 10.0), b = inside_bumps(lab, rng, 1e-2, 10.0);
    const double s = g.inner(a, apply_Lambda0(g, b)) + g.inner(apply_Lambda0(g, a), b);
    CHECK(std::abs(s) <= 1e-10 * g.l2(a) * g.l2(apply_Lambda0(g, b)));
}

TEST_CASE("virial operators reduce to the generators inside the region") {
    const Lab& lab = testing::lab();
    const RadialGrid& g = lab.grid();
    const VirialWeight w = build_weight(7, 1e-3, 20.0);
    std::mt19937_64 rng(42);
    const double lambda = 0.5;
    const CVec h = inside_bumps(lab, rng, 1e-2, 1.0);
    const CVec l0 = apply_Lambda0(g, h) / (lambda * lambda);
    CHECK((apply_A0(g, lambda, w, h) - l0).norm() <= 1e-10 * l0.norm());
    const CVec l = apply_Lambda(g, h) / (lambda * lambda);
    CHECK((apply_A(g, lambda, w, h) - l).norm() <= 1e-10 * l.norm());
    CHECK_THROWS_AS(apply_A0(g, 0.0, w, h), std::invalid_argument);
}

TEST_CASE("A0 is skew even where the cutoff acts") {
    const Lab& lab = testing::lab();
    const VirialWeight w = build_weight(7, 1e-3, 20.0);
    std::mt19937_64 rng(43);
    for (int t = 0; t < 5; ++t) {
        const CVec a = inside_bumps(lab, rng, 1e-2, 5.0), b = inside_bumps(lab, rng, 1e-2, 5.0);
        const AntisymmetryResult r = a0_antisymmetry(lab, 0.05, w, a, b);
        CHECK(std::abs(r.defect) <= 1e-8 * r.scale);
    }
}

TEST_CASE("Pohozaev margin equals c0 for fields inside the region") {
    const Lab& lab = testing::lab();
    const VirialWeight w = build_weight(7, 1e-3, 20.0);
    std::mt19937_64 rng(44);
    const double lambda = 0.5, c0 = 1e-2;
    const CVec h = inside_bumps(lab, rng, 1e-2, 1.0);
    const PohozaevResult p = pohozaev_check(lab, lambda, w, h, c0);
    const double norm = lab.lap().dirichlet(h) / (lambda * lambda);
    // <Lambda_0 h, Delta h> = -||grad h||^2
    CHECK(p.lhs / norm == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(p.margin / norm == doctest::Approx(c0).epsilon(1e-3));

    const PohozaevAudit a = pohozaev_audit(lab, 0.05, w, c0, 20);
    CHECK(a.trials == 20);
    CHECK(a.violations == 0);
    CHECK(a.min_margin >= 0.0);
    CHECK(pohozaev_audit(lab, 0.05, w, c0, 20).min_margin == a.min_margin);
}

TEST_CASE("Lambda identity for the cubic nonlinearity") {
    const Lab& lab = testing::lab();
    std::mt19937_64 rng(45);
    const CVec W = lab.bubble().W_on(lab.grid()).cast<cplx>();
    for (int t = 0; t < 3; ++t) {
        const CVec v = 0.1 * inside_bumps(lab, rng, 0.05, 20.0);
        const LambdaIdentity id = lambda_identity_check(lab, W, v);
        CHECK(id.residual < 1e-5);
        CHECK(std::abs(id.lhs) > 0.0);
    }
    CHECK(lambda_identity_check(lab, W, CVec::Zero(W.size())).residual == 0.0);
}

TEST_CASE("integration by parts for the two-bubble configuration") {
    const Lab& lab = testing::lab();
    const VirialWeight w = build_weight(7, 1e-3, 20.0);
    std::mt19937_64 rng(46);
    TwoBubbleConfig cfg;
    cfg.lambda = 0.05;
    cfg.g = 1e-2 * inside_bumps(lab, rng, 1e-3, 1.0);
    const ByPartsDefect d = by_parts_defect(lab, w, cfg);
    CHECK(d.g_sq > 0.0);
    CHECK(d.defect <= 1e-4 * std::max(std::abs(d.lhs), std::abs(d.rhs)));
}

TEST_CASE("psi and its rate audit") {
    const Lab& lab = testing::lab();
    const VirialWeight w = build_weight(7, 1e-3, 20.0);
    ModulationState s;
    s.theta = 0.3;
    s.lambda = 0.05;
    CHECK(psi(lab, w, s).psi == 0.3);
    std::mt19937_64 rng(47);
    s.g = 1e-2 * inside_bumps(lab, rng, 1e-3, 1.0);
    const PsiValue v = psi(lab, w, s);
    CHECK(v.imag_residue < 1e-8);
    CHECK(v.psi == doctest::Approx(0.3 - v.correction).epsilon(1e-15));

    std::vector<PsiSample> up, down;
    for (int i = 0; i < 10; ++i) {
        const double t = -10.0 + i;
        up.push_back({t, 2.0 * t});
        down.push_back({t, -t});
    }
    const PsiRateReport ru = psi_rate_audit(7, up, 1.0);
    CHECK(ru.samples == 8);
    CHECK(ru.min_rate == doctest::Approx(2.0));
    CHECK(ru.violations == 0);
    const PsiRateReport rd = psi_rate_audit(7, down, 1.0);
    // psi' = -1 against |t|^{-2}: c1 = max t^2 over the interior samples
    CHECK(rd.c1 == doctest::Approx(81.0));
    CHECK(rd.violations == 8);
    CHECK_THROWS_AS(psi_rate_audit(7, {up[0], up[1]}, 1.0), std::invalid_argument);
    std::vector<PsiSample> bad = up;
    bad[4].t = bad[3].t;
    CHECK_THROWS_AS(psi_rate_audit(7, bad, 1.0), std::invalid_argument);
}

#include "shared_lab.hpp"

#include "hartree/bubble.hpp"
#include "hartree/profile.hpp"

#include <doctest.h>

#include <cmath>

using namespace hartree;

namespace {
double rel(double a, double b) { return std::abs(a / b - 1.0); }
} // namespace

TEST_CASE("fitted amplitude matches the closed form") {
    const Lab& lab = testing::lab();
    CHECK(rel(lab.bubble().c0, testing::kC0) < 1e-8);
    CHECK(lab.amplitude().spread < 1e-5);
    CHECK(lab.amplitude().rho_min > 0.0);
}

TEST_CASE("bubble solves the elliptic equation") {
    const Lab& lab = testing::lab();
    const double res = elliptic_residual(lab.grid(), lab.kernel(), lab.lap(), lab.bubble());
    CHECK(res < 1e-6);
    // a wrong amplitude leaves a residual of order |c^2/c0^2 - 1|
    Bubble off = lab.bubble();
    off.c0 *= 1.01;
    CHECK(elliptic_residual(lab.grid(), lab.kernel(), lab.lap(), off) > 1e-3);
}

TEST_CASE("amplitude is stable under grid refinement") {
    const Lab& lab = testing::lab();
    const RadialGrid g(7, 1e-4, 1e3, 1024);
    const RieszKernel K(g);
    const Laplacian L(g);
    const AmplitudeFit f = fit_amplitude(g, K, L);
    CHECK(rel(f.c0, lab.bubble().c0) < 1e-7);
}

TEST_CASE("constants against closed forms") {
    const Constants& c = testing::lab().static_constants();
    CHECK(c.N == 7);
    CHECK(rel(c.C1, testing::kC1) < 1e-8);
    CHECK(rel(c.C1_beta, testing::kC1) < 1e-8);
    CHECK(rel(c.C2, testing::kC2) < 1e-6);
    CHECK(rel(c.C2_flux, testing::kC2) < 1e-8);
    CHECK(rel(c.C3, testing::kC3) < 1e-5);
    CHECK(rel(c.C3_flux, testing::kC3) < 1e-8);
    CHECK(rel(c.grad_W_sq, testing::kGradWSq) < 1e-7);
    CHECK(rel(c.grad_W_sq_pot, testing::kGradWSq) < 1e-7);
    CHECK(rel(c.kappa, testing::kKappa) < 1e-6);
    CHECK(rel(c.kappa_formula(), c.kappa) < 1e-14);
    // the slowest tail (C2, C3 integrands ~ r^{-(N+2)}) is O(r_max^{-2})
    CHECK(c.tail_bound > 0.0);
    CHECK(c.tail_bound < 1e-5);
    CHECK(c.grid_points == 2048);
}

TEST_CASE("kappa formula") {
    CHECK(rel(kappa_from(7, testing::kC1, testing::kC2), testing::kKappa) < 1e-14);
    // kappa^{(N-6)/2} = 2 C1 / (3 (N-6) C2)
    CHECK(rel(std::pow(kappa_from(9, 2.0, 5.0), 1.5), 4.0 / 45.0) < 1e-14);
}

TEST_CASE("scaling generators") {
    const Bubble& b = testing::lab().bubble();
    const double N = b.N;
    for (double r : {0.0, 0.3, 1.0, 2.5, 40.0}) {
        const double d = 1e-5 * std::max(r, 1.0);
        const double dW = (b.W(r + d) - b.W(std::max(r - d, 0.0))) / (r + d - std::max(r - d, 0.0));
        CHECK(b.LW(r) == doctest::Approx(0.5 * (N - 2) * b.W(r) + r * dW).epsilon(1e-7));
        CHECK(b.L0W(r) == doctest::Approx(b.W(r) + b.LW(r)).epsilon(1e-15));
        const double dLW = (b.LW(r + d) - b.LW(std::max(r - d, 0.0))) / (r + d - std::max(r - d, 0.0));
        CHECK(b.LLW(r) == doctest::Approx(0.5 * (N - 2) * b.LW(r) + r * dLW).epsilon(1e-6).scale(b.c0));
    }
    // Lambda W vanishes at r = 1 and W_lambda is dilation-generated by it
    CHECK(std::abs(b.LW(1.0)) < 1e-15);
    const RadialGrid& g = testing::lab().grid();
    const double eps = 1e-5;
    const Vec dlam = (b.W_on(g, 1.0 + eps) - b.W_on(g, 1.0 - eps)) / (2 * eps);
    CHECK((dlam + b.LW_on(g)).norm() < 1e-8 * b.LW_on(g).norm());
}

TEST_CASE("phased bubble") {
    const Lab& lab = testing::lab();
    const CVec u = lab.bubble().phased(lab.grid(), 0.7, 0.5);
    const Vec Wl = lab.bubble().W_on(lab.grid(), 0.5);
    CHECK((u - std::polar(1.0, 0.7) * Wl.cast<cplx>()).norm() == 0.0);
    // critical scaling keeps the L^{2N/(N-2)} and Hdot^1 norms
    CHECK(rel(lab.lap().dirichlet(Wl), lab.lap().dirichlet(lab.bubble().W_on(lab.grid()))) < 1e-7);
}

TEST_CASE("profile interpolation and rescaling") {
    const Lab& lab = testing::lab();
    const RadialGrid& g = lab.grid();
    const Bubble& b = lab.bubble();
    const Profile p(g, b.W_on(g));
    for (double r : {2e-4, 1e-3, 0.37, 1.0, 3.3, 250.0})
        CHECK(p(r) == doctest::Approx(b.W(r)).epsilon(1e-8));
    CHECK(p(1e-6) == doctest::Approx(b.W(g.r_min())).epsilon(1e-10));
    CHECK(p(2e3) == 0.0);
    const Vec resc = p.rescaled(g, 0.1);
    const Vec exact = b.W_on(g, 0.1);
    double worst = 0.0;
    for (Index i = 0; i < g.size(); ++i)
        if (g.r()(i) < 50.0) worst = std::max(worst, std::abs(resc(i) - exact(i)) / exact.cwiseAbs().maxCoeff());
    CHECK(worst < 1e-8);
}

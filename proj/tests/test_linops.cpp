#include "shared_lab.hpp"

#include "hartree/energy.hpp"
#include "hartree/linops.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hartree;

TEST_CASE("kernel of the linearized operators") {
    const Lab& lab = testing::lab();
    const LinOps& ops = lab.linops();
    const RadialGrid& g = lab.grid();
    const Vec W = lab.bubble().W_on(g);
    const Vec LW = lab.bubble().LW_on(g);
    CHECK(g.l2(ops.lminus(W)) / g.l2(lab.lap().apply(W)) < 1e-6);
    CHECK(g.l2(ops.lplus(LW)) / g.l2(lab.lap().apply(LW)) < 1e-6);
    // W itself is not in the kernel of L+: L+ W = 2 Delta W
    CHECK(g.l2(Vec(ops.lplus(W) - 2.0 * lab.lap().apply(W))) / g.l2(lab.lap().apply(W)) < 1e-6);
}

TEST_CASE("dense operators agree with the matrix-free ones") {
    const RadialGrid g(7, 1e-2, 1e2, 300);
    const RieszKernel K(g);
    const Laplacian L(g);
    const Bubble b{7, testing::kC0};
    const LinOps ops(g, K, L, b);
    const DiscreteOperator lp = ops.build_lplus(), lm = ops.build_lminus();
    CHECK(lp.symmetry_defect(g.w()) < 1e-8);
    CHECK(lm.symmetry_defect(g.w()) < 1e-8);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    Vec h(g.size());
    for (Index i = 0; i < h.size(); ++i) h(i) = nd(rng);
    CHECK((lp.apply(h) - ops.lplus(h)).norm() <= 1e-10 * ops.lplus(h).norm());
    CHECK((lm.apply(h) - ops.lminus(h)).norm() <= 1e-10 * ops.lminus(h).norm());
    CHECK((ops.build_vplus().apply(h) - ops.vplus(h)).norm() <= 1e-12 * ops.vplus(h).norm());
    CHECK((ops.build_product().apply(h) + ops.lminus(ops.lplus(h))).norm() <= 1e-9 * ops.lminus(ops.lplus(h)).norm());

    // the scaled forms are similar to L+- and symmetric
    const Vec s = g.w().cwiseSqrt();
    const Mat A = ops.scaled_lplus();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Vec via = s.cwiseInverse().cwiseProduct(A * s.cwiseProduct(h));
    CHECK((via - ops.lplus(h)).norm() <= 1e-8 * ops.lplus(h).norm());
    CHECK_THROWS_AS(ops.build_lplus(-1.0), std::runtime_error);
}

TEST_CASE("L- is nonnegative and L+ has exactly one negative direction") {
    const RadialGrid g(7, 1e-2, 1e2, 300);
    const RieszKernel K(g);
    const Laplacian L(g);
    const LinOps ops(g, K, L, Bubble{7, testing::kC0});
    Eigen::SelfAdjointEigenSolver<Mat> em(ops.scaled_lminus(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> ep(ops.scaled_lplus(), Eigen::EigenvaluesOnly);
    const Vec& lm = em.eigenvalues();
    const Vec& lp = ep.eigenvalues();
    // the smallest eigenvalue of L- is the (near) zero mode W
    CHECK(lm(0) > -1e-3 * lm(1));
    CHECK(lp(0) < 0.0);
    CHECK(lp(1) > -1e-3 * lp(2));
}

TEST_CASE("unstable eigenpair") {
    const Lab& lab = testing::lab();
    const EigenPair& e = lab.eigen();
    const RadialGrid& g = lab.grid();
    CHECK(e.nu == doctest::Approx(6.30133).epsilon(1e-5));
    CHECK(std::abs(e.nu / e.nu_coarse - 1.0) < 1e-2);
    CHECK(e.res_plus < 1e-6);
    CHECK(e.res_minus < 1e-6);
    // two stacked discrete Laplacians: round-off grows like h^{-4} (7.5e-6 at 1024 nodes)
    CHECK(e.res_product < 1e-3);
    CHECK(g.l2(e.Y1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.Y1(0) > 0.0);
    CHECK(e.M > 0.0);
    CHECK(e.M == doctest::Approx(g.inner(e.Y1, e.Y2)).epsilon(1e-14));
    CHECK(e.rhoY == doctest::Approx(g.l2(e.Y2)).epsilon(1e-14));
    CHECK(std::abs(e.orth_W_Y1) < 1e-6);
    CHECK(std::abs(e.orth_LW_Y2) < 1e-6);
    CHECK(e.decay < 1e-6);
    // profiles reproduce the nodes
    for (Index i : {Index(100), Index(900), Index(1500)}) CHECK(e.P1(g.r()(i)) == doctest::Approx(e.Y1(i)).epsilon(1e-8).scale(1.0));
    const Constants& c = lab.constants();
    CHECK(c.nu == e.nu);
    CHECK(c.M == e.M);
}

TEST_CASE("alpha and cY fields") {
    const Lab& lab = testing::lab();
    const EigenPair& e = lab.eigen();
    const RadialGrid& g = lab.grid();
    const double theta = 0.4, lambda = 0.5;
    const AlphaFields a = alpha_fields(e, g, theta, lambda);
    const AlphaFields y = cY_fields(e, g, theta, lambda);
    // <alpha^{+-}, cY^{+-}> = 1 and the cross pairings vanish
    CHECK(g.inner(a.plus, y.plus) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g.inner(a.minus, y.minus) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(g.inner(a.plus, y.minus)) < 1e-6);
    CHECK(std::abs(g.inner(a.minus, y.plus)) < 1e-6);
}

TEST_CASE("Z operator against a difference quotient of the flow") {
    const Lab& lab = testing::lab();
    const LinOps& ops = lab.linops();
    const RadialGrid& g = lab.grid();
    std::mt19937_64 rng(8);
    const CVec h = random_bumps(lab, rng);
    const double theta = 0.3, lambda = 0.7;
    const CVec u = lab.bubble().phased(g, theta, lambda);
    // i (Delta u + f(u)) linearized at u; Delta is linear, so only f is differenced
    // (differencing the discrete Laplacian of u near r_min is dominated by round-off)
    const double eps = 1e-5;
    const CVec df = (f_apply(lab.kernel(), CVec(u + eps * h)) - f_apply(lab.kernel(), CVec(u - eps * h))) / (2 * eps);
    const CVec fd = cplx(0, 1) * (lab.lap().apply(h) + df);
    const CVec z = apply_Z(ops, theta, lambda, h);
    CHECK((fd - z).norm() <= 1e-8 * z.norm());
    // phase and scale generators lie in the kernel of Z
    const CVec iW = cplx(0, 1) * u;
    const CVec LWl = std::polar(1.0, theta) * lab.bubble().LW_on(g, lambda).cast<cplx>();
    const double scale = g.l2(CVec(lab.lap().apply(iW)));
    CHECK(g.l2(apply_Z(ops, theta, lambda, iW)) / scale < 1e-6);
    CHECK(g.l2(apply_Z(ops, theta, lambda, LWl)) / g.l2(CVec(lab.lap().apply(LWl))) < 1e-6);
}

#include "hartree/linops.hpp"

#include "hartree/nonlinear.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hartree {

double DiscreteOperator::symmetry_defect(const Vec& w) const {
    const Index n = A.rows();
    double worst = 0.0, scale = 0.0;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double a = w(i) * A(i, j);
            scale = std::max(scale, std::abs(a));
            worst = std::max(worst, std::abs(a - w(j) * A(j, i)));
        }
    return scale > 0.0 ? worst / scale : 0.0;
}

LinOps::LinOps(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap, const Bubble& b)
    : grid_(&grid), kernel_(&kernel), lap_(&lap), b_(b) {
    W_ = b_.W_on(grid);
    V_ = kernel.convolve(W_.cwiseProduct(W_));
}

Vec LinOps::vminus(const Vec& h) const { return -V_.cwiseProduct(h); }
Vec LinOps::vplus(const Vec& h) const {
    return -V_.cwiseProduct(h) - 2.0 * kernel_->convolve(W_.cwiseProduct(h)).cwiseProduct(W_);
}
Vec LinOps::lminus(const Vec& h) const { return -lap_->apply(h) + vminus(h); }
Vec LinOps::lplus(const Vec& h) const { return -lap_->apply(h) + vplus(h); }

namespace {
Mat minus_laplacian_dense(const Laplacian& lap) {
    Mat S = Mat(lap.stiffness());
    const Vec& w = lap.grid().w();
    for (Index i = 0; i < S.rows(); ++i) S.row(i) /= w(i);
    return S;
}

// C_ij = K_ij w_j + D_i delta_ij: the discrete convolution matrix
Mat convolution_dense(const RieszKernel& k, const Vec& w) {
    Mat C = k.matrix() * w.asDiagonal();
    C.diagonal() += k.diagonal_correction();
    return C;
}

void check_symmetry(const DiscreteOperator& op, const Vec& w, double tol) {
    const double d = op.symmetry_defect(w);
    if (!(d <= tol)) {
        std::ostringstream os;
        os << op.label << ": symmetry defect " << d << " exceeds " << tol;
        throw std::runtime_error(os.str());
    }
}
} // namespace

DiscreteOperator LinOps::build_vminus() const {
    DiscreteOperator op{"Vminus", Mat::Zero(V_.size(), V_.size())};
    op.A.diagonal() = -V_;
    return op;
}

DiscreteOperator LinOps::build_vplus() const {
    Mat C = convolution_dense(*kernel_, grid_->w());
    DiscreteOperator op{"Vplus", -2.0 * W_.asDiagonal() * C * W_.asDiagonal()};
    op.A.diagonal() -= V_;
    return op;
}

DiscreteOperator LinOps::build_lminus(double tol) const {
    DiscreteOperator op{"Lminus", minus_laplacian_dense(*lap_)};
    op.A.diagonal() -= V_;
    check_symmetry(op, grid_->w(), tol);
    return op;
}

DiscreteOperator LinOps::build_lplus(double tol) const {
    DiscreteOperator op{"Lplus", minus_laplacian_dense(*lap_) + build_vplus().A};
    check_symmetry(op, grid_->w(), tol);
    return op;
}

DiscreteOperator LinOps::build_product() const {
    DiscreteOperator lm = build_lminus(1.0), lp = build_lplus(1.0);
    return DiscreteOperator{"minusLmLp", -(lm.A * lp.A)};
}

Mat LinOps::scaled_lminus() const {
    const Vec& w = grid_->w();
    Vec s = w.cwiseSqrt().cwiseInverse();
    Mat A = s.asDiagonal() * Mat(lap_->stiffness()) * s.asDiagonal();
    A.diagonal() -= V_;
    return 0.5 * (A + A.transpose());
}

Mat LinOps::scaled_lplus() const {
    const Vec& w = grid_->w();
    Vec sq = w.cwiseSqrt();
    Mat A = scaled_lminus();
    // diag(W) (w^{1/2} K w^{1/2} + D) diag(W)
    Mat B = (W_.cwiseProduct(sq)).asDiagonal() * kernel_->matrix() * (W_.cwiseProduct(sq)).asDiagonal();
    B.diagonal() += W_.cwiseProduct(W_).cwiseProduct(kernel_->diagonal_correction());
    A -= 2.0 * B;
    return 0.5 * (A + A.transpose());
}

namespace {

double coarse_nu(const LinOps& ops, const EigenOptions& opt) {
    const RadialGrid& fine = ops.grid();
    RadialGrid g(fine.dim(), opt.coarse_r_min, opt.coarse_r_max, opt.coarse_points);
    RieszKernel k(g);
    Laplacian lap(g);
    LinOps c(g, k, lap, ops.bubble());
    DiscreteOperator P = c.build_product();
    Eigen::EigenSolver<Mat> es(P.A, false);
    double best = -1.0, best_im = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx z = es.eigenvalues()(i);
        if (z.real() > best && std::abs(z.imag()) <= 1e-6 * std::abs(z)) {
            best = z.real();
            best_im = z.imag();
        }
    }
    if (!(best > 0.0)) throw std::runtime_error("solve_eigen: no positive eigenvalue of -L- L+ (grid too coarse?)");
    if (std::abs(best_im) > 1e-8 * best)
        throw std::runtime_error("solve_eigen: eigenvalue of -L- L+ has a non-negligible imaginary part");
    return std::sqrt(best);
}

} // namespace

EigenPair solve_eigen(const LinOps& ops, const EigenOptions& opt) {
    const RadialGrid& g = ops.grid();
    const Index n = g.size();
    EigenPair ep;
    ep.nu_coarse = coarse_nu(ops, opt);

    Mat Lp = ops.scaled_lplus();
    Mat Lm = ops.scaled_lminus();
    Mat J = Mat::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Lm;
    J.bottomLeftCorner(n, n) = -Lp;
    Mat S = J;
    S.diagonal().array() -= ep.nu_coarse;
    Eigen::PartialPivLU<Mat> lu(S);

    const Vec sq = g.w().cwiseSqrt();
    Vec z(2 * n);
    z.head(n) = ops.W().cwiseProduct(sq);
    z.tail(n) = ops.W().cwiseProduct(sq);
    double nu = ep.nu_coarse;
    for (int it = 0; it < opt.max_iter; ++it) {
        Vec zn = lu.solve(z);
        zn /= zn.norm();
        if (zn.dot(z) < 0) zn = -zn;
        const double change = (zn - z).norm();
        z = zn;
        Vec Jz = J * z;
        nu = z.dot(Jz);
        if (change < opt.tol) break;
    }

    const double area = g.area();
    Vec Y1 = z.head(n).cwiseQuotient(sq), Y2 = z.tail(n).cwiseQuotient(sq);
    double n1 = g.l2(Y1);
    if (Y1(0) < 0) n1 = -n1;
    Y1 /= n1;
    Y2 /= n1;
    (void)area;
    ep.nu = nu;
    ep.Y1 = Y1;
    ep.Y2 = Y2;
    ep.rhoY = g.l2(Y2);
    ep.M = g.inner(Y1, Y2);
    ep.res_plus = g.l2(Vec(ops.lplus(Y1) + nu * Y2)) / nu;
    ep.res_minus = g.l2(Vec(ops.lminus(Y2) - nu * Y1)) / nu;
    ep.res_product = g.l2(Vec(-ops.lminus(ops.lplus(Y1)) - nu * nu * Y1)) / (nu * nu);
    ep.orth_W_Y1 = g.inner(ops.W(), Y1);
    ep.orth_LW_Y2 = g.inner(ops.bubble().LW_on(g), Y2);
    ep.decay = std::abs(Y1(n - 1)) / Y1.cwiseAbs().maxCoeff();
    ep.P1 = Profile(g, Y1);
    ep.P2 = Profile(g, Y2);
    if (!(ep.nu > 0.0)) throw std::runtime_error("solve_eigen: inverse iteration did not produce nu > 0");
    return ep;
}

AlphaFields alpha_fields(const EigenPair& e, const RadialGrid& grid, double theta, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("alpha_fields: lambda must be positive");
    Vec y1 = e.P1.rescaled(grid, lambda), y2 = e.P2.rescaled(grid, lambda);
    const cplx ph = std::polar(1.0, theta) / (lambda * lambda);
    AlphaFields a;
    a.plus = ph * (y2.cast<cplx>() + cplx(0, 1) * y1.cast<cplx>());
    a.minus = ph * (y2.cast<cplx>() - cplx(0, 1) * y1.cast<cplx>());
    return a;
}

AlphaFields cY_fields(const EigenPair& e, const RadialGrid& grid, double theta, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("cY_fields: lambda must be positive");
    Vec y1 = e.P1.rescaled(grid, lambda), y2 = e.P2.rescaled(grid, lambda);
    const cplx ph = std::polar(1.0, theta) / (2.0 * e.M);
    AlphaFields a;
    a.plus = ph * (y1.cast<cplx>() + cplx(0, 1) * y2.cast<cplx>());
    a.minus = ph * (y1.cast<cplx>() - cplx(0, 1) * y2.cast<cplx>());
    return a;
}

CVec apply_Z(const LinOps& ops, double theta, double lambda, const CVec& g) {
    const RadialGrid& grid = ops.grid();
    CVec u = ops.bubble().phased(grid, theta, lambda);
    CVec out = ops.lap().apply(g) + fprime_apply(ops.kernel(), u, g);
    return cplx(0, 1) * out;
}

} // namespace hartree

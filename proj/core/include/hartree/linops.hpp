#pragma once

#include "hartree/bubble.hpp"
#include "hartree/profile.hpp"

#include <string>

namespace hartree {

// Dense matrix acting on nodal values.
struct DiscreteOperator {
    std::string label; // Lplus, Lminus, Vplus, Vminus, minusLmLp
    Mat A;

    Vec apply(const Vec& h) const { return A * h; }
    // max_ij |w_i A_ij - w_j A_ji| / max_ij |w_i A_ij|
    double symmetry_defect(const Vec& w) const;
};

// L+ h = -Delta h - (|x|^{-4} * W^2) h - 2 (|x|^{-4} * (W h)) W,  L- h = -Delta h - (|x|^{-4} * W^2) h
class LinOps {
public:
    LinOps(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap, const Bubble& b);

    const RadialGrid& grid() const { return *grid_; }
    const RieszKernel& kernel() const { return *kernel_; }
    const Laplacian& lap() const { return *lap_; }
    const Bubble& bubble() const { return b_; }
    const Vec& W() const { return W_; }
    const Vec& V() const { return V_; }

    Vec lplus(const Vec& h) const;
    Vec lminus(const Vec& h) const;
    Vec vplus(const Vec& h) const;
    Vec vminus(const Vec& h) const;

    DiscreteOperator build_lplus(double tol = 1e-8) const;
    DiscreteOperator build_lminus(double tol = 1e-8) const;
    DiscreteOperator build_vplus() const;
    DiscreteOperator build_vminus() const;
    DiscreteOperator build_product() const; // -L- L+

    // symmetric similarity transforms diag(w)^{1/2} L diag(w)^{-1/2}
    Mat scaled_lplus() const;
    Mat scaled_lminus() const;

private:
    const RadialGrid* grid_;
    const RieszKernel* kernel_;
    const Laplacian* lap_;
    Bubble b_;
    Vec W_, V_;
};

struct EigenPair {
    double nu = 0.0;
    Vec Y1, Y2;
    double rhoY = 0.0; // ||Y2||_{L^2} with ||Y1||_{L^2} = 1
    double M = 0.0;    // <Y1, Y2>
    double res_plus = 0.0, res_minus = 0.0, res_product = 0.0; // relative to nu (nu^2 for the product)
    double nu_coarse = 0.0;
    double orth_W_Y1 = 0.0, orth_LW_Y2 = 0.0;
    double decay = 0.0; // |Y1(r_max)| / max |Y1|
    Profile P1, P2;
};

struct EigenOptions {
    int coarse_points = 400;
    double coarse_r_min = 1e-2, coarse_r_max = 1e2;
    int max_iter = 12;
    double tol = 1e-12;
};

// The unstable pair L+ Y1 = -nu Y2, L- Y2 = nu Y1. nu^2 is located as the positive eigenvalue
// of -L- L+ on a coarse grid, then refined by shifted inverse iteration on the first-order block
// [[0, L-], [-L+, 0]] on the working grid.
EigenPair solve_eigen(const LinOps& ops, const EigenOptions& opt = {});

struct AlphaFields {
    CVec plus, minus;
};
// alpha^{+-}_{theta,lambda} = e^{i theta} lambda^{-2} (Y2_lambda +- i Y1_lambda)
AlphaFields alpha_fields(const EigenPair& e, const RadialGrid& grid, double theta, double lambda);
// cY^{+-}_{theta,lambda} = e^{i theta} (Y1_lambda +- i Y2_lambda) / (2M)
AlphaFields cY_fields(const EigenPair& e, const RadialGrid& grid, double theta, double lambda);

// Z_{theta,lambda} g = i Delta g + i f'(e^{i theta} W_lambda) g
CVec apply_Z(const LinOps& ops, double theta, double lambda, const CVec& g);

} // namespace hartree

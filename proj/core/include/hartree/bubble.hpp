#pragma once

#include "hartree/grid.hpp"
#include "hartree/kernel.hpp"
#include "hartree/laplacian.hpp"

namespace hartree {

// W(r) = c0 (1 + r^2)^{-(N-2)/2} and its scaling generators, all in closed form.
struct Bubble {
    int N = 7;
    double c0 = 1.0;

    double W(double r) const;
    // Lambda W = (N-2)/2 W + r W'
    double LW(double r) const;
    // Lambda_0 W = N/2 W + r W'
    double L0W(double r) const;
    // Lambda Lambda W
    double LLW(double r) const;

    // e^{i theta} W_lambda etc. sampled on a grid (critical scaling u_lambda = lambda^{-(N-2)/2} u(./lambda))
    Vec W_on(const RadialGrid& g, double lambda = 1.0) const;
    Vec LW_on(const RadialGrid& g, double lambda = 1.0) const;
    Vec L0W_on(const RadialGrid& g, double lambda = 1.0) const;
    Vec LLW_on(const RadialGrid& g, double lambda = 1.0) const;
    CVec phased(const RadialGrid& g, double theta, double lambda) const;
};

struct AmplitudeFit {
    double c0 = 0.0;
    double rho_min = 0.0, rho_max = 0.0;
    double spread = 0.0; // (max - min) / mean over the fit window
};

// Fits c0^2 as the constant ratio (-Delta W~)/((|x|^{-4} * W~^2) W~) with W~ = (1+r^2)^{-(N-2)/2};
// throws std::runtime_error when the ratio varies by more than `tol` on [r_lo, r_hi].
AmplitudeFit fit_amplitude(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap,
                           double r_lo = 1e-2, double r_hi = 1e2, double tol = 1e-5);

// ||Delta W + (|x|^{-4} * W^2) W||_{L^2} / ||Delta W||_{L^2}
double elliptic_residual(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap, const Bubble& b);

struct Constants {
    int N = 7;
    double c0 = 0.0;
    double C1 = 0.0, C2 = 0.0, C3 = 0.0;
    double normW2 = 0.0;
    double kappa = 0.0;
    double nu = 0.0, M = 0.0, rhoY = 0.0;

    // cross-check routes
    double C1_beta = 0.0;       // c0^2 |S^{N-1}| B(N/2,(N-4)/2)/2
    double C2_flux = 0.0;       // int -Delta W = (N-2) c0 |S^{N-1}|
    double C3_flux = 0.0;       // int Delta Lambda W = |S^{N-1}| c0 (N-2)^2/2
    double grad_W_sq = 0.0;     // int |grad W|^2
    double grad_W_sq_pot = 0.0; // int (|x|^{-4} * W^2) W^2
    double tail_bound = 0.0;    // largest truncation tail added to the quadratures above (relative)

    double grid_r_min = 0.0, grid_r_max = 0.0;
    long grid_points = 0;

    double kappa_formula() const;
};

double kappa_from(int N, double C1, double C2);

// Fills C1, C2, C3, kappa and the cross-checks. Throws std::runtime_error when
// C2 or C3 routes disagree by more than `tol` relative.
Constants compute_constants(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap,
                            const Bubble& b, double tol = 1e-5);

} // namespace hartree

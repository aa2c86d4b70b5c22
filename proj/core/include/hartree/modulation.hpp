#pragma once

#include "hartree/energy.hpp"

#include <array>
#include <string>

namespace hartree {

struct ModulationParams {
    double zeta = -1.5707963267948966;
    double mu = 1.0;
    double theta = 0.0;
    double lambda = 0.05;
};

struct ModulationState {
    double zeta = 0.0, mu = 1.0, theta = 0.0, lambda = 1.0;
    CVec g;
    ModeAmplitudes a;
    std::array<double, 4> residuals{}; // normalized orthogonality pairings at the solution
    int iterations = 0;
    double jacobian_cond = 0.0;

    ModulationParams params() const { return {zeta, mu, theta, lambda}; }
    TwoBubbleConfig config() const { return {zeta, mu, theta, lambda, g}; }
};

struct DecomposeOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double max_cond = 1e8;
};

// phase in (-pi, pi]
double wrap_phase(double a);

// Four pairings of the orthogonality conditions for g = u - e^{i zeta}W_mu - e^{i theta}W_lambda,
// each divided by ||constraint||_{L^2} ||W_scale||_{L^2}.
std::array<double, 4> orthogonality_residuals(const Lab& lab, const CVec& u, const ModulationParams& p);

// Newton iteration with the analytic Jacobian. Throws std::runtime_error on divergence or
// when the scaled Jacobian condition number exceeds max_cond.
ModulationState decompose(const Lab& lab, const CVec& u, const ModulationParams& guess, const DecomposeOptions& opt = {});

struct ModulationSystem {
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    Eigen::Vector4d B = Eigen::Vector4d::Zero();
    Eigen::Vector4d scaled_rates = Eigen::Vector4d::Zero(); // (mu^2 zeta', mu mu', lambda^2 theta', lambda lambda')
    double zeta_dot = 0.0, mu_dot = 0.0, theta_dot = 0.0, lambda_dot = 0.0;
    double K = 0.0;
    bool diagonally_dominant = false;
    double dominance_margin = 0.0; // min_i (|M_ii| - sum_{j != i} |M_ij|) / |M_ii|
};

// All sixteen M_ij, B_1..B_4 and K as in the row-by-row derivation; solves for the rates.
// Throws std::runtime_error when M is singular.
ModulationSystem assemble_system(const Lab& lab, const ModulationState& s);

struct ReducedRates {
    double lambda_dot = 0.0;
    double theta_dot = 0.0;
};
// lambda' = (3 C2 / C1) lambda^{(N-4)/2},  theta' = -(C3 / C1) theta lambda^{(N-6)/2} + K / (lambda^2 C1)
ReducedRates reduced_rates(const Constants& c, double theta, double lambda, double K);
// c |t|^{-(N-3)/(N-6)}, the allowed size of zeta' and mu'
double zeta_mu_rate_bound(int N, double t, double c);

struct ModeRates {
    double da1p = 0.0, da1m = 0.0, da2p = 0.0, da2m = 0.0;
    double envelope1 = 0.0, envelope2 = 0.0;
};
// +-nu/mu^2 a_1^{+-}, +-nu/lambda^2 a_2^{+-}; envelopes (c/mu^2)|t|^{-N/(2(N-6))}, (c/lambda^2)|t|^{-N/(2(N-6))}
ModeRates mode_rates(double nu, int N, double mu, double lambda, const ModeAmplitudes& a, double t, double c);

struct InitialBox {
    double lambda_center = 0.0, lambda_half = 0.0;
    double a_half = 0.0;
    bool contains(double lambda0, double a1, double a2) const;
};
// |lambda0 - kappa |T|^{-2/(N-6)}| <= 1/2 |T|^{-5/(2(N-6))},  |a_i| <= 1/2 |T|^{-N/(2(N-6))}
InitialBox initial_box(int N, double kappa, double T);

struct InitialData {
    CVec u, g0;
    double lambda0 = 0.0;
    std::array<double, 8> pairings{}; // orthogonality (4) then <alpha1^->, <alpha1^+>, <alpha2^->, <alpha2^+>
    double gram_cond = 0.0;
    double size_ratio = 0.0; // ||g0||_H1dot / |T|^{-N/(2(N-6))}
};
struct InitialOptions {
    double max_cond = 1e12;
    double size_constant = 1e6;  // bound on size_ratio
    double resolution = 100.0;   // require lambda0 >= resolution * r_min
};
// g0 in the span of {Lambda W, iW, i Lambda W_lambda0, -W_lambda0, alpha^{+-} at both scales}, least-norm in
// H1dot among solutions of the eight linear conditions. u(T) = -iW + W_lambda0 + g0.
InitialData build_initial_data(const Lab& lab, double T, double lambda0, double a1, double a2,
                               const InitialOptions& opt = {});

} // namespace hartree

#pragma once

#include "hartree/lab.hpp"
#include "hartree/nonlinear.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hartree {

// u = e^{i zeta} W_mu + e^{i theta} W_lambda + g
struct TwoBubbleConfig {
    double zeta = -1.5707963267948966;
    double mu = 1.0;
    double theta = 0.0;
    double lambda = 0.01;
    CVec g; // empty means zero
};

// |zeta + pi/2| + |mu - 1| + |theta| + lambda + ||g||_H1dot
double smallness_gauge(const Lab& lab, const TwoBubbleConfig& cfg);
void validate(const TwoBubbleConfig& cfg);

CVec bubble_one(const Lab& lab, const TwoBubbleConfig& cfg); // e^{i zeta} W_mu
CVec bubble_two(const Lab& lab, const TwoBubbleConfig& cfg); // e^{i theta} W_lambda
CVec two_bubble(const Lab& lab, const TwoBubbleConfig& cfg); // sum of both, without g
CVec assemble(const Lab& lab, const TwoBubbleConfig& cfg);   // with g

// ---- energy functional ----

// E(u) = 1/2 int |grad u|^2 - int F(u)
double energy(const Lab& lab, const CVec& u);
// DE(u) = -Delta u - f(u) as an L^2 gradient
CVec energy_gradient(const Lab& lab, const CVec& u);
// <DE(u), g> with the Dirichlet part taken in the symmetric quadratic form
double energy_derivative(const Lab& lab, const CVec& u, const CVec& g);
// <D^2E(u) g, h> = int grad g . grad h - <f'(u) g, h>
double energy_hessian(const Lab& lab, const CVec& u, const CVec& g, const CVec& h);
double energy_hessian(const Lab& lab, const CVec& u, const Vec& pot, const CVec& g, const CVec& h);

// f(z1 + z2) - f(z1) - f(z2) - f'(z1) z2 - f'(z2) z1, identically zero for the cubic Hartree term
CVec f_expansion_residual(const Lab& lab, const CVec& z1, const CVec& z2);
// int [F(z1+z2) - F(z1) - F(z2)] minus the integrated seven-term expansion; zero up to round-off
double F_expansion_residual(const Lab& lab, const CVec& z1, const CVec& z2);

struct GapResult {
    double gap = 0.0;   // E(e^{i zeta} W_mu + e^{i theta} W_lambda) - 2E(W)
    double model = 0.0; // C2 theta lambda^{(N-2)/2}
    double self_energy = 0.0; // E(e^{i zeta} W_mu) + E(e^{i theta} W_lambda) - 2 E(W) on this grid
    double gauge = 0.0;
};
// The interaction E(u1+u2) - E(u1) - E(u2) is evaluated from its exact cross terms so the
// O(1) bubble energies never cancel. Throws std::invalid_argument when the gauge exceeds max_gauge.
GapResult two_bubble_energy_gap(const Lab& lab, const TwoBubbleConfig& cfg, double max_gauge = 0.3);

// <DE(e^{i zeta} W_mu + e^{i theta} W_lambda), g>
double linear_term(const Lab& lab, const TwoBubbleConfig& cfg);

struct PiPsi {
    CVec pi, psi;
};
// Pi_r u freezes u(r) on |x| <= r, Psi_r u = u - Pi_r u.
PiPsi project_pi_psi(const Lab& lab, const CVec& u, double r_cut);

// ---- random fields and projections ----

struct BumpOptions {
    int bumps = 3;
    double r_lo = 0.0, r_hi = 0.0; // defaults: [10 r_min, r_max / 10]
    double width_lo = 0.15, width_hi = 0.6; // sigma / r0
};
// Sum of Gaussian bumps exp(-(r-r0)^2/sigma^2) e^{i phi}, r0 log-uniform.
CVec random_bumps(const Lab& lab, std::mt19937_64& rng, const BumpOptions& opt = {});
Vec random_real_bumps(const Lab& lab, std::mt19937_64& rng, const BumpOptions& opt = {});

// The four constraint fields: i e^{i zeta} Lambda W_mu, -e^{i zeta} W_mu, i e^{i theta} Lambda W_lambda, -e^{i theta} W_lambda
std::vector<CVec> orthogonality_fields(const Lab& lab, const TwoBubbleConfig& cfg);
// Removes the span of `fields` from g in the plain L^2 real pairing (Gram solve).
CVec project_out(const Lab& lab, const CVec& g, const std::vector<CVec>& fields);

struct ModeAmplitudes {
    double a1p = 0.0, a1m = 0.0, a2p = 0.0, a2m = 0.0;
    double sum_sq() const { return a1p * a1p + a1m * a1m + a2p * a2p + a2m * a2m; }
};
ModeAmplitudes mode_amplitudes(const Lab& lab, const TwoBubbleConfig& cfg, const CVec& g);

// ---- H_lambda and quadratic forms ----

// H g = -Delta g - f'(e^{i zeta} W_mu) g - f'(e^{i theta} W_lambda) g
CVec h_lambda_apply(const Lab& lab, const TwoBubbleConfig& cfg, const CVec& g);

struct QuadraticFormReport {
    int trials = 0;
    double lambda = 0.0;
    double eta = 0.0;
    double min_ratio = 0.0, max_ratio = 0.0; // (form + corrections) / ||g||^2_H1dot
    double min_form_ratio = 0.0;             // form alone
    double mean_correction_ratio = 0.0;
    int violations = 0;
    double max_orthogonality = 0.0; // worst |<constraint, g>| / (||constraint|| ||g||) after projection
    std::vector<double> ratios;
    std::vector<CVec> violating_fields;

    // with unstable directions deliberately mixed in
    double min_ratio_with_modes = 0.0;

    // real-field inequalities for L+ and L-, fitted as <g,Lg> + C P >= c ||g||^2
    double lp1_c = 0.0, lp1_C = 0.0;
    double lm1_c = 0.0, lm1_C = 0.0;
    // regional forms: smallest C making the inequality hold on every sample, with c fixed
    double regional_c = 0.05;
    double r1 = 0.0, r2 = 0.0;
    double lp2_C = 0.0, lm2_C = 0.0, lp3_C = 0.0, lm3_C = 0.0;
    double l1_c = 0.0, l1_C = 0.0, l2_C = 0.0, l3_C = 0.0; // complex-field versions at (theta, lambda)
    int regional_violations = 0;
};

struct CoercivityOptions {
    int trials = 500;
    std::uint64_t seed = 1;
    double eta = 0.2;
    double r1 = 10.0;
    double r2 = 0.1;
    double regional_c = 0.05;
    bool regional = true;
};

// Samples the corrected quadratic form 1/2 <D^2E g, g> + nu/(2M) sum (a^{+-})^2 over random
// projected g, plus the single-bubble inequalities. Trials run in parallel and merge by index.
QuadraticFormReport coercivity_suite(const Lab& lab, const TwoBubbleConfig& cfg, const CoercivityOptions& opt = {});

// Fits (c, C) in Q + C P >= c (all normalized by ||g||^2): c is half the smallest form value seen on
// samples with the constraint directions removed (Q_perp), C the smallest constant making every raw
// sample (Q, P) satisfy the inequality with that c. c <= 0 means no coercivity was observed.
struct CoercivityFit {
    double c = 0.0, C = 0.0;
    double min_perp = 0.0;
};
CoercivityFit fit_coercivity(const std::vector<double>& Q_perp, const std::vector<double>& Q, const std::vector<double>& P);

} // namespace hartree

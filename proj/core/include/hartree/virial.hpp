#pragma once

#include "hartree/energy.hpp"
#include "hartree/modulation.hpp"

#include <string>
#include <vector>

namespace hartree {

// Septic smoothstep sigma(s): 1 for s <= 0, 0 for s >= 1, C^3 in between. k-th derivative for k = 0..3.
double cutoff_sigma(double s, int k = 0);

struct WeightAudit {
    // margins are >= 0 when the property holds; *_logr is log of the radius of the worst node
    double p1 = 0.0, p1_logr = 0.0; // -max |q - r^2/2| / (r^2/2) on r <= R
    double p2 = 0.0, p2_logr = 0.0; // -max q'/r on r >= R~
    double p3_grad = 0.0;           // max q'/r
    double p3_lap = 0.0;            // max |Delta q|
    double p4 = 0.0, p4_logr = 0.0; // min(q'', q'/r) + c
    double p5 = 0.0, p5_logr = 0.0; // c - max r^2 Delta^2 q
    int nodes = 0;
    bool ok() const;
};

// q' = r on r <= R and r sigma(log(r/R)/L) beyond, L = log(R~/R) = Theta/c.
// R~ itself can overflow a double for small c; every sampler works from log r.
class VirialWeight {
public:
    VirialWeight(int N, double c, double R, double Theta);

    int dim() const { return N_; }
    double c() const { return c_; }
    double R() const { return R_; }
    double Theta() const { return Theta_; }
    double L() const { return L_; }
    double log_R_tilde() const { return std::log(R_) + L_; }
    double R_tilde() const { return std::exp(log_R_tilde()); }

    double q(double r) const;
    double dq(double r) const;     // q'(r)
    double dq_over_r(double r) const;
    double d2q(double r) const;    // q''(r)
    double lap(double r) const;    // Delta q
    double bilap(double r) const;  // Delta^2 q
    double r2_bilap(double r) const;

    // Audit on a uniform grid in s = log(r/R)/L over [-0.5, 1.5] (nodes points) plus log-spaced nodes in r <= R.
    WeightAudit audit(int nodes = 200001) const;

private:
    double s_of(double r) const { return std::log(r / R_) / L_; }
    int N_;
    double c_, R_, Theta_, L_;
};

// Requires 0 < c <= 0.1 and R >= 1. Theta starts at 1 and grows by 1.5x until the audit passes;
// throws std::runtime_error naming the violated property and location if it never does.
VirialWeight build_weight(int N, double c, double R, int audit_nodes = 200001);

// Lambda_0 h = N/2 h + r h_r as r^{-N/2} D (r^{N/2} h) with D the antisymmetric sixth-order
// central difference in log r, so Lambda_0 is skew in the L^2(R^N) pairing up to the flux through
// the grid ends. Ghost values follow the even law at the origin and r^{-(N-2)} decay past r_max.
CVec apply_Lambda0(const RadialGrid& grid, const CVec& h);
// Lambda h = Lambda_0 h - h
CVec apply_Lambda(const RadialGrid& grid, const CVec& h);

// [A(lambda) h](r)  = (N-2)/(2N lambda^2) Delta q(r/lambda) h + lambda^{-1} q'(r/lambda) h_r
// [A0(lambda) h](r) = 1/(2 lambda^2)       Delta q(r/lambda) h + lambda^{-1} q'(r/lambda) h_r
// A0 is assembled as lambda^{-2} (sigma Lambda_0 + Lambda_0 sigma)/2 with sigma = q'(rho)/rho, which
// keeps it skew; on r <= R lambda both reduce to lambda^{-2} Lambda_0 and lambda^{-2} Lambda.
CVec apply_A(const RadialGrid& grid, double lambda, const VirialWeight& w, const CVec& h);
CVec apply_A0(const RadialGrid& grid, double lambda, const VirialWeight& w, const CVec& h);

struct PohozaevResult {
    double lhs = 0.0;    // <A0(lambda) h, Delta h>
    double rhs = 0.0;    // (c0/lambda^2) ||h||^2_H1dot - lambda^{-2} int_{|x| <= R lambda} |grad h|^2
    double margin = 0.0; // rhs - lhs
};
PohozaevResult pohozaev_check(const Lab& lab, double lambda, const VirialWeight& w, const CVec& h, double c0);

struct PohozaevAudit {
    int trials = 0;
    int violations = 0;
    double min_margin = 0.0; // normalized by lambda^{-2} ||h||^2_H1dot
};
PohozaevAudit pohozaev_audit(const Lab& lab, double lambda, const VirialWeight& w, double c0, int trials,
                             std::uint64_t seed = 1);

// <h1, A0 h2> + <A0 h1, h2> and the scale ||h1|| ||A0 h2|| + ||A0 h1|| ||h2||
struct AntisymmetryResult {
    double defect = 0.0;
    double scale = 0.0;
};
AntisymmetryResult a0_antisymmetry(const Lab& lab, double lambda, const VirialWeight& w, const CVec& h1, const CVec& h2);

struct PsiValue {
    double psi = 0.0;
    double correction = 0.0;    // <g, i A0(lambda) g> / (2 ||W||^2_{L^2})
    double imag_residue = 0.0;  // |Im int conj(g) i A0 g| / (||g|| ||A0 g||)
};
PsiValue psi(const Lab& lab, const VirialWeight& w, const ModulationState& s);

struct PsiSample {
    double t = 0.0;
    double psi = 0.0;
};
struct PsiRateReport {
    int samples = 0;
    double min_rate = 0.0;  // smallest centred-difference psi'
    double c1 = 0.0;        // smallest c1 with psi' >= -c1 |t|^{-(N-5)/(N-6)} at every sample
    int violations = 0;     // samples below -c1_bound |t|^{-(N-5)/(N-6)}
};
// Throws std::invalid_argument for fewer than three samples or non-increasing times.
PsiRateReport psi_rate_audit(int N, const std::vector<PsiSample>& traj, double c1_bound);

struct LambdaIdentity {
    double lhs = 0.0; // <Lambda u, f(u+v) - f(u) - f'(u) v>
    double rhs = 0.0; // -<Lambda v, f(u+v) - f(u)>
    double residual = 0.0; // |lhs - rhs| / max(|lhs|, |rhs|), 0 when both vanish
};
LambdaIdentity lambda_identity_check(const Lab& lab, const CVec& u, const CVec& v);

struct ByPartsDefect {
    double lhs = 0.0; // <A(lambda) u, f(u+g) - f(u) - f'(u) g>
    double rhs = 0.0; // -<A(lambda) g, f(u+g) - f(u)>
    double defect = 0.0;  // |lhs - rhs|
    double g_sq = 0.0;    // ||g||^2_H1dot
};
// u = e^{i zeta} W_mu + e^{i theta} W_lambda, v = cfg.g
ByPartsDefect by_parts_defect(const Lab& lab, const VirialWeight& w, const TwoBubbleConfig& cfg);

} // namespace hartree

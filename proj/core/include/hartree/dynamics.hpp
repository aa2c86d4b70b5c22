#pragma once

#include "hartree/modulation.hpp"

#include <Eigen/SparseLU>

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace hartree {

// ---- full radial PDE ----

struct EvolutionConfig {
    double dt = 1e-4;
    double t_start = 0.0;
    double t_end = 1e-2;
    int splitting = 2;        // 1 Lie, 2 Strang, 4 Yoshida triple jump of Strang steps
    int record_every = 10;    // steps between stored frames
    bool nonlinear = true;
    double blowup = 1e6;      // sup-norm sentinel
};

// 2 / (Gershgorin bound of -Delta): the step an explicit scheme would need on this grid.
double explicit_dt_bound(const Laplacian& lap);

// One step of i u_t + Delta u + (|x|^{-4} * |u|^2) u = 0. The potential substep multiplies by
// exp(i tau V) with V from the current modulus (exact); the linear substep is Crank-Nicolson in the
// symmetrically scaled form (I + i tau/2 w^{-1/2} S w^{-1/2}) v' = (I - i tau/2 ...) v, v = w^{1/2} u.
class SplitStepper {
public:
    SplitStepper(const Lab& lab, double dt, int splitting, bool nonlinear);
    void step(CVec& u) const;
    double dt() const { return dt_; }

private:
    struct Cayley {
        Eigen::SparseMatrix<cplx> minus;
        std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> lu;
    };
    Cayley factor(double tau) const;
    void linear(CVec& u, const Cayley& c) const;
    void potential(CVec& u, double tau) const;
    void strang(CVec& u, double h, const Cayley& half) const;

    const Lab* lab_;
    double dt_;
    int splitting_;
    bool nonlinear_;
    Vec sqw_;
    std::vector<Cayley> cayley_;
};

struct PdeTrajectory {
    std::vector<double> t;
    std::vector<CVec> u;
    std::vector<double> energy;
    int steps = 0;
    bool blew_up = false;
    double dt_explicit = 0.0;
    double max_energy_drift = 0.0; // max |E(t) - E(0)| / |E(0)| over stored frames
};

// Throws std::invalid_argument on dt <= 0, t_end <= t_start, splitting outside {1, 2, 4} or a size mismatch.
PdeTrajectory evolve_pde(const Lab& lab, const CVec& u0, const EvolutionConfig& cfg);

// ---- bootstrap bookkeeping ----

struct BootstrapSample {
    double t = 0.0;
    double zeta = 0.0, mu = 1.0, theta = 0.0, lambda = 0.0;
    double g_norm = 0.0;
    double log_a1p = -std::numeric_limits<double>::infinity();
    double log_a2p = -std::numeric_limits<double>::infinity();
};

// Normalized slacks 1 - value/bound for the hypotheses and 1/2 - value/bound for the improved
// bounds (both >= 0 when the inequality holds). Order: zeta, mu, theta, lambda, g, a1+, a2+.
inline constexpr int kBounds = 7;
extern const std::array<const char*, kBounds> kBoundNames;

struct BootstrapStep {
    double t = 0.0;
    std::array<double, kBounds> hypothesis{};
    std::array<double, kBounds> improved{};
    std::array<double, kBounds> ratio{}; // value / bound
};

struct BootstrapMonitor {
    std::vector<BootstrapStep> steps;
    bool hypotheses_hold = true;
    bool improved_hold = true;
    double first_violation_t = std::numeric_limits<double>::quiet_NaN();
    std::string first_violation;
    double first_improved_violation_t = std::numeric_limits<double>::quiet_NaN();
    std::string first_improved_violation;
    std::array<double, kBounds> min_hypothesis{};
    std::array<double, kBounds> min_improved{};
    std::array<double, kBounds> max_ratio{};
};

// bounds: |zeta + pi/2|, |mu - 1| <= |t|^{-3/(N-6)}, |theta| <= |t|^{-1/(N-6)},
// |lambda - kappa |t|^{-2/(N-6)}| <= |t|^{-5/(2(N-6))}, ||g|| <= |t|^{-(N-1)/(2(N-6))}, |a^+| <= |t|^{-N/(2(N-6))}
BootstrapMonitor monitor_bootstrap(int N, double kappa, const std::vector<BootstrapSample>& samples);

// ---- modulation tracking of PDE frames ----

struct TrackedFrame {
    double t = 0.0;
    ModulationState s;
};
struct ModulationTrack {
    std::vector<TrackedFrame> frames;
    bool truncated = false;
    std::string diagnostic;
};
// Decomposes each frame with the previous solution as the starting guess.
ModulationTrack track_modulation(const Lab& lab, const PdeTrajectory& traj, const ModulationParams& guess,
                                 const DecomposeOptions& opt = {});
// Converts a track to bootstrap samples with t shifted by t_offset (PDE time 0 = paper time T).
std::vector<BootstrapSample> bootstrap_samples(const Lab& lab, const ModulationTrack& track, double t_offset);

// ---- reduced modulation + mode system ----

struct ReducedInitial {
    double zeta = -1.5707963267948966, mu = 1.0, theta = 0.0, lambda = 0.0;
    double a1p = 0.0, a1m = 0.0, a2p = 0.0, a2m = 0.0;
};

enum class KClosure { Zero, ModeQuadratic };

struct ReducedOptions {
    double rtol = 1e-12;
    double atol = 1e-300;
    int outputs = 200;          // stored states, log-spaced in |t| between T and t_end
    KClosure closure = KClosure::Zero;
    double kappa_K = 0.0;       // K = kappa_K (a2+^2 + a2-^2) under ModeQuadratic
    bool direct_modes = false;  // integrate a^{+-} themselves instead of their logarithms
    bool freeze_lambda = false; // lambda' = 0 (closed-form mode oracle)
    bool stop_on_exit = false;  // stop at the first violated improved bound among lambda, a1+, a2+
    double min_step = 1e-14;    // relative to |t|; smaller accepted steps abort the run
};

struct ReducedState {
    double t = 0.0;
    double zeta = 0.0, mu = 1.0, theta = 0.0, lambda = 0.0;
    // a = sign * exp(log_abs); a holds the product when it is representable
    std::array<double, 4> log_abs{}; // a1+, a1-, a2+, a2-
    std::array<int, 4> sign{};
    ModeAmplitudes a;
    double phi1 = 0.0, phi2 = 0.0;   // int nu/mu^2, int nu/lambda^2 from T
};

struct ReducedTrajectory {
    std::vector<ReducedState> states;
    bool step_underflow = false;
    bool stopped_on_exit = false;
    std::string closure_label;
    int accepted_steps = 0, rejected_steps = 0;
};

// lambda' = (3 C2/C1) lambda^{(N-4)/2}, theta' = -(C3/C1) theta lambda^{(N-6)/2} + K/(lambda^2 C1),
// zeta' = mu' = 0, a1^{+-}' = +-nu/mu^2 a1^{+-}, a2^{+-}' = +-nu/lambda^2 a2^{+-}. Dormand-Prince 5(4)
// with lambda carried as log lambda. Throws std::invalid_argument unless T < t_end < 0 and lambda > 0.
ReducedTrajectory integrate_reduced(const Constants& c, double T, const ReducedInitial& init, double t_end,
                                    const ReducedOptions& opt = {});

// Bootstrap samples from a reduced run; ||g|| is proxied by sum |a| ||cY||_H1dot.
std::vector<BootstrapSample> bootstrap_samples(const ReducedTrajectory& traj, double cY_norm);

// ||cY^{+-}||_H1dot (scale and phase invariant); the two signs agree.
double mode_field_norm(const Lab& lab);

// ---- shooting over the initial box ----

struct ShootOptions {
    double t_end = 0.0;          // 0 means T/10
    int samples = 64;            // per axis
    int refine = 80;             // bisection steps inside a sign-change bracket
    double lambda_floor = 1e-3;  // lower lambda face clipped to this fraction of the box centre
    ReducedOptions ode;
    double cY_norm = 0.0;
};

struct FaceExit {
    std::string face;   // e.g. "a2+ upper"
    bool exited = false;
    std::string bound;  // first improved bound crossed
    int sign = 0;       // sign of the exiting coordinate
    double t_exit = 0.0;
    bool outward = false;
};

struct AxisSearch {
    std::string axis;
    double lo = 0.0, hi = 0.0;        // searched interval
    double bracket_lo = 0.0, bracket_hi = 0.0; // smallest sampled interval containing every survivor
    int survivors = 0;
    std::vector<int> classes;         // per sample: -1 lower exit, +1 upper exit, 0 survives
};

struct ShootResult {
    double T = 0.0, t_end = 0.0;
    InitialBox box;
    bool lambda_face_clipped = false;
    double lambda0 = 0.0, a1 = 0.0, a2 = 0.0;
    bool survived = false;
    std::array<AxisSearch, 3> axes;
    std::vector<FaceExit> faces;
    BootstrapMonitor monitor;
    ReducedTrajectory trajectory;
    int evaluations = 0;
};

// Coordinate-wise search (lambda0, then a1, then a2) over the box: each axis is sampled at `samples`
// points in parallel, classified by the sign of the first exit through its own improved bound, and
// the sign change is refined by bisection. Faces of every axis are then started on to check that
// they leave outward.
ShootResult shoot(const Constants& c, double T, const ShootOptions& opt = {});

} // namespace hartree

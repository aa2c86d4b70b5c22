#include "hartree/dynamics.hpp"

#include "hartree/parallel.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hartree {

namespace odeint = boost::numeric::odeint;

// ---- PDE ----

double explicit_dt_bound(const Laplacian& lap) {
    const auto& S = lap.stiffness();
    const Vec& w = lap.grid().w();
    double worst = 0.0;
    for (Index j = 0; j < S.outerSize(); ++j) {
        double sum = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(S, j); it; ++it) sum += std::abs(it.value());
        worst = std::max(worst, sum / w(j));
    }
    return 2.0 / worst;
}

namespace {

// triple-jump weights for composing a symmetric second-order step into a fourth-order one
const double kYoshida1 = 1.0 / (2.0 - std::cbrt(2.0));
const double kYoshida0 = -std::cbrt(2.0) / (2.0 - std::cbrt(2.0));

} // namespace

SplitStepper::SplitStepper(const Lab& lab, double dt, int splitting, bool nonlinear)
    : lab_(&lab), dt_(dt), splitting_(splitting), nonlinear_(nonlinear) {
    if (!(dt > 0.0)) throw std::invalid_argument("SplitStepper: dt must be positive");
    if (splitting != 1 && splitting != 2 && splitting != 4)
        throw std::invalid_argument("SplitStepper: splitting must be 1, 2 or 4");
    sqw_ = lab.grid().w().cwiseSqrt();
    if (splitting == 1) cayley_.push_back(factor(dt));
    else if (splitting == 2) cayley_.push_back(factor(0.5 * dt));
    else {
        cayley_.push_back(factor(0.5 * kYoshida1 * dt));
        cayley_.push_back(factor(0.5 * kYoshida0 * dt));
    }
}

SplitStepper::Cayley SplitStepper::factor(double tau) const {
    const auto& S = lab_->lap().stiffness();
    const Index n = sqw_.size();
    std::vector<Eigen::Triplet<cplx>> tp, tm;
    tp.reserve(S.nonZeros() + n);
    tm.reserve(S.nonZeros() + n);
    const cplx half(0.0, 0.5 * tau);
    for (Index j = 0; j < S.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(S, j); it; ++it) {
            const double b = it.value() / (sqw_(it.row()) * sqw_(it.col()));
            tp.emplace_back(it.row(), it.col(), half * b);
            tm.emplace_back(it.row(), it.col(), -half * b);
        }
    for (Index i = 0; i < n; ++i) {
        tp.emplace_back(i, i, 1.0);
        tm.emplace_back(i, i, 1.0);
    }
    Eigen::SparseMatrix<cplx> plus(n, n);
    Cayley c;
    c.minus.resize(n, n);
    plus.setFromTriplets(tp.begin(), tp.end());
    c.minus.setFromTriplets(tm.begin(), tm.end());
    c.lu = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>>();
    c.lu->compute(plus);
    if (c.lu->info() != Eigen::Success) throw std::runtime_error("SplitStepper: factorization failed");
    return c;
}

void SplitStepper::linear(CVec& u, const Cayley& c) const {
    const CVec v = sqw_.cast<cplx>().cwiseProduct(u);
    const CVec rhs = c.minus * v;
    const CVec next = c.lu->solve(rhs);
    u = next.cwiseQuotient(sqw_.cast<cplx>());
}

void SplitStepper::potential(CVec& u, double tau) const {
    const Vec V = hartree::potential(lab_->kernel(), u);
    for (Index i = 0; i < u.size(); ++i) u(i) *= std::polar(1.0, tau * V(i));
}

void SplitStepper::strang(CVec& u, double h, const Cayley& half) const {
    linear(u, half);
    if (nonlinear_) potential(u, h);
    linear(u, half);
}

void SplitStepper::step(CVec& u) const {
    switch (splitting_) {
    case 1:
        if (nonlinear_) potential(u, dt_);
        linear(u, cayley_[0]);
        break;
    case 2: strang(u, dt_, cayley_[0]); break;
    default:
        strang(u, kYoshida1 * dt_, cayley_[0]);
        strang(u, kYoshida0 * dt_, cayley_[1]);
        strang(u, kYoshida1 * dt_, cayley_[0]);
    }
}

PdeTrajectory evolve_pde(const Lab& lab, const CVec& u0, const EvolutionConfig& cfg) {
    if (u0.size() != lab.grid().size()) throw std::invalid_argument("evolve_pde: u0 is not on the lab grid");
    if (!(cfg.t_end > cfg.t_start)) throw std::invalid_argument("evolve_pde: need t_end > t_start");
    if (cfg.record_every < 1) throw std::invalid_argument("evolve_pde: record_every must be >= 1");
    SplitStepper stepper(lab, cfg.dt, cfg.splitting, cfg.nonlinear);
    const long nsteps = std::max(1L, std::lround((cfg.t_end - cfg.t_start) / cfg.dt));

    auto measure = [&](const CVec& u) {
        return cfg.nonlinear ? energy(lab, u) : 0.5 * lab.lap().dirichlet(u);
    };
    PdeTrajectory tr;
    tr.dt_explicit = explicit_dt_bound(lab.lap());
    CVec u = u0;
    const double E0 = measure(u);
    auto record = [&](double t) {
        tr.t.push_back(t);
        tr.u.push_back(u);
        const double E = measure(u);
        tr.energy.push_back(E);
        const double scale = std::abs(E0) > 0.0 ? std::abs(E0) : 1.0;
        tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(E - E0) / scale);
    };
    record(cfg.t_start);
    for (long n = 1; n <= nsteps; ++n) {
        stepper.step(u);
        tr.steps = int(n);
        const double t = cfg.t_start + double(n) * cfg.dt;
        const double sup = u.cwiseAbs().maxCoeff();
        if (!(sup <= cfg.blowup)) {
            tr.blew_up = true;
            tr.t.push_back(t);
            tr.u.push_back(u);
            tr.energy.push_back(std::numeric_limits<double>::quiet_NaN());
            break;
        }
        if (n % cfg.record_every == 0 || n == nsteps) record(t);
    }
    return tr;
}

// ---- bootstrap ----

const std::array<const char*, kBounds> kBoundNames = {"zeta", "mu", "theta", "lambda", "g", "a1+", "a2+"};

namespace {

struct Bounds {
    double zeta, theta, lambda, g, a;
    double lambda_centre;
};

Bounds bounds_at(int N, double kappa, double t) {
    if (!(t < 0.0)) throw std::invalid_argument("bootstrap bounds need t < 0");
    const double e = N - 6.0, at = std::abs(t);
    return {std::pow(at, -3.0 / e), std::pow(at, -1.0 / e), std::pow(at, -5.0 / (2.0 * e)),
            std::pow(at, -(N - 1.0) / (2.0 * e)), std::pow(at, -N / (2.0 * e)), kappa * std::pow(at, -2.0 / e)};
}

double log_ratio_to_ratio(double lr) { return lr > 700.0 ? std::exp(700.0) : std::exp(lr); }

} // namespace

BootstrapMonitor monitor_bootstrap(int N, double kappa, const std::vector<BootstrapSample>& samples) {
    BootstrapMonitor m;
    m.min_hypothesis.fill(std::numeric_limits<double>::infinity());
    m.min_improved.fill(std::numeric_limits<double>::infinity());
    m.max_ratio.fill(0.0);
    for (const BootstrapSample& s : samples) {
        const Bounds b = bounds_at(N, kappa, s.t);
        BootstrapStep st;
        st.t = s.t;
        st.ratio[0] = std::abs(s.zeta + 0.5 * std::numbers::pi) / b.zeta;
        st.ratio[1] = std::abs(s.mu - 1.0) / b.zeta;
        st.ratio[2] = std::abs(s.theta) / b.theta;
        st.ratio[3] = std::abs(s.lambda - b.lambda_centre) / b.lambda;
        st.ratio[4] = s.g_norm / b.g;
        st.ratio[5] = log_ratio_to_ratio(s.log_a1p - std::log(b.a));
        st.ratio[6] = log_ratio_to_ratio(s.log_a2p - std::log(b.a));
        for (int k = 0; k < kBounds; ++k) {
            st.hypothesis[k] = 1.0 - st.ratio[k];
            st.improved[k] = 0.5 - st.ratio[k];
            m.min_hypothesis[k] = std::min(m.min_hypothesis[k], st.hypothesis[k]);
            m.min_improved[k] = std::min(m.min_improved[k], st.improved[k]);
            m.max_ratio[k] = std::max(m.max_ratio[k], st.ratio[k]);
            if (st.hypothesis[k] < 0.0 && m.hypotheses_hold) {
                m.hypotheses_hold = false;
                m.first_violation_t = s.t;
                m.first_violation = kBoundNames[k];
            }
            if (st.improved[k] < 0.0 && m.improved_hold) {
                m.improved_hold = false;
                m.first_improved_violation_t = s.t;
                m.first_improved_violation = kBoundNames[k];
            }
        }
        m.steps.push_back(st);
    }
    return m;
}

ModulationTrack track_modulation(const Lab& lab, const PdeTrajectory& traj, const ModulationParams& guess,
                                 const DecomposeOptions& opt) {
    ModulationTrack tr;
    ModulationParams p = guess;
    for (std::size_t k = 0; k < traj.u.size(); ++k) {
        try {
            ModulationState s = decompose(lab, traj.u[k], p, opt);
            p = s.params();
            tr.frames.push_back({traj.t[k], std::move(s)});
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "frame " << k << " at t = " << traj.t[k] << ": " << e.what();
            tr.truncated = true;
            tr.diagnostic = os.str();
            break;
        }
    }
    return tr;
}

std::vector<BootstrapSample> bootstrap_samples(const Lab& lab, const ModulationTrack& track, double t_offset) {
    std::vector<BootstrapSample> out;
    out.reserve(track.frames.size());
    for (const TrackedFrame& f : track.frames) {
        BootstrapSample b;
        b.t = f.t + t_offset;
        b.zeta = f.s.zeta;
        b.mu = f.s.mu;
        b.theta = f.s.theta;
        b.lambda = f.s.lambda;
        b.g_norm = std::sqrt(lab.lap().dirichlet(f.s.g));
        b.log_a1p = std::log(std::abs(f.s.a.a1p));
        b.log_a2p = std::log(std::abs(f.s.a.a2p));
        out.push_back(b);
    }
    return out;
}

double mode_field_norm(const Lab& lab) {
    const AlphaFields y = cY_fields(lab.eigen(), lab.grid(), 0.0, 1.0);
    return std::sqrt(lab.lap().dirichlet(y.plus));
}

// ---- reduced system ----

namespace {

using State = std::vector<double>;
// layout: zeta, mu, theta, log lambda, phi1, phi2, then a1+, a1-, a2+, a2- (direct mode only)
constexpr int kLogLambda = 3, kPhi1 = 4, kPhi2 = 5, kA = 6;

struct Exit {
    int axis = -1; // 0 lambda, 1 a1+, 2 a2+
    int sign = 0;
};

Exit first_exit(int N, double kappa, const ReducedState& s) {
    const Bounds b = bounds_at(N, kappa, s.t);
    const double dl = s.lambda - b.lambda_centre;
    if (std::abs(dl) > 0.5 * b.lambda) return {0, dl > 0 ? 1 : -1};
    const double la = std::log(0.5 * b.a);
    if (s.log_abs[0] > la) return {1, s.sign[0]};
    if (s.log_abs[2] > la) return {2, s.sign[2]};
    return {};
}

} // namespace

ReducedTrajectory integrate_reduced(const Constants& c, double T, const ReducedInitial& init, double t_end,
                                    const ReducedOptions& opt) {
    if (!(T < t_end && t_end < 0.0)) throw std::invalid_argument("integrate_reduced: need T < t_end < 0");
    if (!(init.lambda > 0.0 && init.mu > 0.0)) throw std::invalid_argument("integrate_reduced: need lambda, mu > 0");
    if (opt.outputs < 2) throw std::invalid_argument("integrate_reduced: need at least two outputs");
    const int N = c.N;
    const double nu = c.nu;
    if (!(nu > 0.0)) throw std::invalid_argument("integrate_reduced: constants lack the eigenvalue nu");

    ReducedTrajectory tr;
    tr.closure_label = opt.closure == KClosure::Zero ? "K=0" : "K=kappa_K*(a2+^2+a2-^2)";
    const std::array<double, 4> a0 = {init.a1p, init.a1m, init.a2p, init.a2m};

    State y(opt.direct_modes ? 10 : 6, 0.0);
    y[0] = init.zeta;
    y[1] = init.mu;
    y[2] = init.theta;
    y[kLogLambda] = std::log(init.lambda);
    if (opt.direct_modes)
        for (int k = 0; k < 4; ++k) y[kA + k] = a0[k];

    auto unpack = [&](const State& s, double t) {
        ReducedState r;
        r.t = t;
        r.zeta = s[0];
        r.mu = s[1];
        r.theta = s[2];
        r.lambda = std::exp(s[kLogLambda]);
        r.phi1 = s[kPhi1];
        r.phi2 = s[kPhi2];
        const std::array<double, 4> growth = {r.phi1, -r.phi1, r.phi2, -r.phi2};
        for (int k = 0; k < 4; ++k) {
            if (opt.direct_modes) {
                const double v = s[kA + k];
                r.sign[k] = v > 0 ? 1 : (v < 0 ? -1 : 0);
                r.log_abs[k] = std::log(std::abs(v));
            } else {
                r.sign[k] = a0[k] > 0 ? 1 : (a0[k] < 0 ? -1 : 0);
                r.log_abs[k] = std::log(std::abs(a0[k])) + growth[k];
            }
        }
        auto val = [&](int k) { return r.sign[k] == 0 ? 0.0 : r.sign[k] * std::exp(std::min(r.log_abs[k], 709.0)); };
        r.a = {val(0), val(1), val(2), val(3)};
        return r;
    };

    auto rhs = [&](const State& s, State& d, double /*t*/) {
        const double lam = std::exp(s[kLogLambda]);
        const double mu = s[1];
        double K = 0.0;
        if (opt.closure == KClosure::ModeQuadratic) {
            double q = 0.0;
            if (opt.direct_modes) q = s[kA + 2] * s[kA + 2] + s[kA + 3] * s[kA + 3];
            else
                for (int k : {2, 3})
                    if (a0[k] != 0.0)
                        q += std::exp(std::min(2.0 * (std::log(std::abs(a0[k])) + (k == 2 ? s[kPhi2] : -s[kPhi2])), 1400.0));
            K = opt.kappa_K * q;
        }
        const ReducedRates rr = reduced_rates(c, s[2], lam, K);
        d[0] = 0.0;
        d[1] = 0.0;
        d[2] = rr.theta_dot;
        d[kLogLambda] = opt.freeze_lambda ? 0.0 : rr.lambda_dot / lam;
        d[kPhi1] = nu / (mu * mu);
        d[kPhi2] = nu / (lam * lam);
        if (opt.direct_modes) {
            d[kA + 0] = d[kPhi1] * s[kA + 0];
            d[kA + 1] = -d[kPhi1] * s[kA + 1];
            d[kA + 2] = d[kPhi2] * s[kA + 2];
            d[kA + 3] = -d[kPhi2] * s[kA + 3];
        }
    };

    // observation times, log-spaced in |t|
    std::vector<double> obs(opt.outputs);
    const double l0 = std::log(-T), l1 = std::log(-t_end);
    for (int k = 0; k < opt.outputs; ++k) obs[k] = -std::exp(l0 + (l1 - l0) * k / (opt.outputs - 1));
    obs.front() = T;
    obs.back() = t_end;

    auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
    double t = T;
    double dt = (t_end - T) * 1e-6;
    tr.states.push_back(unpack(y, t));
    if (opt.stop_on_exit && first_exit(N, c.kappa, tr.states.back()).axis >= 0) {
        tr.stopped_on_exit = true;
        return tr;
    }
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const double target = obs[k];
        while (t < target) {
            double h = std::min(dt, target - t);
            const bool last = h == target - t;
            const auto res = stepper.try_step(rhs, y, t, h);
            if (res == odeint::fail) {
                ++tr.rejected_steps;
                dt = h;
                if (dt < opt.min_step * std::abs(t)) {
                    tr.step_underflow = true;
                    tr.states.push_back(unpack(y, t));
                    return tr;
                }
                continue;
            }
            ++tr.accepted_steps;
            if (last) t = target; // land exactly on the observation time
            dt = h;
            if (opt.stop_on_exit) {
                ReducedState r = unpack(y, t);
                if (first_exit(N, c.kappa, r).axis >= 0) {
                    tr.states.push_back(r);
                    tr.stopped_on_exit = true;
                    return tr;
                }
            }
        }
        tr.states.push_back(unpack(y, t));
    }
    return tr;
}

std::vector<BootstrapSample> bootstrap_samples(const ReducedTrajectory& traj, double cY_norm) {
    const double norm = cY_norm > 0.0 ? cY_norm : 1.0;
    std::vector<BootstrapSample> out;
    out.reserve(traj.states.size());
    for (const ReducedState& s : traj.states) {
        BootstrapSample b;
        b.t = s.t;
        b.zeta = s.zeta;
        b.mu = s.mu;
        b.theta = s.theta;
        b.lambda = s.lambda;
        double g = 0.0;
        for (int k = 0; k < 4; ++k)
            if (s.sign[k] != 0) g += std::exp(std::min(s.log_abs[k], 700.0));
        b.g_norm = norm * g;
        b.log_a1p = s.log_abs[0];
        b.log_a2p = s.log_abs[2];
        out.push_back(b);
    }
    return out;
}

// ---- shooting ----

namespace {

struct Evaluation {
    Exit exit;
    double t_exit = 0.0;
};

} // namespace

ShootResult shoot(const Constants& c, double T, const ShootOptions& opt) {
    if (!(T < 0.0)) throw std::invalid_argument("shoot: need T < 0");
    if (opt.samples < 3) throw std::invalid_argument("shoot: need at least three samples per axis");
    ShootResult res;
    res.T = T;
    res.t_end = opt.t_end != 0.0 ? opt.t_end : T / 10.0;
    if (!(T < res.t_end && res.t_end < 0.0)) throw std::invalid_argument("shoot: need T < t_end < 0");
    res.box = initial_box(c.N, c.kappa, T);

    ReducedOptions ode = opt.ode;
    ode.stop_on_exit = true;
    ode.outputs = std::max(ode.outputs, 2);
    std::atomic<int> evals{0};

    auto evaluate = [&](double l0, double a1, double a2) {
        ReducedInitial in;
        in.lambda = l0;
        in.a1p = a1;
        in.a2p = a2;
        const ReducedTrajectory tr = integrate_reduced(c, T, in, res.t_end, ode);
        ++evals;
        Evaluation e;
        if (tr.stopped_on_exit) {
            e.exit = first_exit(c.N, c.kappa, tr.states.back());
            e.t_exit = tr.states.back().t;
        }
        return e;
    };

    double lam_lo = res.box.lambda_center - res.box.lambda_half;
    const double lam_floor = opt.lambda_floor * res.box.lambda_center;
    if (lam_lo < lam_floor) {
        lam_lo = lam_floor;
        res.lambda_face_clipped = true;
    }
    const double lam_hi = res.box.lambda_center + res.box.lambda_half;
    std::array<double, 3> point = {res.box.lambda_center, 0.0, 0.0};
    const std::array<std::pair<double, double>, 3> range = {
        std::make_pair(lam_lo, lam_hi), std::make_pair(-res.box.a_half, res.box.a_half),
        std::make_pair(-res.box.a_half, res.box.a_half)};
    const std::array<const char*, 3> names = {"lambda0", "a1", "a2"};

    auto classify = [&](int axis, const std::array<double, 3>& p) {
        const Evaluation e = evaluate(p[0], p[1], p[2]);
        if (e.exit.axis < 0) return 0;
        return e.exit.axis == axis ? e.exit.sign : 2;
    };

    bool all_found = true;
    for (int axis = 0; axis < 3; ++axis) {
        AxisSearch& ax = res.axes[axis];
        ax.axis = names[axis];
        ax.lo = range[axis].first;
        ax.hi = range[axis].second;
        const int n = opt.samples;
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = ax.lo + (ax.hi - ax.lo) * double(i) / double(n - 1);
        ax.classes.assign(n, 0);
        parallel_for(n, [&](Index i) {
            std::array<double, 3> p = point;
            p[axis] = xs[i];
            ax.classes[i] = classify(axis, p);
        });
        int first = -1, last = -1;
        for (int i = 0; i < n; ++i)
            if (ax.classes[i] == 0) {
                if (first < 0) first = i;
                last = i;
                ++ax.survivors;
            }
        if (first >= 0) {
            ax.bracket_lo = first > 0 ? xs[first - 1] : xs[0];
            ax.bracket_hi = last < n - 1 ? xs[last + 1] : xs[n - 1];
            // surviving sample nearest to the box centre of this axis
            const double centre = axis == 0 ? res.box.lambda_center : 0.0;
            int best = first;
            for (int i = first; i <= last; ++i)
                if (ax.classes[i] == 0 && std::abs(xs[i] - centre) < std::abs(xs[best] - centre)) best = i;
            point[axis] = xs[best];
            std::array<double, 3> p = point;
            p[axis] = centre;
            if (classify(axis, p) == 0) point[axis] = centre;
            continue;
        }
        int k = -1;
        for (int i = 0; i + 1 < n; ++i)
            if (ax.classes[i] == -1 && ax.classes[i + 1] == 1) { k = i; break; }
        if (k < 0) {
            all_found = false;
            ax.bracket_lo = ax.lo;
            ax.bracket_hi = ax.hi;
            continue;
        }
        ax.bracket_lo = xs[k];
        ax.bracket_hi = xs[k + 1];
        double a = xs[k], b = xs[k + 1];
        bool found = false;
        for (int it = 0; it < opt.refine && !found; ++it) {
            const double m = 0.5 * (a + b);
            std::array<double, 3> p = point;
            p[axis] = m;
            const int cl = classify(axis, p);
            if (cl == 0) {
                point[axis] = m;
                found = true;
                ax.survivors = 1;
            } else if (cl == -1) a = m;
            else if (cl == 1) b = m;
            else break;
        }
        if (!found) {
            point[axis] = 0.5 * (a + b);
            all_found = false;
        }
    }
    res.lambda0 = point[0];
    res.a1 = point[1];
    res.a2 = point[2];

    const std::array<const char*, 3> bound_of = {"lambda", "a1+", "a2+"};
    for (int axis = 0; axis < 3; ++axis) {
        for (int side : {-1, 1}) {
            std::array<double, 3> p = point;
            p[axis] = side < 0 ? range[axis].first : range[axis].second;
            const Evaluation e = evaluate(p[0], p[1], p[2]);
            FaceExit f;
            f.face = std::string(names[axis]) + (side < 0 ? " lower" : " upper");
            if (axis == 0 && side < 0 && res.lambda_face_clipped) f.face += " (clipped)";
            f.exited = e.exit.axis >= 0;
            if (f.exited) {
                f.bound = bound_of[e.exit.axis];
                f.sign = e.exit.sign;
                f.t_exit = e.t_exit;
                f.outward = e.exit.axis == axis && e.exit.sign == side;
            }
            res.faces.push_back(f);
        }
    }

    ReducedOptions full = opt.ode;
    full.stop_on_exit = false;
    ReducedInitial in;
    in.lambda = res.lambda0;
    in.a1p = res.a1;
    in.a2p = res.a2;
    res.trajectory = integrate_reduced(c, T, in, res.t_end, full);
    ++evals;
    res.monitor = monitor_bootstrap(c.N, c.kappa, bootstrap_samples(res.trajectory, opt.cY_norm));
    res.survived = all_found && res.monitor.improved_hold && !res.trajectory.step_underflow;
    res.evaluations = evals.load();
    return res;
}

} // namespace hartree

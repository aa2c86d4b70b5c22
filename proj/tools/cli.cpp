#include "cli.hpp"

#include "io.hpp"
#include "suite.hpp"

#include "hartree/dynamics.hpp"
#include "hartree/parallel.hpp"
#include "hartree/virial.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hartree::cli {

namespace {

using nlohmann::json;

// an error the user can fix by changing the invocation
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstantsArgs {
    bool no_cache = false;
};

struct SpectrumArgs {
    bool csv = false;
};

struct DecomposeArgs {
    std::string in;
    double zeta = -0.5 * std::numbers::pi, mu = 1.0, theta = 0.0, lambda = 0.05;
    double perturb = 0.0;
    double guess_zeta = -0.5 * std::numbers::pi, guess_mu = 1.0, guess_theta = 0.0, guess_lambda = 0.0;
    bool system = false;
};

struct OdeArgs {
    double T = -100.0;
    double t_end = 0.0;
    std::string lambda0 = "auto";
    double a1 = 0.0, a2 = 0.0;
    std::string closure = "zero";
    double kappa_K = 0.0;
    int outputs = 200;
};

struct EvolveArgs {
    std::string init = "two-bubble";
    std::string in;
    double T = -50.0;
    std::string lambda0 = "auto";
    double a1 = 0.0, a2 = 0.0;
    double dt = 1e-4;
    double t_end = 0.0;
    int frames = 100;
    int splitting = 2;
    bool no_track = false;
};

struct ShootArgs {
    double T = -100.0;
    double t_end = 0.0;
    int samples = 64;
    int refine = 80;
};

struct VirialArgs {
    std::string action = "audit";
    double c = 1e-3, R = 20.0;
    double lambda = 0.05;
    double c0 = 1e-2;
    int trials = 100;
};

struct VerifyArgs {
    std::string suite = "all";
};

void check_dimension(int N) {
    if (N < 7)
        throw UsageError("N = " + std::to_string(N) +
                         " is not supported: the two-bubble construction assumes N >= 7");
}

std::string cache_name(const io::RunConfig& cfg) {
    return "constants_N" + std::to_string(cfg.N) + "_" + std::to_string(cfg.points) + ".json";
}

struct CachedConstants {
    Constants c;
    double mode_norm = 0.0;
    bool from_cache = false;
};

CachedConstants load_or_compute(const io::RunConfig& cfg, const io::Writer& w, const Lab* lab, std::ostream& err) {
    const auto p = w.path(cache_name(cfg));
    if (std::ifstream is(p); is) {
        try {
            const json j = json::parse(is);
            CachedConstants cc{io::constants_from_json(j), j.at("mode_norm").get<double>(), true};
            if (cc.c.N == cfg.N && cc.c.grid_points == cfg.points && cc.c.grid_r_min == cfg.r_min &&
                cc.c.grid_r_max == cfg.r_max && cc.c.nu > 0.0)
                return cc;
            err << "note: constants cache " << p.string() << " does not match this grid, recomputing\n";
        } catch (const std::exception& e) {
            err << "note: ignoring unreadable constants cache " << p.string() << " (" << e.what() << ")\n";
        }
    } else {
        err << "note: no constants cache at " << p.string() << ", computing\n";
    }
    std::unique_ptr<Lab> own;
    if (!lab) {
        own = std::make_unique<Lab>(cfg.lab());
        lab = own.get();
    }
    CachedConstants cc{lab->constants(), mode_field_norm(*lab), false};
    json j = io::to_json(cc.c);
    j["mode_norm"] = cc.mode_norm;
    w.json(cache_name(cfg), j);
    return cc;
}

double parse_lambda0(const std::string& s, int N, double kappa, double T) {
    if (s == "auto") return initial_box(N, kappa, T).lambda_center;
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || !(v > 0.0)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--lambda0 expects 'auto' or a positive number, got '" + s + "'");
    }
}

json monitor_json(const BootstrapMonitor& m) {
    json bounds = json::object();
    for (int k = 0; k < kBounds; ++k)
        bounds[kBoundNames[k]] = {{"min_hypothesis_slack", m.min_hypothesis[k]},
                                  {"min_improved_slack", m.min_improved[k]},
                                  {"max_ratio", m.max_ratio[k]}};
    json j = {{"steps", m.steps.size()},
              {"hypotheses_hold", m.hypotheses_hold},
              {"improved_hold", m.improved_hold},
              {"bounds", bounds}};
    if (!m.hypotheses_hold) j["first_violation"] = {{"t", m.first_violation_t}, {"bound", m.first_violation}};
    if (!m.improved_hold)
        j["first_improved_violation"] = {{"t", m.first_improved_violation_t}, {"bound", m.first_improved_violation}};
    return j;
}

std::string trajectory_csv(const ReducedTrajectory& tr) {
    std::ostringstream os;
    io::CsvWriter csv(os, {"t", "zeta", "mu", "theta", "lambda", "a1p", "a1m", "a2p", "a2m", "log_abs_a1p",
                           "log_abs_a2p", "phi1", "phi2"});
    for (const ReducedState& s : tr.states)
        csv.row({s.t, s.zeta, s.mu, s.theta, s.lambda, s.a.a1p, s.a.a1m, s.a.a2p, s.a.a2m, s.log_abs[0], s.log_abs[2],
                 s.phi1, s.phi2});
    return os.str();
}

// ---------------------------------------------------------------------------

int cmd_constants(const io::RunConfig& cfg, const ConstantsArgs& a, std::ostream& out, std::ostream& err) {
    const io::Writer w(cfg.out);
    const Lab lab(cfg.lab());
    const Constants& c = lab.constants();
    json j = io::to_json(c);
    j["mode_norm"] = mode_field_norm(lab);
    if (!a.no_cache) w.json(cache_name(cfg), j);
    j["profile"] = "W = c0 (1 + r^2)^{-(N-2)/2}, decaying branch; c0 fitted from Delta W + f(W) = 0";
    out << io::dump(j) << '\n';
    err << "kappa = " << io::num(c.kappa) << ", nu = " << io::num(c.nu) << '\n';
    return kOk;
}

int cmd_spectrum(const io::RunConfig& cfg, const SpectrumArgs& a, std::ostream& out, std::ostream&) {
    const io::Writer w(cfg.out);
    const Lab lab(cfg.lab());
    const EigenPair& e = lab.eigen();
    json j = {{"nu", e.nu},
              {"nu_coarse", e.nu_coarse},
              {"M", e.M},
              {"rhoY", e.rhoY},
              {"residual_Lplus", e.res_plus},
              {"residual_Lminus", e.res_minus},
              {"residual_product", e.res_product},
              {"orthogonality_W_Y1", e.orth_W_Y1},
              {"orthogonality_LW_Y2", e.orth_LW_Y2},
              {"decay", e.decay}};
    if (a.csv) {
        std::ostringstream os;
        io::CsvWriter csv(os, {"r", "Y1", "Y2"});
        for (Index i = 0; i < lab.grid().size(); ++i) csv.row({lab.grid().r()(i), e.Y1(i), e.Y2(i)});
        j["csv"] = w.text("spectrum.csv", os.str()).string();
    }
    out << io::dump(j) << '\n';
    return kOk;
}

int cmd_decompose(const io::RunConfig& cfg, const DecomposeArgs& a, std::ostream& out, std::ostream& err) {
    const Lab lab(cfg.lab());
    CVec u;
    if (!a.in.empty()) {
        std::ifstream is(a.in);
        if (!is) throw UsageError("cannot read field file " + a.in);
        const FieldCsv f = read_field_csv(is);
        if (f.N != cfg.N || f.r.size() != lab.grid().size())
            throw UsageError("field file " + a.in + " was written on a different grid");
        u = f.u;
    } else {
        TwoBubbleConfig tb{a.zeta, a.mu, a.theta, a.lambda, {}};
        u = two_bubble(lab, tb);
        if (a.perturb != 0.0) {
            std::mt19937_64 rng(cfg.seed);
            u += a.perturb * random_bumps(lab, rng);
        }
    }
    ModulationParams guess{a.guess_zeta, a.guess_mu, a.guess_theta, a.guess_lambda > 0.0 ? a.guess_lambda : a.lambda};
    const ModulationState s = decompose(lab, u, guess);
    json j = {{"zeta", s.zeta},
              {"mu", s.mu},
              {"theta", s.theta},
              {"lambda", s.lambda},
              {"g_H1dot", std::sqrt(lab.lap().dirichlet(s.g))},
              {"a", {{"a1p", s.a.a1p}, {"a1m", s.a.a1m}, {"a2p", s.a.a2p}, {"a2m", s.a.a2m}}},
              {"orthogonality_residuals", s.residuals},
              {"iterations", s.iterations},
              {"jacobian_cond", s.jacobian_cond}};
    if (a.system) {
        const ModulationSystem m = assemble_system(lab, s);
        json M = json::array();
        for (int i = 0; i < 4; ++i) M.push_back({m.M(i, 0), m.M(i, 1), m.M(i, 2), m.M(i, 3)});
        j["system"] = {{"M", M},
                       {"B", {m.B(0), m.B(1), m.B(2), m.B(3)}},
                       {"K", m.K},
                       {"rates", {{"zeta", m.zeta_dot}, {"mu", m.mu_dot}, {"theta", m.theta_dot}, {"lambda", m.lambda_dot}}},
                       {"diagonally_dominant", m.diagonally_dominant},
                       {"dominance_margin", m.dominance_margin}};
    }
    out << io::dump(j) << '\n';
    err << "decomposed in " << s.iterations << " Newton steps\n";
    return kOk;
}

int cmd_ode(const io::RunConfig& cfg, const OdeArgs& a, std::ostream& out, std::ostream& err) {
    const io::Writer w(cfg.out);
    if (!(a.T < 0.0)) throw UsageError("--T must be negative");
    const CachedConstants cc = load_or_compute(cfg, w, nullptr, err);
    const double t_end = a.t_end != 0.0 ? a.t_end : a.T / 10.0;
    if (!(a.T < t_end && t_end < 0.0)) throw UsageError("need T < t-end < 0");
    ReducedInitial in;
    in.lambda = parse_lambda0(a.lambda0, cfg.N, cc.c.kappa, a.T);
    in.a1p = a.a1;
    in.a2p = a.a2;
    ReducedOptions opt;
    opt.outputs = a.outputs;
    if (a.closure == "zero") opt.closure = KClosure::Zero;
    else if (a.closure == "mode-quadratic") {
        opt.closure = KClosure::ModeQuadratic;
        opt.kappa_K = a.kappa_K;
    } else throw UsageError("--closure must be zero or mode-quadratic");
    const ReducedTrajectory tr = integrate_reduced(cc.c, a.T, in, t_end, opt);
    const BootstrapMonitor m = monitor_bootstrap(cfg.N, cc.c.kappa, bootstrap_samples(tr, cc.mode_norm));
    const auto csv = w.text("ode.csv", trajectory_csv(tr));
    const ReducedState& last = tr.states.back();
    json j = {{"T", a.T},
              {"t_end", t_end},
              {"closure", tr.closure_label},
              {"constants_from_cache", cc.from_cache},
              {"lambda0", in.lambda},
              {"final", {{"t", last.t}, {"lambda", last.lambda}, {"theta", last.theta},
                         {"kappa_law", cc.c.kappa * std::pow(-last.t, -2.0 / (cfg.N - 6))}}},
              {"accepted_steps", tr.accepted_steps},
              {"rejected_steps", tr.rejected_steps},
              {"step_underflow", tr.step_underflow},
              {"monitor", monitor_json(m)},
              {"csv", csv.string()}};
    out << io::dump(j) << '\n';
    return tr.step_underflow ? kFailed : kOk;
}

int cmd_evolve(const io::RunConfig& cfg, const EvolveArgs& a, std::ostream& out, std::ostream& err) {
    const io::Writer w(cfg.out);
    if (!(a.dt > 0.0)) throw UsageError("--dt must be positive");
    if (a.frames < 1) throw UsageError("--frames must be at least 1");
    const Lab lab(cfg.lab());
    CVec u0;
    std::optional<ModulationParams> guess;
    double lambda0 = 0.0;
    if (a.init == "W") {
        u0 = lab.bubble().W_on(lab.grid()).cast<cplx>();
    } else if (a.init == "two-bubble") {
        if (!(a.T < 0.0)) throw UsageError("--T must be negative");
        const Constants& cs = lab.static_constants();
        lambda0 = parse_lambda0(a.lambda0, cfg.N, cs.kappa, a.T);
        const double need = lambda0 / 100.0;
        if (cfg.r_min > need) {
            std::ostringstream os;
            os << "lambda0 = " << io::num(lambda0) << " at T = " << a.T
               << " is below what this grid resolves (needs r-min <= " << io::num(need) << ", have "
               << io::num(cfg.r_min) << ", and dt well below lambda0^2 = " << io::num(lambda0 * lambda0)
               << "); pass --lambda0 explicitly inside the initial box or move T towards 0";
            throw UsageError(os.str());
        }
        try {
            u0 = build_initial_data(lab, a.T, lambda0, a.a1, a.a2).u;
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (a.dt > 0.05 * lambda0 * lambda0)
            err << "warning: dt = " << a.dt << " is not small against lambda0^2 = " << lambda0 * lambda0
                << "; the small bubble will not be resolved in time\n";
        guess = ModulationParams{-0.5 * std::numbers::pi, 1.0, 0.0, lambda0};
    } else if (a.init == "file") {
        std::ifstream is(a.in);
        if (!is) throw UsageError("cannot read field file '" + a.in + "'");
        const FieldCsv f = read_field_csv(is);
        if (f.N != cfg.N || f.r.size() != lab.grid().size())
            throw UsageError("field file " + a.in + " was written on a different grid");
        u0 = f.u;
    } else {
        throw UsageError("--init must be W, two-bubble or file");
    }

    EvolutionConfig ec;
    ec.dt = a.dt;
    ec.t_end = a.t_end > 0.0 ? a.t_end : 1000.0 * a.dt;
    ec.splitting = a.splitting;
    const long steps = std::lround(ec.t_end / ec.dt);
    ec.record_every = int(std::max<long>(1, steps / a.frames));
    const PdeTrajectory tr = evolve_pde(lab, u0, ec);

    ModulationTrack track;
    if (guess && !a.no_track) track = track_modulation(lab, tr, *guess);

    std::ostringstream os;
    io::CsvWriter csv(os, {"t", "energy", "energy_drift", "dist_H1dot", "zeta", "mu", "theta", "lambda", "g_H1dot"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < tr.u.size(); ++k) {
        std::ostringstream name;
        name << "frames/frame_" << std::setw(4) << std::setfill('0') << k << ".csv";
        std::ostringstream fs;
        write_field_csv(fs, lab.grid(), tr.u[k]);
        w.text(name.str(), fs.str());
        const double drift = std::abs(tr.energy[k] - tr.energy[0]) / std::abs(tr.energy[0]);
        const double dist = std::sqrt(lab.lap().dirichlet(CVec(tr.u[k] - u0)));
        if (k < track.frames.size()) {
            const ModulationState& s = track.frames[k].s;
            csv.row({tr.t[k], tr.energy[k], drift, dist, s.zeta, s.mu, s.theta, s.lambda,
                     std::sqrt(lab.lap().dirichlet(s.g))});
        } else {
            csv.row({tr.t[k], tr.energy[k], drift, dist, nan, nan, nan, nan, nan});
        }
    }
    const auto traj = w.text("trajectory.csv", os.str());
    json j = {{"init", a.init},
              {"dt", ec.dt},
              {"t_end", ec.t_end},
              {"splitting", ec.splitting},
              {"steps", tr.steps},
              {"frames", tr.u.size()},
              {"dt_explicit", tr.dt_explicit},
              {"max_energy_drift", tr.max_energy_drift},
              {"blew_up", tr.blew_up},
              {"trajectory", traj.string()},
              {"frames_dir", w.path("frames").string()}};
    if (guess) {
        j["lambda0"] = lambda0;
        j["tracked_frames"] = track.frames.size();
        if (track.truncated) j["tracking_diagnostic"] = track.diagnostic;
    }
    out << io::dump(j) << '\n';
    return tr.blew_up ? kFailed : kOk;
}

int cmd_shoot(const io::RunConfig& cfg, const ShootArgs& a, std::ostream& out, std::ostream& err) {
    const io::Writer w(cfg.out);
    if (!(a.T < 0.0)) throw UsageError("--T must be negative");
    if (a.samples < 3) throw UsageError("--samples must be at least 3");
    const CachedConstants cc = load_or_compute(cfg, w, nullptr, err);
    ShootOptions opt;
    opt.t_end = a.t_end;
    opt.samples = a.samples;
    opt.refine = a.refine;
    opt.cY_norm = cc.mode_norm;
    const ShootResult r = shoot(cc.c, a.T, opt);
    json axes = json::array();
    for (const AxisSearch& ax : r.axes)
        axes.push_back({{"axis", ax.axis},
                        {"lo", ax.lo},
                        {"hi", ax.hi},
                        {"bracket_lo", ax.bracket_lo},
                        {"bracket_hi", ax.bracket_hi},
                        {"survivors", ax.survivors}});
    json faces = json::array();
    for (const FaceExit& f : r.faces)
        faces.push_back({{"face", f.face},
                         {"exited", f.exited},
                         {"bound", f.bound},
                         {"sign", f.sign},
                         {"t_exit", f.t_exit},
                         {"outward", f.outward}});
    const auto csv = w.text("shoot_trajectory.csv", trajectory_csv(r.trajectory));
    json j = {{"T", r.T},
              {"t_end", r.t_end},
              {"samples", a.samples},
              {"box", {{"lambda_center", r.box.lambda_center},
                       {"lambda_half", r.box.lambda_half},
                       {"a_half", r.box.a_half},
                       {"lambda_face_clipped", r.lambda_face_clipped}}},
              {"winner", {{"lambda0", r.lambda0}, {"a1", r.a1}, {"a2", r.a2}}},
              {"survived", r.survived},
              {"axes", axes},
              {"faces", faces},
              {"margins", monitor_json(r.monitor)},
              {"evaluations", r.evaluations},
              {"trajectory", csv.string()}};
    out << io::dump(j) << '\n';
    if (!r.survived) err << "no survivor at this resolution; see axes[].bracket_* for the bracketing boxes\n";
    return r.survived ? kOk : kFailed;
}

int cmd_virial(const io::RunConfig& cfg, const VirialArgs& a, std::ostream& out, std::ostream& err) {
    if (a.action == "audit") {
        try {
            const VirialWeight wq = build_weight(cfg.N, a.c, a.R);
            const WeightAudit au = wq.audit();
            json j = {{"c", a.c},
                      {"R", a.R},
                      {"Theta", wq.Theta()},
                      {"log_R_tilde", wq.log_R_tilde()},
                      {"P1", {{"margin", au.p1}, {"log_r", au.p1_logr}}},
                      {"P2", {{"margin", au.p2}, {"log_r", au.p2_logr}}},
                      {"P3", {{"max_grad_over_r", au.p3_grad}, {"max_abs_laplacian", au.p3_lap}}},
                      {"P4", {{"margin", au.p4}, {"log_r", au.p4_logr}}},
                      {"P5", {{"margin", au.p5}, {"log_r", au.p5_logr}}},
                      {"nodes", au.nodes},
                      {"ok", au.ok()}};
            out << io::dump(j) << '\n';
            return au.ok() ? kOk : kFailed;
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        } catch (const std::runtime_error& e) {
            err << "audit failed: " << e.what() << '\n';
            return kFailed;
        }
    }
    const Lab lab(cfg.lab());
    if (a.action == "pohozaev") {
        const VirialWeight wq = build_weight(cfg.N, a.c, a.R);
        const PohozaevAudit pa = pohozaev_audit(lab, a.lambda, wq, a.c0, a.trials, cfg.seed);
        out << io::dump(json{{"lambda", a.lambda}, {"c", a.c}, {"R", a.R}, {"c0", a.c0}, {"trials", pa.trials},
                             {"violations", pa.violations}, {"min_margin", pa.min_margin}})
            << '\n';
        return pa.violations == 0 ? kOk : kFailed;
    }
    if (a.action == "identity") {
        std::mt19937_64 rng(cfg.seed);
        BumpOptions bo;
        bo.r_lo = 0.05;
        bo.r_hi = 20.0;
        const CVec u = lab.bubble().W_on(lab.grid()).cast<cplx>();
        const CVec v = 0.1 * random_bumps(lab, rng, bo);
        const LambdaIdentity li = lambda_identity_check(lab, u, v);
        out << io::dump(json{{"lhs", li.lhs}, {"rhs", li.rhs}, {"residual", li.residual}}) << '\n';
        return li.residual <= 1e-5 ? kOk : kFailed;
    }
    throw UsageError("virial action must be audit, pohozaev or identity");
}

int cmd_verify(const io::RunConfig& cfg, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    const io::Writer w(cfg.out);
    std::vector<int> ids;
    try {
        ids = suite::select(a.suite);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    suite::Settings s = suite::default_settings(cfg.N);
    s.lab = cfg.lab();
    s.coarse = s.lab;
    s.coarse.points = s.lab.points / 2;
    s.seed = cfg.seed;
    suite::Context ctx(s);
    std::vector<suite::Criterion> results;
    for (int id : ids) {
        results.push_back(suite::run(id, ctx));
        const suite::Criterion& c = results.back();
        err << (c.passed() ? "PASS " : "FAIL ") << std::setw(2) << c.id << ' ' << c.key << " (" << std::fixed
            << std::setprecision(1) << c.seconds << " s): " << c.summary() << '\n';
        err.unsetf(std::ios::floatfield);
    }
    suite::persist_failures(results, w.dir().string());
    const json rep = suite::report(a.suite, results);
    w.json("verify_report.json", rep);
    out << io::dump(rep) << '\n';
    for (const auto& c : results)
        if (!c.passed()) return kFailed;
    return kOk;
}

} // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-bubble dynamics of the energy-critical Hartree equation in radial symmetry", "hartree_lab"};
    app.set_config("--config", "", "flat key=value file; command-line flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    io::RunConfig cfg;
    app.add_option("--N", cfg.N, "space dimension (>= 7)")->capture_default_str();
    app.add_option("--r-min", cfg.r_min, "innermost grid radius")->capture_default_str();
    app.add_option("--r-max", cfg.r_max, "outermost grid radius")->capture_default_str();
    app.add_option("--points", cfg.points, "grid nodes")->capture_default_str()->check(CLI::Range(64, 1 << 16));
    app.add_option("--seed", cfg.seed, "seed for every random draw")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker cap (0: HARTREE_LAB_THREADS or hardware)")->capture_default_str();
    app.add_option("--out", cfg.out, "output directory")->capture_default_str();

    ConstantsArgs ca;
    auto* c_const = app.add_subcommand("constants", "C1, C2, C3, kappa, nu, M; refreshes the constants cache");
    c_const->add_flag("--no-cache", ca.no_cache, "do not write the cache file");

    SpectrumArgs sa;
    auto* c_spec = app.add_subcommand("spectrum", "unstable eigenpair of the linearized operator");
    c_spec->add_flag("--csv", sa.csv, "write Y1, Y2 to spectrum.csv");

    DecomposeArgs da;
    auto* c_dec = app.add_subcommand("decompose", "split a field into two bubbles plus remainder");
    c_dec->add_option("--in", da.in, "field CSV (r,re,im); default builds a two-bubble field");
    c_dec->add_option("--zeta", da.zeta)->capture_default_str();
    c_dec->add_option("--mu", da.mu)->capture_default_str();
    c_dec->add_option("--theta", da.theta)->capture_default_str();
    c_dec->add_option("--lambda", da.lambda)->capture_default_str();
    c_dec->add_option("--perturb", da.perturb, "amplitude of random bumps added to the synthetic field");
    c_dec->add_option("--guess-zeta", da.guess_zeta)->capture_default_str();
    c_dec->add_option("--guess-mu", da.guess_mu)->capture_default_str();
    c_dec->add_option("--guess-theta", da.guess_theta)->capture_default_str();
    c_dec->add_option("--guess-lambda", da.guess_lambda, "default: --lambda");
    c_dec->add_flag("--system", da.system, "also assemble the modulation system");

    OdeArgs oa;
    auto* c_ode = app.add_subcommand("ode", "reduced modulation and mode system");
    c_ode->add_option("--T", oa.T, "initial time (< 0)")->capture_default_str();
    c_ode->add_option("--t-end", oa.t_end, "final time (default T/10)");
    c_ode->add_option("--lambda0", oa.lambda0, "'auto' (kappa |T|^{-2/(N-6)}) or a value")->capture_default_str();
    c_ode->add_option("--a1", oa.a1, "initial a1+")->capture_default_str();
    c_ode->add_option("--a2", oa.a2, "initial a2+")->capture_default_str();
    c_ode->add_option("--closure", oa.closure, "K closure: zero or mode-quadratic")->capture_default_str();
    c_ode->add_option("--kappa-K", oa.kappa_K, "K = kappa_K (a2+^2 + a2-^2) under mode-quadratic");
    c_ode->add_option("--outputs", oa.outputs, "stored states")->capture_default_str();

    EvolveArgs ea;
    auto* c_ev = app.add_subcommand("evolve", "split-step evolution of the radial PDE");
    c_ev->add_option("--init", ea.init, "W, two-bubble or file")->capture_default_str();
    c_ev->add_option("--in", ea.in, "field CSV for --init file");
    c_ev->add_option("--T", ea.T, "initial time for two-bubble data")->capture_default_str();
    c_ev->add_option("--lambda0", ea.lambda0, "'auto' or a value inside the initial box")->capture_default_str();
    c_ev->add_option("--a1", ea.a1)->capture_default_str();
    c_ev->add_option("--a2", ea.a2)->capture_default_str();
    c_ev->add_option("--dt", ea.dt)->capture_default_str();
    c_ev->add_option("--t-end", ea.t_end, "run length (default 1000 dt)");
    c_ev->add_option("--frames", ea.frames, "stored frames")->capture_default_str();
    c_ev->add_option("--splitting", ea.splitting, "1 Lie, 2 Strang, 4 fourth-order composition")
        ->capture_default_str()
        ->check(CLI::IsMember({1, 2, 4}));
    c_ev->add_flag("--no-track", ea.no_track, "skip modulation tracking");

    ShootArgs sh;
    auto* c_sh = app.add_subcommand("shoot", "search the initial box for a surviving trajectory");
    c_sh->add_option("--T", sh.T)->capture_default_str();
    c_sh->add_option("--t-end", sh.t_end, "default T/10");
    c_sh->add_option("--samples", sh.samples, "samples per axis")->capture_default_str();
    c_sh->add_option("--refine", sh.refine, "bisection steps")->capture_default_str();

    VirialArgs va;
    auto* c_vir = app.add_subcommand("virial", "cut-off weight audit and virial identities");
    c_vir->add_option("action", va.action, "audit, pohozaev or identity")->capture_default_str();
    c_vir->add_option("--c", va.c)->capture_default_str();
    c_vir->add_option("--R", va.R)->capture_default_str();
    c_vir->add_option("--lambda", va.lambda)->capture_default_str();
    c_vir->add_option("--c0", va.c0)->capture_default_str();
    c_vir->add_option("--trials", va.trials)->capture_default_str();

    VerifyArgs vfa;
    auto* c_ver = app.add_subcommand("verify", "run the acceptance suite and write a JSON report");
    c_ver->add_option("--suite", vfa.suite, "all or one criterion key")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kUsage;
    }

    try {
        check_dimension(cfg.N);
        if (cfg.threads > 0) set_thread_count(cfg.threads);
        io::Writer(cfg.out).text("run.cfg", cfg.to_kv());
        if (c_const->parsed()) return cmd_constants(cfg, ca, out, err);
        if (c_spec->parsed()) return cmd_spectrum(cfg, sa, out, err);
        if (c_dec->parsed()) return cmd_decompose(cfg, da, out, err);
        if (c_ode->parsed()) return cmd_ode(cfg, oa, out, err);
        if (c_ev->parsed()) return cmd_evolve(cfg, ea, out, err);
        if (c_sh->parsed()) return cmd_shoot(cfg, sh, out, err);
        if (c_vir->parsed()) return cmd_virial(cfg, va, out, err);
        if (c_ver->parsed()) return cmd_verify(cfg, vfa, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}

} // namespace hartree::cli

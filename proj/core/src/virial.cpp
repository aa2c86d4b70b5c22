#include "hartree/virial.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hartree {

double cutoff_sigma(double s, int k) {
    if (s <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (s >= 1.0) return 0.0;
    const double s2 = s * s, s3 = s2 * s;
    // S(s) = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7, sigma = 1 - S
    switch (k) {
    case 0: return 1.0 - s3 * s * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s3);
    case 1: return -s3 * (140.0 - 420.0 * s + 420.0 * s2 - 140.0 * s3);
    case 2: return -s2 * (420.0 - 1680.0 * s + 2100.0 * s2 - 840.0 * s3);
    case 3: return -s * (840.0 - 5040.0 * s + 8400.0 * s2 - 4200.0 * s3);
    default: throw std::invalid_argument("cutoff_sigma: derivative order must be 0..3");
    }
}

bool WeightAudit::ok() const {
    return p1 >= 0.0 && p2 >= 0.0 && p4 >= 0.0 && p5 >= 0.0;
}

VirialWeight::VirialWeight(int N, double c, double R, double Theta)
    : N_(N), c_(c), R_(R), Theta_(Theta), L_(Theta / c) {}

double VirialWeight::dq_over_r(double r) const {
    return r <= R_ ? 1.0 : cutoff_sigma(s_of(r));
}

double VirialWeight::dq(double r) const { return r * dq_over_r(r); }

double VirialWeight::q(double r) const {
    if (r <= R_) return 0.5 * r * r;
    const double s = std::min(s_of(r), 1.0);
    const double L = L_;
    auto integrand = [L](double x) { return std::exp(2.0 * L * x) * cutoff_sigma(x); };
    const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, s, 8, 1e-13);
    return 0.5 * R_ * R_ + R_ * R_ * L_ * I;
}

double VirialWeight::d2q(double r) const {
    if (r <= R_) return 1.0;
    const double s = s_of(r);
    return cutoff_sigma(s) + cutoff_sigma(s, 1) / L_;
}

double VirialWeight::lap(double r) const {
    if (r <= R_) return N_;
    const double s = s_of(r);
    return N_ * cutoff_sigma(s) + cutoff_sigma(s, 1) / L_;
}

double VirialWeight::r2_bilap(double r) const {
    if (r <= R_) return 0.0;
    const double s = s_of(r);
    const double L = L_;
    return N_ * (N_ - 2) * cutoff_sigma(s, 1) / L + (2.0 * N_ - 2.0) * cutoff_sigma(s, 2) / (L * L) +
           cutoff_sigma(s, 3) / (L * L * L);
}

double VirialWeight::bilap(double r) const { return r2_bilap(r) / (r * r); }

WeightAudit VirialWeight::audit(int nodes) const {
    WeightAudit a;
    a.p1 = 0.0;
    a.p2 = 0.0;
    a.p4 = std::numeric_limits<double>::infinity();
    a.p5 = std::numeric_limits<double>::infinity();
    const double logR = std::log(R_);

    // inner region, log-spaced down to 1e-6 R
    const int inner = std::max(nodes / 20, 100);
    for (int i = 0; i < inner; ++i) {
        const double r = R_ * std::exp(-13.8 * (1.0 - double(i) / (inner - 1)));
        const double d = std::abs(q(r) - 0.5 * r * r) / (0.5 * r * r);
        if (-d < a.p1) { a.p1 = -d; a.p1_logr = std::log(r); }
        const double m = std::min(d2q(r), dq_over_r(r)) + c_;
        if (m < a.p4) { a.p4 = m; a.p4_logr = std::log(r); }
        const double b = c_ - r2_bilap(r);
        if (b < a.p5) { a.p5 = b; a.p5_logr = std::log(r); }
        a.p3_grad = std::max(a.p3_grad, dq_over_r(r));
        a.p3_lap = std::max(a.p3_lap, std::abs(lap(r)));
    }
    // transition annulus and beyond, uniform in s; r = R e^{L s} is only formed as a logarithm
    for (int i = 0; i < nodes; ++i) {
        const double s = -0.5 + 2.0 * double(i) / (nodes - 1);
        const double logr = logR + L_ * s;
        const double sig = cutoff_sigma(s), sig1 = cutoff_sigma(s, 1);
        const double sig2 = cutoff_sigma(s, 2), sig3 = cutoff_sigma(s, 3);
        const double in = s <= 0.0 ? 1.0 : 0.0;
        const double d2 = in + (1.0 - in) * (sig + sig1 / L_);
        const double lapq = in * N_ + (1.0 - in) * (N_ * sig + sig1 / L_);
        const double b2 = (1.0 - in) * (N_ * (N_ - 2) * sig1 / L_ + (2.0 * N_ - 2.0) * sig2 / (L_ * L_) +
                                         sig3 / (L_ * L_ * L_));
        const double m = std::min(d2, in + (1.0 - in) * sig) + c_;
        if (m < a.p4) { a.p4 = m; a.p4_logr = logr; }
        if (c_ - b2 < a.p5) { a.p5 = c_ - b2; a.p5_logr = logr; }
        a.p3_grad = std::max(a.p3_grad, in + (1.0 - in) * sig);
        a.p3_lap = std::max(a.p3_lap, std::abs(lapq));
        if (s >= 1.0) {
            // q' = r sigma vanishes identically; compare against the value the sampler returns
            const double rel = std::abs(sig);
            if (-rel < a.p2) { a.p2 = -rel; a.p2_logr = logr; }
        }
    }
    a.nodes = inner + nodes;
    return a;
}

VirialWeight build_weight(int N, double c, double R, int audit_nodes) {
    if (!(c > 0.0 && c <= 0.1)) throw std::invalid_argument("build_weight: need 0 < c <= 0.1");
    if (!(R >= 1.0)) throw std::invalid_argument("build_weight: need R >= 1");
    double Theta = 1.0;
    WeightAudit last;
    for (int attempt = 0; attempt < 40; ++attempt) {
        VirialWeight w(N, c, R, Theta);
        last = w.audit(audit_nodes);
        if (last.ok() && last.p3_grad <= 1.0 && last.p3_lap <= N + 1.0) return w;
        Theta *= 1.5;
    }
    std::ostringstream os;
    os.precision(6);
    if (last.p1 < 0) os << "P1 violated at r = " << std::exp(last.p1_logr);
    else if (last.p2 < 0) os << "P2 violated at r = " << std::exp(last.p2_logr);
    else if (last.p4 < 0) os << "P4 violated at r = " << std::exp(last.p4_logr) << " (ln r = " << last.p4_logr << ", margin " << last.p4 << ")";
    else if (last.p5 < 0) os << "P5 violated at r = " << std::exp(last.p5_logr) << " (margin " << last.p5 << ")";
    else os << "P3 bound exceeded (|Delta q| max " << last.p3_lap << ")";
    throw std::runtime_error("build_weight: " + os.str());
}

CVec apply_Lambda0(const RadialGrid& grid, const CVec& h) {
    static constexpr double c1 = 45.0 / 60.0, c2 = -9.0 / 60.0, c3 = 1.0 / 60.0;
    const Index n = h.size();
    const int N = grid.dim();
    const double hx = grid.h();
    const Vec& r = grid.r();
    // v = r^{N/2} h padded with three ghosts each side
    CVec v(n + 6);
    for (Index i = 0; i < n; ++i) v(i + 3) = std::pow(r(i), 0.5 * N) * h(i);
    for (int k = 1; k <= 3; ++k) {
        v(3 - k) = v(3) * std::exp(-0.5 * N * k * hx);
        v(n + 2 + k) = v(n + 2) * std::exp(-0.5 * (N - 4) * k * hx);
    }
    CVec out(n);
    for (Index i = 0; i < n; ++i) {
        const Index j = i + 3;
        const cplx d = c1 * (v(j + 1) - v(j - 1)) + c2 * (v(j + 2) - v(j - 2)) + c3 * (v(j + 3) - v(j - 3));
        out(i) = d / (hx * std::pow(r(i), 0.5 * N));
    }
    return out;
}

CVec apply_Lambda(const RadialGrid& grid, const CVec& h) { return apply_Lambda0(grid, h) - h; }

CVec apply_A0(const RadialGrid& grid, double lambda, const VirialWeight& w, const CVec& h) {
    if (!(lambda > 0.0)) throw std::invalid_argument("virial operator: lambda must be positive");
    const Index n = h.size();
    Vec sigma(n);
    for (Index i = 0; i < n; ++i) sigma(i) = w.dq_over_r(grid.r()(i) / lambda);
    const double il2 = 1.0 / (lambda * lambda);
    const CVec left = apply_Lambda0(grid, h);
    const CVec right = apply_Lambda0(grid, CVec(sigma.cast<cplx>().cwiseProduct(h)));
    CVec out(n);
    for (Index i = 0; i < n; ++i) out(i) = 0.5 * il2 * (sigma(i) * left(i) + right(i));
    return out;
}

CVec apply_A(const RadialGrid& grid, double lambda, const VirialWeight& w, const CVec& h) {
    const int N = grid.dim();
    CVec out = apply_A0(grid, lambda, w, h);
    const double il2 = 1.0 / (lambda * lambda);
    for (Index i = 0; i < h.size(); ++i) out(i) -= il2 * w.lap(grid.r()(i) / lambda) / N * h(i);
    return out;
}

PohozaevResult pohozaev_check(const Lab& lab, double lambda, const VirialWeight& w, const CVec& h, double c0) {
    const CVec A0h = apply_A0(lab.grid(), lambda, w, h);
    const CVec mdh = lab.lap().minus_delta(h);
    PohozaevResult p;
    p.lhs = -lab.grid().inner(A0h, mdh);
    const double il2 = 1.0 / (lambda * lambda);
    p.rhs = c0 * il2 * lab.lap().dirichlet(h) - il2 * lab.lap().dirichlet_region(h, 0.0, w.R() * lambda);
    p.margin = p.rhs - p.lhs;
    return p;
}

PohozaevAudit pohozaev_audit(const Lab& lab, double lambda, const VirialWeight& w, double c0, int trials,
                             std::uint64_t seed) {
    PohozaevAudit a;
    a.trials = trials;
    a.min_margin = std::numeric_limits<double>::infinity();
    BumpOptions bo;
    bo.r_lo = std::max(10.0 * lab.grid().r_min(), 1e-2 * lambda);
    bo.r_hi = std::min(lab.grid().r_max() / 10.0, 1e2 * w.R() * lambda);
    for (int t = 0; t < trials; ++t) {
        std::seed_seq ss{seed, std::uint64_t(t)};
        std::mt19937_64 rng(ss);
        const CVec h = random_bumps(lab, rng, bo);
        const PohozaevResult p = pohozaev_check(lab, lambda, w, h, c0);
        const double norm = lab.lap().dirichlet(h) / (lambda * lambda);
        if (p.margin < 0.0) ++a.violations;
        a.min_margin = std::min(a.min_margin, p.margin / norm);
    }
    return a;
}

AntisymmetryResult a0_antisymmetry(const Lab& lab, double lambda, const VirialWeight& w, const CVec& h1, const CVec& h2) {
    const CVec a1 = apply_A0(lab.grid(), lambda, w, h1);
    const CVec a2 = apply_A0(lab.grid(), lambda, w, h2);
    const RadialGrid& g = lab.grid();
    AntisymmetryResult r;
    r.defect = g.inner(h1, a2) + g.inner(a1, h2);
    r.scale = g.l2(h1) * g.l2(a2) + g.l2(a1) * g.l2(h2);
    return r;
}

PsiValue psi(const Lab& lab, const VirialWeight& w, const ModulationState& s) {
    PsiValue v;
    v.psi = s.theta;
    if (s.g.size() == 0) return v;
    const RadialGrid& grid = lab.grid();
    const CVec A0g = apply_A0(lab.grid(), s.lambda, w, s.g);
    cplx z = 0.0;
    for (Index i = 0; i < s.g.size(); ++i) z += grid.w()(i) * std::conj(s.g(i)) * cplx(0.0, 1.0) * A0g(i);
    z *= grid.area();
    const double W2 = lab.static_constants().C1; // ||W||^2_{L^2} = -<Lambda W, W>
    v.correction = z.real() / (2.0 * W2);
    v.psi = s.theta - v.correction;
    const double scale = grid.l2(s.g) * grid.l2(A0g);
    v.imag_residue = scale > 0.0 ? std::abs(z.imag()) / scale : 0.0;
    return v;
}

PsiRateReport psi_rate_audit(int N, const std::vector<PsiSample>& traj, double c1_bound) {
    if (traj.size() < 3) throw std::invalid_argument("psi_rate_audit: trajectory too short for differencing");
    for (std::size_t i = 1; i < traj.size(); ++i)
        if (!(traj[i].t > traj[i - 1].t)) throw std::invalid_argument("psi_rate_audit: times must increase");
    const double p = double(N - 5) / double(N - 6);
    PsiRateReport r;
    r.min_rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double rate = (traj[i + 1].psi - traj[i - 1].psi) / (traj[i + 1].t - traj[i - 1].t);
        const double env = std::pow(std::abs(traj[i].t), -p);
        r.min_rate = std::min(r.min_rate, rate);
        r.c1 = std::max(r.c1, -rate / env);
        if (rate < -c1_bound * env) ++r.violations;
        ++r.samples;
    }
    return r;
}

LambdaIdentity lambda_identity_check(const Lab& lab, const CVec& u, const CVec& v) {
    const RieszKernel& k = lab.kernel();
    const RadialGrid& g = lab.grid();
    const CVec Lu = apply_Lambda(g, u);
    const CVec Lv = apply_Lambda(g, v);
    const CVec fuv = f_apply(k, u + v);
    const CVec fu = f_apply(k, u);
    LambdaIdentity r;
    r.lhs = g.inner(Lu, fuv - fu - fprime_apply(k, u, v));
    r.rhs = -g.inner(Lv, fuv - fu);
    const double big = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.residual = big > 0.0 ? std::abs(r.lhs - r.rhs) / big : 0.0;
    return r;
}

ByPartsDefect by_parts_defect(const Lab& lab, const VirialWeight& w, const TwoBubbleConfig& cfg) {
    const RieszKernel& k = lab.kernel();
    const RadialGrid& grid = lab.grid();
    const CVec u = two_bubble(lab, cfg);
    const CVec g = cfg.g.size() ? cfg.g : CVec(CVec::Zero(u.size()));
    const CVec fug = f_apply(k, u + g);
    const CVec fu = f_apply(k, u);
    ByPartsDefect d;
    d.lhs = grid.inner(apply_A(lab.grid(), cfg.lambda, w, u), fug - fu - fprime_apply(k, u, g));
    d.rhs = -grid.inner(apply_A(lab.grid(), cfg.lambda, w, g), fug - fu);
    d.defect = std::abs(d.lhs - d.rhs);
    d.g_sq = lab.lap().dirichlet(g);
    return d;
}

} // namespace hartree

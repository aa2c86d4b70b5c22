#include "hartree/energy.hpp"

#include "hartree/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hartree {

namespace {

Vec re_prod(const CVec& a, const CVec& b) { // Re(a conj b)
    Vec m(a.size());
    for (Index i = 0; i < a.size(); ++i) m(i) = (a(i) * std::conj(b(i))).real();
    return m;
}

double dot_w(const RadialGrid& grid, const Vec& a, const Vec& b) { return grid.inner(a, b); }

} // namespace

void validate(const TwoBubbleConfig& cfg) {
    if (!(cfg.lambda > 0.0) || !(cfg.mu > 0.0))
        throw std::invalid_argument("two-bubble configuration needs lambda > 0 and mu > 0");
}

double smallness_gauge(const Lab& lab, const TwoBubbleConfig& cfg) {
    double s = std::abs(cfg.zeta + 0.5 * std::numbers::pi) + std::abs(cfg.mu - 1.0) + std::abs(cfg.theta) + cfg.lambda;
    if (cfg.g.size() > 0) s += std::sqrt(lab.lap().dirichlet(cfg.g));
    return s;
}

CVec bubble_one(const Lab& lab, const TwoBubbleConfig& cfg) {
    validate(cfg);
    return lab.bubble().phased(lab.grid(), cfg.zeta, cfg.mu);
}
CVec bubble_two(const Lab& lab, const TwoBubbleConfig& cfg) {
    validate(cfg);
    return lab.bubble().phased(lab.grid(), cfg.theta, cfg.lambda);
}
CVec two_bubble(const Lab& lab, const TwoBubbleConfig& cfg) { return bubble_one(lab, cfg) + bubble_two(lab, cfg); }
CVec assemble(const Lab& lab, const TwoBubbleConfig& cfg) {
    CVec u = two_bubble(lab, cfg);
    if (cfg.g.size() > 0) {
        if (cfg.g.size() != u.size()) throw std::invalid_argument("g does not match the grid");
        u += cfg.g;
    }
    return u;
}

double energy(const Lab& lab, const CVec& u) {
    if (!u.allFinite()) throw std::domain_error("energy: non-finite field");
    return 0.5 * lab.lap().dirichlet(u) - lab.grid().integrate(F_density(lab.kernel(), u));
}

CVec energy_gradient(const Lab& lab, const CVec& u) { return lab.lap().minus_delta(u) - f_apply(lab.kernel(), u); }

double energy_derivative(const Lab& lab, const CVec& u, const CVec& g) {
    return lab.lap().dirichlet_pair(u, g) - lab.grid().inner(f_apply(lab.kernel(), u), g);
}

double energy_hessian(const Lab& lab, const CVec& u, const Vec& pot, const CVec& g, const CVec& h) {
    return lab.lap().dirichlet_pair(g, h) - lab.grid().inner(fprime_apply(lab.kernel(), pot, u, g), h);
}

double energy_hessian(const Lab& lab, const CVec& u, const CVec& g, const CVec& h) {
    return energy_hessian(lab, u, potential(lab.kernel(), u), g, h);
}

CVec f_expansion_residual(const Lab& lab, const CVec& z1, const CVec& z2) {
    const RieszKernel& k = lab.kernel();
    return f_apply(k, z1 + z2) - f_apply(k, z1) - f_apply(k, z2) - fprime_apply(k, z1, z2) - fprime_apply(k, z2, z1);
}

double F_expansion_residual(const Lab& lab, const CVec& z1, const CVec& z2) {
    const RieszKernel& k = lab.kernel();
    const RadialGrid& grid = lab.grid();
    Vec a1 = z1.cwiseAbs2(), a2 = z2.cwiseAbs2(), m = re_prod(z1, z2);
    Vec K1 = k.convolve(a1), K2 = k.convolve(a2), Km = k.convolve(m);
    Vec lhs = F_density(k, z1 + z2) - F_density(k, z1) - F_density(k, z2);
    Vec rhs = 0.5 * K1.cwiseProduct(m) + 0.5 * Km.cwiseProduct(a1) + 0.5 * K2.cwiseProduct(m) +
              0.5 * Km.cwiseProduct(a2) + 0.25 * K1.cwiseProduct(a2) + 0.25 * K2.cwiseProduct(a1) +
              Km.cwiseProduct(m);
    return grid.integrate(lhs - rhs);
}

GapResult two_bubble_energy_gap(const Lab& lab, const TwoBubbleConfig& cfg, double max_gauge) {
    TwoBubbleConfig c = cfg;
    c.g.resize(0);
    GapResult out;
    out.gauge = smallness_gauge(lab, c);
    if (out.gauge > max_gauge) {
        std::ostringstream os;
        os << "smallness gauge " << out.gauge << " exceeds " << max_gauge;
        throw std::invalid_argument(os.str());
    }
    const RieszKernel& k = lab.kernel();
    const RadialGrid& grid = lab.grid();
    CVec u1 = bubble_one(lab, c), u2 = bubble_two(lab, c);
    Vec a1 = u1.cwiseAbs2(), a2 = u2.cwiseAbs2(), m = re_prod(u1, u2);
    Vec K1 = k.convolve(a1), K2 = k.convolve(a2), Km = k.convolve(m);
    // int F(u1+u2) - F(u1) - F(u2) from its cross terms
    const double cross_F = 0.5 * dot_w(grid, K1, a2) + dot_w(grid, K1, m) + dot_w(grid, K2, m) + dot_w(grid, Km, m);
    const double interaction = lab.lap().dirichlet_pair(u1, u2) - cross_F;

    const double EW = energy(lab, lab.bubble().W_on(grid).cast<cplx>());
    out.self_energy = energy(lab, u1) + energy(lab, u2) - 2.0 * EW;
    out.gap = interaction + out.self_energy;
    const int N = lab.dim();
    out.model = lab.static_constants().C2 * c.theta * std::pow(c.lambda, 0.5 * (N - 2));
    return out;
}

double linear_term(const Lab& lab, const TwoBubbleConfig& cfg) {
    if (cfg.g.size() == 0) return 0.0;
    return energy_derivative(lab, two_bubble(lab, cfg), cfg.g);
}

PiPsi project_pi_psi(const Lab& lab, const CVec& u, double r_cut) {
    const RadialGrid& grid = lab.grid();
    if (!(r_cut >= grid.r_min() && r_cut <= grid.r_max()))
        throw std::invalid_argument("project_pi_psi: cut radius outside the grid");
    const Index j = std::min<Index>(grid.lower_index(r_cut), grid.size() - 2);
    const double t = (std::log(r_cut) - std::log(grid.r()(j))) / grid.h();
    const cplx uc = (1.0 - t) * u(j) + t * u(j + 1);
    PiPsi out;
    out.pi = u;
    out.psi = CVec::Zero(u.size());
    for (Index i = 0; i < u.size() && grid.r()(i) <= r_cut; ++i) {
        out.pi(i) = uc;
        out.psi(i) = u(i) - uc;
    }
    return out;
}

CVec random_bumps(const Lab& lab, std::mt19937_64& rng, const BumpOptions& opt) {
    const RadialGrid& grid = lab.grid();
    const int N = lab.dim();
    const double lo = opt.r_lo > 0.0 ? opt.r_lo : 10.0 * grid.r_min();
    const double hi = opt.r_hi > 0.0 ? opt.r_hi : 0.1 * grid.r_max();
    std::uniform_real_distribution<double> ulog(std::log(lo), std::log(hi));
    std::uniform_real_distribution<double> uwidth(opt.width_lo, opt.width_hi);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> amp(0.0, 1.0);
    CVec g = CVec::Zero(grid.size());
    for (int b = 0; b < opt.bumps; ++b) {
        const double r0 = std::exp(ulog(rng));
        const double sigma = r0 * uwidth(rng);
        const cplx a = amp(rng) * std::pow(r0, -0.5 * (N - 2)) * std::polar(1.0, uphase(rng));
        for (Index i = 0; i < grid.size(); ++i) {
            const double z = (grid.r()(i) - r0) / sigma;
            if (z * z < 700.0) g(i) += a * std::exp(-z * z);
        }
    }
    return g;
}

Vec random_real_bumps(const Lab& lab, std::mt19937_64& rng, const BumpOptions& opt) {
    CVec g = random_bumps(lab, rng, opt);
    return g.real() + g.imag();
}

std::vector<CVec> orthogonality_fields(const Lab& lab, const TwoBubbleConfig& cfg) {
    validate(cfg);
    const RadialGrid& grid = lab.grid();
    const Bubble& b = lab.bubble();
    const cplx I(0, 1);
    const cplx e1 = std::polar(1.0, cfg.zeta), e2 = std::polar(1.0, cfg.theta);
    CVec LW1 = b.LW_on(grid, cfg.mu).cast<cplx>(), W1 = b.W_on(grid, cfg.mu).cast<cplx>();
    CVec LW2 = b.LW_on(grid, cfg.lambda).cast<cplx>(), W2 = b.W_on(grid, cfg.lambda).cast<cplx>();
    return {I * e1 * LW1, -e1 * W1, I * e2 * LW2, -e2 * W2};
}

CVec project_out(const Lab& lab, const CVec& g, const std::vector<CVec>& fields) {
    const RadialGrid& grid = lab.grid();
    const Index k = static_cast<Index>(fields.size());
    Mat G(k, k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) G(a, b) = grid.inner(fields[a], fields[b]);
    Eigen::LDLT<Mat> ldlt(G);
    CVec out = g;
    for (int pass = 0; pass < 2; ++pass) {
        Vec rhs(k);
        for (Index a = 0; a < k; ++a) rhs(a) = grid.inner(fields[a], out);
        Vec beta = ldlt.solve(rhs);
        for (Index a = 0; a < k; ++a) out -= beta(a) * fields[a];
    }
    return out;
}

ModeAmplitudes mode_amplitudes(const Lab& lab, const TwoBubbleConfig& cfg, const CVec& g) {
    const EigenPair& e = lab.eigen();
    const RadialGrid& grid = lab.grid();
    AlphaFields A1 = alpha_fields(e, grid, cfg.zeta, cfg.mu);
    AlphaFields A2 = alpha_fields(e, grid, cfg.theta, cfg.lambda);
    return {grid.inner(A1.plus, g), grid.inner(A1.minus, g), grid.inner(A2.plus, g), grid.inner(A2.minus, g)};
}

CVec h_lambda_apply(const Lab& lab, const TwoBubbleConfig& cfg, const CVec& g) {
    const RieszKernel& k = lab.kernel();
    CVec u1 = bubble_one(lab, cfg), u2 = bubble_two(lab, cfg);
    return lab.lap().minus_delta(g) - fprime_apply(k, u1, g) - fprime_apply(k, u2, g);
}

CoercivityFit fit_coercivity(const std::vector<double>& Q_perp, const std::vector<double>& Q, const std::vector<double>& P) {
    CoercivityFit f;
    if (Q_perp.empty()) return f;
    f.min_perp = *std::min_element(Q_perp.begin(), Q_perp.end());
    f.c = 0.5 * f.min_perp;
    for (std::size_t i = 0; i < Q.size(); ++i)
        if (Q[i] < f.c && P[i] > 0.0) f.C = std::max(f.C, (f.c - Q[i]) / P[i]);
    return f;
}

namespace {

struct TrialOut {
    double ratio = 0.0, form_ratio = 0.0, corr_ratio = 0.0, orth = 0.0, ratio_modes = 0.0;
    CVec g;
    // single-bubble samples, all divided by ||g||^2
    double qp = 0, qm = 0, pp = 0, pm = 0, qp_perp = 0, qm_perp = 0;
    double lp2 = 0, lm2 = 0, lp3 = 0, lm3 = 0;
    double ql = 0, pl = 0, l2 = 0, l3 = 0, ql_perp = 0;
};

} // namespace

QuadraticFormReport coercivity_suite(const Lab& lab, const TwoBubbleConfig& cfg, const CoercivityOptions& opt) {
    validate(cfg);
    if (cfg.lambda > opt.eta * cfg.mu) {
        std::ostringstream os;
        os << "coercivity regime requires lambda <= eta mu (lambda=" << cfg.lambda << ", eta=" << opt.eta << ")";
        throw std::invalid_argument(os.str());
    }
    if (opt.trials < 1) throw std::invalid_argument("coercivity_suite: trials must be positive");
    const RadialGrid& grid = lab.grid();
    const Laplacian& lap = lab.lap();
    const RieszKernel& k = lab.kernel();
    const EigenPair& e = lab.eigen();
    const Bubble& b = lab.bubble();

    const CVec u = two_bubble(lab, cfg);
    const Vec pot = potential(k, u);
    const std::vector<CVec> cons = orthogonality_fields(lab, cfg);
    std::vector<double> cons_norm;
    for (const auto& c : cons) cons_norm.push_back(grid.l2(c));
    const double nu2M = e.nu / (2.0 * e.M);
    const AlphaFields A1 = alpha_fields(e, grid, cfg.zeta, cfg.mu);
    const AlphaFields A2 = alpha_fields(e, grid, cfg.theta, cfg.lambda);
    const AlphaFields Yp1 = cY_fields(e, grid, cfg.zeta, cfg.mu);
    const AlphaFields Yp2 = cY_fields(e, grid, cfg.theta, cfg.lambda);

    // single bubble at scale 1 (real fields) and at (theta, lambda) (complex fields)
    const Vec W = lab.linops().W();
    const Vec V = lab.linops().V();
    const Vec LW = b.LW_on(grid);
    const Vec& Y2 = e.Y2;
    const CVec ul = bubble_two(lab, cfg);
    const Vec potl = potential(k, ul);
    const double il2 = 1.0 / (cfg.lambda * cfg.lambda);
    const CVec cW = il2 * ul;
    const CVec cLW = il2 * cplx(0, 1) * std::polar(1.0, cfg.theta) * b.LW_on(grid, cfg.lambda).cast<cplx>();
    const std::vector<CVec> plus_cons{W.cast<cplx>(), Y2.cast<cplx>()};
    const std::vector<CVec> minus_cons{LW.cast<cplx>()};
    const std::vector<CVec> bubble_cons{cW, cLW, A2.plus, A2.minus};
    const double c = opt.regional_c;
    const double r1l = opt.r1 * cfg.lambda, r2l = opt.r2 * cfg.lambda;

    std::vector<TrialOut> outs(opt.trials);
    parallel_for(opt.trials, [&](Index t) {
        std::seed_seq seq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(t)};
        std::mt19937_64 rng(seq);
        TrialOut& o = outs[t];
        CVec g = project_out(lab, random_bumps(lab, rng), cons);
        g /= std::sqrt(lap.dirichlet(g));
        const double gg = 1.0; // ||g||^2 after normalization
        const double form = 0.5 * energy_hessian(lab, u, pot, g, g);
        const double a1p = grid.inner(A1.plus, g), a1m = grid.inner(A1.minus, g);
        const double a2p = grid.inner(A2.plus, g), a2m = grid.inner(A2.minus, g);
        const double corr = nu2M * (a1p * a1p + a1m * a1m + a2p * a2p + a2m * a2m);
        o.form_ratio = form / gg;
        o.corr_ratio = corr / gg;
        o.ratio = (form + corr) / gg;
        double worst = 0.0;
        for (std::size_t j = 0; j < cons.size(); ++j)
            worst = std::max(worst, std::abs(grid.inner(cons[j], g)) / (cons_norm[j] * grid.l2(g)));
        o.orth = worst;
        if (!(o.ratio > 0.0)) o.g = g;

        // unstable directions mixed in, then re-projected
        std::uniform_real_distribution<double> us(-3.0, 3.0);
        CVec y1 = Yp1.plus / std::sqrt(lap.dirichlet(Yp1.plus));
        CVec y2 = Yp2.plus / std::sqrt(lap.dirichlet(Yp2.plus));
        CVec gm = project_out(lab, g + us(rng) * y1 + us(rng) * y2, cons);
        gm /= std::sqrt(lap.dirichlet(gm));
        const ModeAmplitudes am{grid.inner(A1.plus, gm), grid.inner(A1.minus, gm), grid.inner(A2.plus, gm),
                                grid.inner(A2.minus, gm)};
        o.ratio_modes = 0.5 * energy_hessian(lab, u, pot, gm, gm) + nu2M * am.sum_sq();

        if (!opt.regional) return;
        // real fields around W
        Vec h = random_real_bumps(lab, rng);
        CVec hc = h.cast<cplx>();
        const double D = lap.dirichlet(h);
        const double Din = lap.dirichlet_region(hc, 0.0, opt.r1), Dout = D - Din;
        const double Din2 = lap.dirichlet_region(hc, 0.0, opt.r2), Dout2 = D - Din2;
        const double pV = grid.inner(Vec(V.cwiseProduct(h)), h);
        Vec Wh = W.cwiseProduct(h);
        const double pX = 2.0 * grid.inner(k.convolve(Wh), Wh);
        const double sW = grid.inner(W, h), sY = grid.inner(Y2, h), sL = grid.inner(LW, h);
        o.qp = (D - pV - pX) / D;
        o.qm = (D - pV) / D;
        {
            CVec hp = project_out(lab, hc, plus_cons);
            Vec hr = hp.real();
            o.qp_perp = grid.inner(lab.linops().lplus(hr), hr) / lap.dirichlet(hr);
            CVec hm = project_out(lab, hc, minus_cons);
            Vec mr = hm.real();
            o.qm_perp = grid.inner(lab.linops().lminus(mr), mr) / lap.dirichlet(mr);
        }
        o.pp = (sW * sW + sY * sY) / D;
        o.pm = sL * sL / D;
        o.lp2 = ((1 - 2 * c) * Din + c * Dout - pV - pX) / D;
        o.lm2 = ((1 - 2 * c) * Din + c * Dout - pV) / D;
        o.lp3 = ((1 - 2 * c) * Dout2 + c * Din2 - pV - pX) / D;
        o.lm3 = ((1 - 2 * c) * Dout2 + c * Din2 - pV) / D;

        // complex fields around e^{i theta} W_lambda
        CVec q = random_bumps(lab, rng);
        const double Dq = lap.dirichlet(q);
        const double Dqin = lap.dirichlet_region(q, 0.0, r1l), Dqin2 = lap.dirichlet_region(q, 0.0, r2l);
        const double nl = Dq - energy_hessian(lab, ul, potl, q, q); // potential part of the form
        const double s1 = grid.inner(cW, q), s2 = grid.inner(cLW, q);
        const double s3 = grid.inner(A2.plus, q), s4 = grid.inner(A2.minus, q);
        o.ql = (Dq - nl) / Dq;
        {
            CVec qq = project_out(lab, q, bubble_cons);
            o.ql_perp = energy_hessian(lab, ul, potl, qq, qq) / lap.dirichlet(qq);
        }
        o.pl = (s1 * s1 + s2 * s2 + s3 * s3 + s4 * s4) / Dq;
        o.l2 = ((1 - 2 * c) * Dqin + c * (Dq - Dqin) - nl) / Dq;
        o.l3 = ((1 - 2 * c) * (Dq - Dqin2) + c * Dqin2 - nl) / Dq;
    });

    QuadraticFormReport rep;
    rep.trials = opt.trials;
    rep.lambda = cfg.lambda;
    rep.eta = opt.eta;
    rep.regional_c = c;
    rep.r1 = opt.r1;
    rep.r2 = opt.r2;
    rep.min_ratio = INFINITY;
    rep.max_ratio = -INFINITY;
    rep.min_form_ratio = INFINITY;
    rep.min_ratio_with_modes = INFINITY;
    double corr_sum = 0.0;
    std::vector<double> qp, qm, pp, pm, ql, pl, qpp, qmp, qlp;
    auto need = [](double lhs, double P, double& C, int& viol) {
        if (lhs >= 0.0) return;
        if (P <= 1e-14) {
            ++viol;
            return;
        }
        C = std::max(C, -lhs / P);
    };
    for (const TrialOut& o : outs) {
        rep.ratios.push_back(o.ratio);
        rep.min_ratio = std::min(rep.min_ratio, o.ratio);
        rep.max_ratio = std::max(rep.max_ratio, o.ratio);
        rep.min_form_ratio = std::min(rep.min_form_ratio, o.form_ratio);
        rep.min_ratio_with_modes = std::min(rep.min_ratio_with_modes, o.ratio_modes);
        rep.max_orthogonality = std::max(rep.max_orthogonality, o.orth);
        corr_sum += o.corr_ratio;
        if (!(o.ratio > 0.0)) {
            ++rep.violations;
            rep.violating_fields.push_back(o.g);
        }
        if (opt.regional) {
            qp.push_back(o.qp);
            qm.push_back(o.qm);
            pp.push_back(o.pp);
            pm.push_back(o.pm);
            ql.push_back(o.ql);
            qpp.push_back(o.qp_perp);
            qmp.push_back(o.qm_perp);
            qlp.push_back(o.ql_perp);
            pl.push_back(o.pl);
            need(o.lp2, o.pp, rep.lp2_C, rep.regional_violations);
            need(o.lm2, o.pm, rep.lm2_C, rep.regional_violations);
            need(o.lp3, o.pp, rep.lp3_C, rep.regional_violations);
            need(o.lm3, o.pm, rep.lm3_C, rep.regional_violations);
            need(o.l2, o.pl, rep.l2_C, rep.regional_violations);
            need(o.l3, o.pl, rep.l3_C, rep.regional_violations);
        }
    }
    rep.mean_correction_ratio = corr_sum / opt.trials;
    if (opt.regional) {
        CoercivityFit f = fit_coercivity(qpp, qp, pp);
        rep.lp1_c = f.c;
        rep.lp1_C = f.C;
        f = fit_coercivity(qmp, qm, pm);
        rep.lm1_c = f.c;
        rep.lm1_C = f.C;
        f = fit_coercivity(qlp, ql, pl);
        rep.l1_c = f.c;
        rep.l1_C = f.C;
    }
    return rep;
}

} // namespace hartree

#include "hartree/modulation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hartree {

namespace {

const cplx I(0.0, 1.0);

struct Scaled {
    CVec W, LW, LLW; // e^{i phase} times the rescaled profiles
};

Scaled scaled(const Lab& lab, double phase, double s) {
    const Bubble& b = lab.bubble();
    const RadialGrid& g = lab.grid();
    const cplx e = std::polar(1.0, phase);
    return {e * b.W_on(g, s).cast<cplx>(), e * b.LW_on(g, s).cast<cplx>(), e * b.LLW_on(g, s).cast<cplx>()};
}

void check_params(const ModulationParams& p) {
    if (!(p.mu > 0.0) || !(p.lambda > 0.0) || !std::isfinite(p.zeta) || !std::isfinite(p.theta))
        throw std::invalid_argument("modulation parameters need mu > 0, lambda > 0 and finite phases");
}

struct Residual {
    std::array<double, 4> F{};     // raw pairings
    std::array<double, 4> scale{}; // normalizers
    CVec g;
    Scaled one, two;
};

Residual residual(const Lab& lab, const CVec& u, const ModulationParams& p) {
    const RadialGrid& grid = lab.grid();
    Residual r;
    r.one = scaled(lab, p.zeta, p.mu);
    r.two = scaled(lab, p.theta, p.lambda);
    r.g = u - r.one.W - r.two.W;
    const CVec c[4] = {I * r.one.LW, -r.one.W, I * r.two.LW, -r.two.W};
    const double n1 = grid.l2(r.one.W), n2 = grid.l2(r.two.W);
    for (int k = 0; k < 4; ++k) {
        r.F[k] = grid.inner(c[k], r.g);
        r.scale[k] = grid.l2(c[k]) * (k < 2 ? n1 : n2);
    }
    return r;
}

double max_scaled(const Residual& r) {
    double m = 0.0;
    for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(r.F[k]) / r.scale[k]);
    return m;
}

} // namespace

double wrap_phase(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(a + std::numbers::pi, two_pi);
    if (w <= 0.0) w += two_pi;
    return w - std::numbers::pi;
}

std::array<double, 4> orthogonality_residuals(const Lab& lab, const CVec& u, const ModulationParams& p) {
    check_params(p);
    Residual r = residual(lab, u, p);
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) out[k] = r.F[k] / r.scale[k];
    return out;
}

ModulationState decompose(const Lab& lab, const CVec& u, const ModulationParams& guess, const DecomposeOptions& opt) {
    check_params(guess);
    const RadialGrid& grid = lab.grid();
    if (u.size() != grid.size()) throw std::invalid_argument("decompose: field does not match the grid");
    ModulationParams p = guess;
    Residual r = residual(lab, u, p);
    double res = max_scaled(r);
    ModulationState st;
    int it = 0;
    double cond = 0.0;
    for (; it <= opt.max_iter; ++it) {
        // Jacobian of F_k = <c_k(p), u - u1(p) - u2(p)> in (zeta, mu, theta, lambda), analytic
        const Scaled& a = r.one;
        const Scaled& b = r.two;
        const double im = 1.0 / p.mu, il = 1.0 / p.lambda;
        // d/dphase (e^{i phase} X) = i e^{i phase} X ; d/ds X_s = -(1/s) (Lambda X)_s
        const CVec c[4] = {I * a.LW, -a.W, I * b.LW, -b.W};
        const CVec dc_phase[4] = {-a.LW, -I * a.W, -b.LW, -I * b.W};
        const CVec dc_scale[4] = {-im * I * a.LLW, im * a.LW, -il * I * b.LLW, il * b.LW};
        const CVec du1_phase = I * a.W, du1_scale = -im * a.LW;
        const CVec du2_phase = I * b.W, du2_scale = -il * b.LW;
        Eigen::Matrix4d J;
        for (int k = 0; k < 4; ++k) {
            const bool own_one = k < 2;
            // columns 0,1 belong to bubble one, 2,3 to bubble two
            J(k, 0) = (own_one ? grid.inner(dc_phase[k], r.g) : 0.0) - grid.inner(c[k], du1_phase);
            J(k, 1) = (own_one ? grid.inner(dc_scale[k], r.g) : 0.0) - grid.inner(c[k], du1_scale);
            J(k, 2) = (!own_one ? grid.inner(dc_phase[k], r.g) : 0.0) - grid.inner(c[k], du2_phase);
            J(k, 3) = (!own_one ? grid.inner(dc_scale[k], r.g) : 0.0) - grid.inner(c[k], du2_scale);
        }
        Eigen::Matrix4d Js = J;
        for (int k = 0; k < 4; ++k) Js.row(k) /= r.scale[k];
        Js.col(1) *= p.mu;
        Js.col(3) *= p.lambda;
        Eigen::JacobiSVD<Eigen::Matrix4d> svd(Js);
        const auto sv = svd.singularValues();
        cond = sv(3) > 0.0 ? sv(0) / sv(3) : INFINITY;
        if (!(cond <= opt.max_cond)) {
            std::ostringstream os;
            os << "near-degenerate modulation: Jacobian condition number " << cond << " (lambda=" << p.lambda
               << ", mu=" << p.mu << ")";
            throw std::runtime_error(os.str());
        }
        if (res <= opt.tol) break;
        if (it == opt.max_iter) break;
        Eigen::Vector4d F(r.F[0], r.F[1], r.F[2], r.F[3]);
        Eigen::Vector4d step = J.fullPivLu().solve(F);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            ModulationParams q{p.zeta - t * step(0), p.mu - t * step(1), p.theta - t * step(2), p.lambda - t * step(3)};
            if (!(q.mu > 0.0) || !(q.lambda > 0.0)) continue;
            Residual rq = residual(lab, u, q);
            const double rn = max_scaled(rq);
            if (rn < res || ls == 29) {
                p = q;
                r = std::move(rq);
                res = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (!(res <= opt.tol)) {
        std::ostringstream os;
        os << "decompose: Newton did not converge after " << it << " iterations; residuals";
        for (int k = 0; k < 4; ++k) os << ' ' << r.F[k] / r.scale[k];
        throw std::runtime_error(os.str());
    }
    st.zeta = wrap_phase(p.zeta);
    st.mu = p.mu;
    st.theta = wrap_phase(p.theta);
    st.lambda = p.lambda;
    st.g = std::move(r.g);
    for (int k = 0; k < 4; ++k) st.residuals[k] = r.F[k] / r.scale[k];
    st.iterations = it;
    st.jacobian_cond = cond;
    st.a = mode_amplitudes(lab, st.config(), st.g);
    return st;
}

ModulationSystem assemble_system(const Lab& lab, const ModulationState& s) {
    check_params(s.params());
    const RadialGrid& grid = lab.grid();
    const RieszKernel& k = lab.kernel();
    const Scaled one = scaled(lab, s.zeta, s.mu), two = scaled(lab, s.theta, s.lambda);
    const CVec g = s.g.size() ? s.g : CVec(CVec::Zero(grid.size()));
    const CVec &u1 = one.W, &u2 = two.W, &P1 = one.LW, &P2 = two.LW, &Q1 = one.LLW, &Q2 = two.LLW;
    auto ip = [&](const CVec& a, const CVec& b) { return grid.inner(a, b); };
    const double m2 = 1.0 / (s.mu * s.mu), l2 = 1.0 / (s.lambda * s.lambda);

    ModulationSystem out;
    Eigen::Matrix4d& M = out.M;
    M(0, 0) = m2 * (-ip(I * P1, I * u1) - ip(P1, g));
    M(0, 1) = m2 * (ip(I * P1, P1) - ip(I * Q1, g));
    M(0, 2) = l2 * ip(I * P1, -I * u2);
    M(0, 3) = l2 * ip(I * P1, P2);
    M(1, 0) = m2 * (ip(u1, I * u1) - ip(I * u1, g));
    M(1, 1) = m2 * (-ip(u1, P1) + ip(P1, g));
    M(1, 2) = l2 * ip(u1, I * u2);
    M(1, 3) = l2 * ip(-u1, P2);
    M(2, 0) = m2 * ip(I * P2, -I * u1);
    M(2, 1) = m2 * ip(I * P2, P1);
    M(2, 2) = l2 * (ip(I * P2, -I * u2) - ip(P2, g));
    M(2, 3) = l2 * (ip(I * P2, P2) - ip(I * Q2, g));
    M(3, 0) = m2 * ip(I * u2, I * u1);
    M(3, 1) = m2 * ip(u2, P1);
    M(3, 2) = l2 * (ip(u2, I * u2) - ip(I * u2, g));
    M(3, 3) = l2 * (ip(-u2, P2) + ip(P2, g));

    const CVec ub = u1 + u2;
    const CVec D = f_apply(k, ub + g) - f_apply(k, u1) - f_apply(k, u2);
    const CVec D1 = D - fprime_apply(k, u1, g);
    const CVec D2 = D - fprime_apply(k, u2, g);
    out.B(0) = -ip(P1, D1);
    out.B(1) = ip(u1, I * D1);
    out.B(2) = -ip(P2, D2);
    out.B(3) = ip(u2, I * D2);
    out.K = -ip(P2, f_apply(k, ub + g) - f_apply(k, ub) - fprime_apply(k, ub, g));

    out.dominance_margin = INFINITY;
    for (int i = 0; i < 4; ++i) {
        double off = 0.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) off += std::abs(M(i, j));
        out.dominance_margin = std::min(out.dominance_margin, (std::abs(M(i, i)) - off) / std::abs(M(i, i)));
    }
    out.diagonally_dominant = out.dominance_margin > 0.0;

    Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
    if (!lu.isInvertible()) throw std::runtime_error("assemble_system: singular modulation matrix");
    out.scaled_rates = lu.solve(out.B);
    out.zeta_dot = out.scaled_rates(0) * m2;
    out.mu_dot = out.scaled_rates(1) / s.mu;
    out.theta_dot = out.scaled_rates(2) * l2;
    out.lambda_dot = out.scaled_rates(3) / s.lambda;
    return out;
}

ReducedRates reduced_rates(const Constants& c, double theta, double lambda, double K) {
    if (!(lambda > 0.0)) throw std::invalid_argument("reduced_rates: lambda must be positive");
    const int N = c.N;
    ReducedRates r;
    r.lambda_dot = 3.0 * c.C2 / c.C1 * std::pow(lambda, 0.5 * (N - 4));
    r.theta_dot = -c.C3 / c.C1 * theta * std::pow(lambda, 0.5 * (N - 6)) + K / (lambda * lambda * c.C1);
    return r;
}

double zeta_mu_rate_bound(int N, double t, double c) {
    return c * std::pow(std::abs(t), -double(N - 3) / (N - 6));
}

ModeRates mode_rates(double nu, int N, double mu, double lambda, const ModeAmplitudes& a, double t, double c) {
    ModeRates r;
    const double k1 = nu / (mu * mu), k2 = nu / (lambda * lambda);
    r.da1p = k1 * a.a1p;
    r.da1m = -k1 * a.a1m;
    r.da2p = k2 * a.a2p;
    r.da2m = -k2 * a.a2m;
    const double env = std::pow(std::abs(t), -0.5 * N / (N - 6));
    r.envelope1 = c / (mu * mu) * env;
    r.envelope2 = c / (lambda * lambda) * env;
    return r;
}

bool InitialBox::contains(double lambda0, double a1, double a2) const {
    return std::abs(lambda0 - lambda_center) <= lambda_half && std::abs(a1) <= a_half && std::abs(a2) <= a_half;
}

InitialBox initial_box(int N, double kappa, double T) {
    if (!(T < 0.0)) throw std::invalid_argument("initial time T must be negative");
    const double aT = std::abs(T);
    InitialBox b;
    b.lambda_center = kappa * std::pow(aT, -2.0 / (N - 6));
    b.lambda_half = 0.5 * std::pow(aT, -5.0 / (2.0 * (N - 6)));
    b.a_half = 0.5 * std::pow(aT, -0.5 * N / (N - 6));
    return b;
}

InitialData build_initial_data(const Lab& lab, double T, double lambda0, double a1, double a2, const InitialOptions& opt) {
    const int N = lab.dim();
    const RadialGrid& grid = lab.grid();
    const Constants& cs = lab.static_constants();
    const InitialBox box = initial_box(N, cs.kappa, T);
    if (!box.contains(lambda0, a1, a2)) {
        std::ostringstream os;
        os << "initial data outside the admissible box: |lambda0 - " << box.lambda_center << "| <= " << box.lambda_half
           << ", |a| <= " << box.a_half;
        throw std::invalid_argument(os.str());
    }
    if (lambda0 < opt.resolution * grid.r_min()) {
        std::ostringstream os;
        os << "lambda0=" << lambda0 << " is below grid resolution (needs r_min <= lambda0/" << opt.resolution << ")";
        throw std::invalid_argument(os.str());
    }
    const double zeta = -0.5 * std::numbers::pi;
    InitialData out;
    out.lambda0 = lambda0;
    const Scaled one = scaled(lab, zeta, 1.0), two = scaled(lab, 0.0, lambda0);
    out.u = one.W + two.W;
    out.g0 = CVec::Zero(grid.size());
    const double sz = std::pow(std::abs(T), -0.5 * N / (N - 6));
    if (a1 == 0.0 && a2 == 0.0) {
        // homogeneous conditions: the least-norm solution is zero
        out.gram_cond = 1.0;
        return out;
    }
    const EigenPair& e = lab.eigen();
    const AlphaFields A1 = alpha_fields(e, grid, zeta, 1.0), A2 = alpha_fields(e, grid, 0.0, lambda0);
    // constraint fields, in the order of the conditions
    const std::vector<CVec> psi{I * one.LW, -one.W, I * two.LW, -two.W, A1.minus, A1.plus, A2.minus, A2.plus};
    // basis: {Lambda W, iW, i Lambda W_l, -W_l, alpha1^{+-}, alpha2^{+-}}
    const Bubble& b = lab.bubble();
    const std::vector<CVec> phi{b.LW_on(grid).cast<cplx>(), I * b.W_on(grid).cast<cplx>(),
                                I * b.LW_on(grid, lambda0).cast<cplx>(), -b.W_on(grid, lambda0).cast<cplx>(),
                                A1.plus, A1.minus, A2.plus, A2.minus};
    Eigen::Matrix<double, 8, 8> A, H;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            A(i, j) = grid.inner(psi[i], phi[j]);
            H(i, j) = lab.lap().dirichlet_pair(phi[i], phi[j]);
        }
    Eigen::Matrix<double, 8, 1> rhs;
    rhs << 0, 0, 0, 0, 0, a1, 0, a2;
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd(A);
    out.gram_cond = svd.singularValues()(0) / svd.singularValues()(7);
    if (!(out.gram_cond <= opt.max_cond)) {
        std::ostringstream os;
        os << "ill-conditioned initial-data constraints (cond " << out.gram_cond << ")";
        throw std::runtime_error(os.str());
    }
    // min c^T H c subject to A c = rhs
    Eigen::LDLT<Eigen::Matrix<double, 8, 8>> Hf(H);
    Eigen::Matrix<double, 8, 8> HiAt = Hf.solve(A.transpose());
    Eigen::Matrix<double, 8, 1> lam = (A * HiAt).fullPivLu().solve(rhs);
    Eigen::Matrix<double, 8, 1> coef = HiAt * lam;
    for (int j = 0; j < 8; ++j) out.g0 += coef(j) * phi[j];
    out.u += out.g0;
    for (int i = 0; i < 8; ++i) out.pairings[i] = grid.inner(psi[i], out.g0);
    out.size_ratio = std::sqrt(lab.lap().dirichlet(out.g0)) / sz;
    if (!(out.size_ratio <= opt.size_constant)) {
        std::ostringstream os;
        os << "initial perturbation too large: ||g0|| / |T|^{-N/(2(N-6))} = " << out.size_ratio;
        throw std::runtime_error(os.str());
    }
    return out;
}

} // namespace hartree

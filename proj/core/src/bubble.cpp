#include "hartree/bubble.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hartree {

double Bubble::W(double r) const { return c0 * std::pow(1.0 + r * r, -0.5 * (N - 2)); }

double Bubble::LW(double r) const {
    const double s = r * r;
    return c0 * 0.5 * (N - 2) * (1.0 - s) * std::pow(1.0 + s, -0.5 * N);
}

double Bubble::L0W(double r) const { return W(r) + LW(r); }

double Bubble::LLW(double r) const {
    const double s = r * r;
    const double a = 0.5 * (N - 2);
    const double p = (1.0 - s) * std::pow(1.0 + s, -0.5 * N);
    const double rp = -s * std::pow(1.0 + s, -0.5 * N - 1.0) * (2.0 * (1.0 + s) + N * (1.0 - s));
    return c0 * a * (a * p + rp);
}

namespace {
template <class F>
Vec sample_scaled(const RadialGrid& g, double lambda, int N, F&& f) {
    const double amp = std::pow(lambda, -0.5 * (N - 2));
    Vec out(g.size());
    for (Index i = 0; i < g.size(); ++i) out(i) = amp * f(g.r()(i) / lambda);
    return out;
}
} // namespace

Vec Bubble::W_on(const RadialGrid& g, double lambda) const {
    return sample_scaled(g, lambda, N, [&](double r) { return W(r); });
}
Vec Bubble::LW_on(const RadialGrid& g, double lambda) const {
    return sample_scaled(g, lambda, N, [&](double r) { return LW(r); });
}
Vec Bubble::L0W_on(const RadialGrid& g, double lambda) const {
    return sample_scaled(g, lambda, N, [&](double r) { return L0W(r); });
}
Vec Bubble::LLW_on(const RadialGrid& g, double lambda) const {
    return sample_scaled(g, lambda, N, [&](double r) { return LLW(r); });
}

CVec Bubble::phased(const RadialGrid& g, double theta, double lambda) const {
    return std::polar(1.0, theta) * W_on(g, lambda).cast<cplx>();
}

AmplitudeFit fit_amplitude(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap,
                           double r_lo, double r_hi, double tol) {
    const int N = grid.dim();
    Bubble unit{N, 1.0};
    Vec Wt = unit.W_on(grid);
    Vec mlap = -lap.apply(Wt);
    Vec P = kernel.convolve(Wt.cwiseProduct(Wt)).cwiseProduct(Wt);
    AmplitudeFit fit;
    fit.rho_min = 1e300;
    fit.rho_max = -1e300;
    double sum = 0.0;
    int cnt = 0;
    for (Index i = 0; i < grid.size(); ++i) {
        const double r = grid.r()(i);
        if (r < r_lo || r > r_hi) continue;
        const double rho = mlap(i) / P(i);
        fit.rho_min = std::min(fit.rho_min, rho);
        fit.rho_max = std::max(fit.rho_max, rho);
        sum += rho;
        ++cnt;
    }
    if (cnt == 0) throw std::runtime_error("fit_amplitude: grid does not cover the fit window");
    const double mean = sum / cnt;
    fit.spread = (fit.rho_max - fit.rho_min) / mean;
    // weighted least squares over the whole grid: c0^2 = <-Delta W~, P> / <P, P>
    fit.c0 = std::sqrt(grid.inner(mlap, P) / grid.inner(P, P));
    if (!(fit.spread <= tol)) {
        std::ostringstream os;
        os << "fit_amplitude: ratio not constant (min " << fit.rho_min << ", max " << fit.rho_max << ", spread "
           << fit.spread << " > " << tol << ")";
        throw std::runtime_error(os.str());
    }
    return fit;
}

double elliptic_residual(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap, const Bubble& b) {
    Vec W = b.W_on(grid);
    Vec lapW = lap.apply(W);
    Vec res = lapW + kernel.convolve(W.cwiseProduct(W)).cwiseProduct(W);
    return grid.l2(res) / grid.l2(lapW);
}

double kappa_from(int N, double C1, double C2) {
    return std::pow(2.0 * C1 / (3.0 * (N - 6) * C2), 2.0 / (N - 6));
}

double Constants::kappa_formula() const { return kappa_from(N, C1, C2); }

namespace {
double tail(const RadialGrid& g, double f_at_R, double p) { return g.tail_integral(f_at_R, p); }
} // namespace

Constants compute_constants(const RadialGrid& grid, const RieszKernel& kernel, const Laplacian& lap,
                            const Bubble& b, double tol) {
    const int N = grid.dim();
    const Index last = grid.size() - 1;
    Constants c;
    c.N = N;
    c.c0 = b.c0;
    c.grid_r_min = grid.r_min();
    c.grid_r_max = grid.r_max();
    c.grid_points = static_cast<long>(grid.size());

    Vec W = b.W_on(grid);
    Vec LW = b.LW_on(grid);
    Vec W2 = W.cwiseProduct(W);
    Vec VW = kernel.convolve(W2);

    Vec d1 = W2;
    const double t1 = tail(grid, d1(last), 2.0 * (N - 2));
    c.C1 = grid.integrate(d1) + t1;
    c.normW2 = c.C1;
    c.C1_beta = b.c0 * b.c0 * grid.area() * 0.5 * boost::math::beta(0.5 * N, 0.5 * (N - 4));

    Vec d2 = VW.cwiseProduct(W);
    const double t2 = tail(grid, d2(last), N + 2.0);
    c.C2 = grid.integrate(d2) + t2;
    c.C2_flux = (N - 2) * b.c0 * grid.area();

    Vec d3 = -(VW.cwiseProduct(LW) + 2.0 * kernel.convolve(W.cwiseProduct(LW)).cwiseProduct(W));
    const double t3 = tail(grid, d3(last), N + 2.0);
    c.C3 = grid.integrate(d3) + t3;
    c.C3_flux = grid.area() * b.c0 * (N - 2) * (N - 2) * 0.5;

    c.grad_W_sq = lap.dirichlet(W);
    Vec d4 = VW.cwiseProduct(W2);
    c.grad_W_sq_pot = grid.integrate(d4) + tail(grid, d4(last), 2.0 * N);
    c.tail_bound = std::max({std::abs(t1 / c.C1), std::abs(t2 / c.C2), std::abs(t3 / c.C3)});

    c.kappa = kappa_from(N, c.C1, c.C2);

    const double g2 = std::abs(c.C2 / c.C2_flux - 1.0);
    const double g3 = std::abs(c.C3 / c.C3_flux - 1.0);
    if (!(g2 <= tol) || !(g3 <= tol)) {
        std::ostringstream os;
        os << "compute_constants: cross-check failed (C2 gap " << g2 << ", C3 gap " << g3 << ", tol " << tol << ")";
        throw std::runtime_error(os.str());
    }
    return c;
}

} // namespace hartree

#include "hartree/kernel.hpp"

#include "hartree/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hartree {

namespace {

using boost::math::quadrature::gauss;

// r^2 + s^2 - 2rs cos t written without cancellation near r == s.
inline double dist2(double r, double s, double t) {
    const double sh = std::sin(0.5 * t);
    return (r - s) * (r - s) + 4.0 * r * s * sh * sh;
}

// zeta'(-2p) = (-1)^p (2p)! zeta(2p+1) / (2 (2 pi)^{2p})
double zeta_prime_neg_even(int p) {
    const double pi = std::numbers::pi;
    const double sgn = (p % 2 == 0) ? 1.0 : -1.0;
    return sgn * boost::math::factorial<double>(2 * p) * boost::math::zeta(2.0 * p + 1.0) /
           (2.0 * std::pow(2.0 * pi, 2 * p));
}

} // namespace

double RieszKernel::eval(int N, double r, double s) {
    const double pre = sphere_area(N - 2);
    if (r == 0.0 || s == 0.0) {
        const double m = std::max(r, s);
        return sphere_area(N - 1) / (m * m * m * m);
    }
    auto f = [&](double t) {
        const double d = dist2(r, s, t);
        return std::pow(std::sin(t), N - 2) / (d * d);
    };
    const double pi = std::numbers::pi;
    const double rel = std::abs(r - s) / (r + s);
    if (rel >= 1e-3) return pre * gauss<double, 64>::integrate(f, 0.0, pi);
    // near the diagonal the integrand peaks at t ~ |r-s|/sqrt(rs); geometric panels resolve it
    const double delta = std::max(std::abs(r - s) / std::sqrt(r * s), 1e-12);
    double total = gauss<double, 20>::integrate(f, 0.0, std::min(delta, pi));
    double lo = delta;
    while (lo < pi) {
        const double hi = std::min(4.0 * lo, pi);
        total += gauss<double, 20>::integrate(f, lo, hi);
        lo = hi;
    }
    return pre * total;
}

RieszKernel::RieszKernel(const RadialGrid& grid) : N_(grid.dim()), w_(grid.w()) {
    const Index n = grid.size();
    const double h = grid.h();
    // K(r_i, r_j) = r_i^{-4} k(e^{(j-i)h}), k(t) = K(1, t): 2n-1 angular integrals
    Vec k(2 * n - 1);
    parallel_for(2 * n - 1, [&](Index m) { k(m) = eval(N_, 1.0, std::exp((m - (n - 1)) * h)); });
    K_.resize(n, n);
    const Vec& r = grid.r();
    for (Index i = 0; i < n; ++i) {
        const double ri4 = 1.0 / std::pow(r(i), 4);
        for (Index j = i; j < n; ++j) {
            const double v = ri4 * k(j - i + n - 1);
            K_(i, j) = v;
            K_(j, i) = v;
        }
    }
    D_ = Vec::Zero(n);
    if (N_ % 2 == 1) {
        // the kernel behaves like A_N |y|^{N-5} log|y| across the diagonal in y = log(s/r);
        // the generalized Euler-Maclaurin defect of that term is removed here
        const int m = (N_ - 3) / 2;
        const double sgn = ((m - 1) % 2 == 0) ? 1.0 : -1.0;
        const double A = -m * sgn * sphere_area(N_ - 2);
        const double zp = zeta_prime_neg_even((N_ - 5) / 2);
        for (Index i = 0; i < n; ++i)
            D_(i) = 2.0 * zp * std::pow(h, N_ - 4) * A * std::pow(r(i), N_ - 4);
    }
}

Vec RieszKernel::convolve(const Vec& f) const {
    if (f.size() != K_.rows())
        throw std::invalid_argument("riesz_convolve: field and kernel grids differ");
    if (!f.allFinite()) throw std::domain_error("riesz_convolve: non-finite input");
    Vec wf = w_.cwiseProduct(f);
    Vec g = K_ * wf;
    g += D_.cwiseProduct(f);
    return g;
}

RegimeSlope convolution_regime(const RieszKernel& kernel, const RadialGrid& grid, double theta, double r_lo, double r_hi) {
    if (!(r_lo > 1.0 && r_hi > r_lo)) throw std::invalid_argument("convolution_regime: need 1 < r_lo < r_hi");
    const int N = grid.dim();
    const Vec f = grid.sample([theta](double r) { return std::pow(1.0 + r * r, -0.5 * theta); });
    const Vec g = kernel.convolve(f);
    std::vector<double> x, y, yl;
    for (Index i = 0; i < grid.size(); ++i) {
        const double r = grid.r()(i);
        if (r < r_lo || r > r_hi) continue;
        x.push_back(std::log(r));
        y.push_back(std::log(g(i)));
        yl.push_back(std::log(g(i) / std::log(r)));
    }
    if (x.size() < 8) throw std::invalid_argument("convolution_regime: fewer than 8 nodes in the fit window");
    auto fit = [&](const std::vector<double>& v) {
        const double n = double(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += v[i];
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (v[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        return sxy / sxx;
    };
    RegimeSlope out;
    out.theta = theta;
    out.critical = theta == double(N);
    out.expected = theta < N ? N - 4.0 - theta : -4.0;
    out.slope = fit(y);
    out.log_slope = fit(yl);
    out.samples = int(x.size());
    return out;
}

} // namespace hartree

#include "hartree/grid.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hartree {

double sphere_area(int k) {
    const double d = k + 1;
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / boost::math::tgamma(0.5 * d);
}

RadialGrid::RadialGrid(int N, double r_min, double r_max, int points) : N_(N) {
    if (N < 7)
        throw std::invalid_argument("dimension N=" + std::to_string(N) + " not supported: the construction requires N >= 7");
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw std::invalid_argument("grid bounds must satisfy 0 < r_min < r_max");
    if (points < 64)
        throw std::invalid_argument("grid needs at least 64 points");
    x0_ = std::log(r_min);
    h_ = (std::log(r_max) - x0_) / (points - 1);
    area_ = sphere_area(N - 1);
    r_.resize(points);
    w_.resize(points);
    for (int i = 0; i < points; ++i) {
        r_(i) = std::exp(x0_ + i * h_);
        w_(i) = h_ * std::pow(r_(i), N);
    }
    r_(0) = r_min;
    r_(points - 1) = r_max;
}

double RadialGrid::integrate(const Vec& f) const { return area_ * w_.dot(f); }

double RadialGrid::inner(const Vec& a, const Vec& b) const {
    return area_ * (w_.array() * a.array() * b.array()).sum();
}

double RadialGrid::inner(const CVec& a, const CVec& b) const {
    double s = 0.0;
    for (Index i = 0; i < size(); ++i)
        s += w_(i) * (a(i).real() * b(i).real() + a(i).imag() * b(i).imag());
    return area_ * s;
}

double RadialGrid::l2(const CVec& u) const { return std::sqrt(inner(u, u)); }
double RadialGrid::l2(const Vec& u) const { return std::sqrt(inner(u, u)); }

double RadialGrid::integrate_fn(const std::function<double(double)>& fn, double a, double b) const {
    using boost::math::quadrature::gauss;
    if (!(b > a)) return 0.0;
    const double xa = std::log(std::max(a, r_min()));
    const double xb = std::log(std::min(b, r_max()));
    if (!(xb > xa)) return 0.0;
    auto integrand = [&](double x) {
        const double r = std::exp(x);
        return fn(r) * r;
    };
    // panels follow the grid cells so that breakpoints of fn at nodes are respected
    double total = 0.0;
    double lo = xa;
    while (lo < xb) {
        double k = std::floor((lo - x0_) / h_ + 1e-12) + 1.0;
        double hi = std::min(x0_ + k * h_, xb);
        if (hi <= lo) hi = std::min(lo + h_, xb);
        total += gauss<double, 10>::integrate(integrand, lo, hi);
        lo = hi;
    }
    return total;
}

Vec RadialGrid::sample(const std::function<double(double)>& fn) const {
    Vec out(size());
    for (Index i = 0; i < size(); ++i) out(i) = fn(r_(i));
    return out;
}

Index RadialGrid::lower_index(double r) const {
    if (r <= r_min()) return 0;
    Index k = static_cast<Index>(std::ceil((std::log(r) - x0_) / h_ - 1e-9));
    while (k < size() && r_(k) < r) ++k;
    while (k > 0 && r_(k - 1) >= r) --k;
    return k;
}

double RadialGrid::tail_integral(double f_at_rmax, double p) const {
    const double R = r_max();
    return area_ * f_at_rmax * std::pow(R, N_) / (p - N_);
}

RadialGrid make_log_grid(int N, double r_min, double r_max, int points) {
    return RadialGrid(N, r_min, r_max, points);
}

} // namespace hartree

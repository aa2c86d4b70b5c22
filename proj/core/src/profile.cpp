#include "hartree/profile.hpp"

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>

#include <cmath>
#include <vector>

namespace hartree {

Profile::Profile(const RadialGrid& grid, const Vec& samples)
    : x0_(grid.x0()), x1_(grid.x0() + grid.h() * (grid.size() - 1)), left_(samples(0)), N_(grid.dim()),
      spline_(std::make_shared<boost::math::interpolators::cardinal_quintic_b_spline<double>>(
          std::vector<double>(samples.data(), samples.data() + samples.size()), grid.x0(), grid.h(),
          std::pair<double, double>{0.0, 0.0}, std::pair<double, double>{0.0, 0.0})) {}

double Profile::operator()(double r) const {
    const double x = std::log(r);
    if (x <= x0_) return left_;
    if (x > x1_ || !spline_) return 0.0;
    return (*spline_)(x);
}

Vec Profile::rescaled(const RadialGrid& grid, double lambda) const {
    const double amp = std::pow(lambda, -0.5 * (N_ - 2));
    Vec out(grid.size());
    for (Index i = 0; i < grid.size(); ++i) out(i) = amp * (*this)(grid.r()(i) / lambda);
    return out;
}

} // namespace hartree

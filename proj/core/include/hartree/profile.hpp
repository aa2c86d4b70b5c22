#pragma once

#include "hartree/grid.hpp"

#include <memory>

namespace boost::math::interpolators {
template <class Real>
class cardinal_quintic_b_spline;
}

namespace hartree {

// Quintic B-spline in x = log r through samples on a log grid. Flat for r < r_min
// (even profile), zero beyond r_max (profiles handed in decay to round-off there).
class Profile {
public:
    Profile() = default;
    Profile(const RadialGrid& grid, const Vec& samples);

    double operator()(double r) const;
    // Critical rescaling u_lambda(r) = lambda^{-(N-2)/2} u(r/lambda) sampled on `grid`.
    Vec rescaled(const RadialGrid& grid, double lambda) const;

private:
    double x0_ = 0.0, x1_ = 0.0, left_ = 0.0;
    int N_ = 0;
    std::shared_ptr<const boost::math::interpolators::cardinal_quintic_b_spline<double>> spline_;
};

} // namespace hartree

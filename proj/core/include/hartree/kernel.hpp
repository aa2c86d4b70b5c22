#pragma once

#include "hartree/grid.hpp"

namespace hartree {

// Radial reduction of |x|^{-4} * f in R^N:
//   (|x|^{-4} * f)(r) = int_0^inf K(r, s) f(s) s^{N-1} ds,
//   K(r, s) = |S^{N-2}| int_0^pi (r^2 + s^2 - 2 r s cos t)^{-2} sin^{N-2} t dt.
class RieszKernel {
public:
    explicit RieszKernel(const RadialGrid& grid);

    // Pointwise kernel value; s == 0 or r == 0 return the exact limit |S^{N-1}| max(r,s)^{-4}.
    static double eval(int N, double r, double s);

    int dim() const { return N_; }
    Index size() const { return K_.rows(); }
    const Mat& matrix() const { return K_; }
    // Correction added on the diagonal of the discrete convolution (zero for even N).
    const Vec& diagonal_correction() const { return D_; }

    // g_i = sum_j K_ij w_j f_j + D_i f_i
    Vec convolve(const Vec& f) const;

private:
    int N_;
    Vec w_;
    Mat K_;
    Vec D_;
};

// Far-field exponent of |x|^{-4} * <x>^{-theta}: N - 4 - theta for theta < N, -4 otherwise,
// with an extra log r factor at theta == N.
struct RegimeSlope {
    double theta = 0.0;
    double expected = 0.0;
    double slope = 0.0;     // least-squares slope of log g against log r on [r_lo, r_hi]
    double log_slope = 0.0; // same for log(g / log r)
    bool critical = false;  // theta == N
    int samples = 0;
    double measured() const { return critical ? log_slope : slope; }
};
// Throws std::invalid_argument when fewer than 8 nodes fall inside [r_lo, r_hi] or r_lo <= 1.
RegimeSlope convolution_regime(const RieszKernel& kernel, const RadialGrid& grid, double theta, double r_lo, double r_hi);

} // namespace hartree

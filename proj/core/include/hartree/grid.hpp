#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace hartree {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;
using Index = Eigen::Index;

// Surface area of the unit sphere S^k in R^{k+1}.
double sphere_area(int k);

// Log-uniform radial nodes r_i = exp(x0 + i h) with weights w_i = h r_i^N,
// so that sum_i w_i phi(r_i) approximates int phi(r) r^{N-1} dr.
class RadialGrid {
public:
    RadialGrid(int N, double r_min, double r_max, int points);

    int dim() const { return N_; }
    Index size() const { return r_.size(); }
    double h() const { return h_; }
    double x0() const { return x0_; }
    double r_min() const { return r_(0); }
    double r_max() const { return r_(r_.size() - 1); }
    const Vec& r() const { return r_; }
    const Vec& w() const { return w_; }
    // |S^{N-1}|
    double area() const { return area_; }

    // int_{R^N} f dx
    double integrate(const Vec& f) const;
    // Re int conj(a) b dx
    double inner(const Vec& a, const Vec& b) const;
    double inner(const CVec& a, const CVec& b) const;
    double l2(const CVec& u) const;
    double l2(const Vec& u) const;

    // int_a^b fn(r) dr with Gauss-Legendre panels on the grid cells (in log r)
    double integrate_fn(const std::function<double(double)>& fn, double a, double b) const;

    Vec sample(const std::function<double(double)>& fn) const;

    // Index of the first node with r_i >= r (size() if none).
    Index lower_index(double r) const;

    // int_{|x| > r_max} f dx for a density f ~ r^{-p} (p > N), given f(r_max).
    double tail_integral(double f_at_rmax, double p) const;

private:
    int N_;
    double x0_, h_, area_;
    Vec r_, w_;
};

RadialGrid make_log_grid(int N, double r_min, double r_max, int points);

} // namespace hartree

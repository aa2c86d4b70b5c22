#include "hartree/laplacian.hpp"

#include <cmath>
#include <vector>

namespace hartree {

namespace {
constexpr double c1 = 75.0 / 64.0, c2 = -25.0 / 384.0, c3 = 3.0 / 640.0;
constexpr double d1 = 3.0 / 4.0, d2 = -3.0 / 20.0, d3 = 1.0 / 60.0;
constexpr int G = 3; // ghosts per side
constexpr Index shift_window = 2 * G + 6;

// e(b) - e(a) for b - a <= 2G-1 when one side may sit in the shifted window
inline double ediff(const Vec& e, double u0, Index b, Index a) {
    const bool sa = a < shift_window, sb = b < shift_window;
    if (sa == sb) return e(b) - e(a);
    return sa ? (e(b) - u0) - e(a) : e(b) - (e(a) - u0);
}
} // namespace

Laplacian::Laplacian(const RadialGrid& grid) : grid_(&grid), N_(grid.dim()), h_(grid.h()) {
    const Vec& r = grid.r();
    const Index n = grid.size();
    // even extension: u(s) quadratic in s = r^2 through nodes 0, 1, 2
    const double s0 = r(0) * r(0), s1 = r(1) * r(1), s2 = r(2) * r(2);
    for (int k = 1; k <= G; ++k) {
        const double rk = r(0) * std::exp(-k * h_);
        const double s = rk * rk;
        ga_[k - 1] = (s - s0) * (s - s2) / ((s1 - s0) * (s1 - s2));
        gb_[k - 1] = (s - s0) * (s - s1) / ((s2 - s0) * (s2 - s1));
        gr_[k - 1] = std::exp(-(N_ - 2) * k * h_);
    }
    q_.resize(n + 1);
    for (Index m = 0; m <= n; ++m) q_(m) = h_ * std::exp((N_ - 2) * (grid.x0() + (m - 0.5) * h_));

    // assemble S column by column from the matrix-free operator
    std::vector<Eigen::Triplet<double>> trip;
    Vec e = Vec::Zero(n);
    const Vec& w = grid.w();
    for (Index j = 0; j < n; ++j) {
        e(j) = 1.0;
        Vec col = apply(e);
        e(j) = 0.0;
        const Index lo = std::max<Index>(0, j - 8), hi = std::min<Index>(n - 1, j + 8);
        for (Index i = lo; i <= hi; ++i)
            if (col(i) != 0.0) trip.emplace_back(i, j, -w(i) * col(i));
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> At = A.transpose();
    S_ = 0.5 * (A + At);
    S_.makeCompressed();
}

// Extended vector on [-G, n+G). The first `shift_window` entries are stored as
// u - u_0: differences are shift invariant and the origin ghosts then keep full
// relative precision. Stencils reaching past the window use plain values.
Eigen::VectorXd Laplacian::extend_shifted(const Vec& u) const {
    const Index n = u.size();
    Vec e(n + 2 * G);
    const double u0 = u(0);
    const double du1 = u(1) - u0, du2 = u(2) - u0;
    for (int k = 1; k <= G; ++k) e(G - k) = ga_[k - 1] * du1 + gb_[k - 1] * du2;
    for (Index i = 0; i < n; ++i) e(G + i) = (G + i < shift_window) ? u(i) - u0 : u(i);
    for (int k = 1; k <= G; ++k) e(G + n - 1 + k) = gr_[k - 1] * u(n - 1);
    return e;
}

Vec Laplacian::midpoint_gradient(const Vec& u) const {
    const Index n = u.size();
    Vec e = extend_shifted(u);
    const double u0 = u(0);
    Vec g(n + 1);
    for (Index m = 0; m <= n; ++m) {
        const Index a = G + m - 1; // node left of the midpoint, extended index
        g(m) = (c1 * ediff(e, u0, a + 1, a) + c2 * ediff(e, u0, a + 2, a - 1) + c3 * ediff(e, u0, a + 3, a - 2)) / h_;
    }
    return g;
}

Vec Laplacian::apply(const Vec& u) const {
    const Index n = u.size();
    Vec g = midpoint_gradient(u);
    Vec z = Vec::Zero(n + 2 * G);
    for (Index m = 0; m <= n; ++m) {
        const double F = q_(m) * g(m) / h_;
        const Index a = G + m - 1;
        z(a + 1) += c1 * F;
        z(a) -= c1 * F;
        z(a + 2) += c2 * F;
        z(a - 1) -= c2 * F;
        z(a + 3) += c3 * F;
        z(a - 2) -= c3 * F;
    }
    Vec y = z.segment(G, n);
    for (int k = 1; k <= G; ++k) {
        const double zk = z(G - k);
        y(0) += (1.0 - ga_[k - 1] - gb_[k - 1]) * zk;
        y(1) += ga_[k - 1] * zk;
        y(2) += gb_[k - 1] * zk;
        y(n - 1) += gr_[k - 1] * z(G + n - 1 + k);
    }
    const Vec& w = grid_->w();
    return -y.cwiseQuotient(w);
}

CVec Laplacian::apply(const CVec& u) const {
    Vec re = apply(Vec(u.real())), im = apply(Vec(u.imag()));
    CVec out(u.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

double Laplacian::dirichlet(const Vec& u) const {
    Vec g = midpoint_gradient(u);
    return grid_->area() * (q_.array() * g.array().square()).sum();
}

double Laplacian::dirichlet(const CVec& u) const {
    return dirichlet(Vec(u.real())) + dirichlet(Vec(u.imag()));
}

double Laplacian::dirichlet_pair(const CVec& a, const CVec& b) const {
    Vec ar = midpoint_gradient(Vec(a.real())), ai = midpoint_gradient(Vec(a.imag()));
    Vec br = midpoint_gradient(Vec(b.real())), bi = midpoint_gradient(Vec(b.imag()));
    return grid_->area() * (q_.array() * (ar.array() * br.array() + ai.array() * bi.array())).sum();
}
double Laplacian::dirichlet_region(const CVec& u, double r_lo, double r_hi) const {
    Vec gr = midpoint_gradient(Vec(u.real())), gi = midpoint_gradient(Vec(u.imag()));
    double s = 0.0;
    for (Index m = 0; m < q_.size(); ++m) {
        const double rm = std::exp(grid_->x0() + (m - 0.5) * h_);
        if (rm >= r_lo && rm < r_hi) s += q_(m) * (gr(m) * gr(m) + gi(m) * gi(m));
    }
    return grid_->area() * s;
}

Vec Laplacian::minus_delta(const Vec& u) const { return (S_ * u).cwiseQuotient(grid_->w()); }

CVec Laplacian::minus_delta(const CVec& u) const {
    CVec out(u.size());
    out.real() = minus_delta(Vec(u.real()));
    out.imag() = minus_delta(Vec(u.imag()));
    return out;
}

Vec Laplacian::dx(const Vec& u) const {
    const Index n = u.size();
    Vec e = extend_shifted(u);
    const double u0 = u(0);
    Vec d(n);
    for (Index i = 0; i < n; ++i) {
        const Index a = G + i;
        d(i) = (d1 * ediff(e, u0, a + 1, a - 1) + d2 * ediff(e, u0, a + 2, a - 2) + d3 * ediff(e, u0, a + 3, a - 3)) / h_;
    }
    return d;
}

CVec Laplacian::dx(const CVec& u) const {
    CVec out(u.size());
    out.real() = dx(Vec(u.real()));
    out.imag() = dx(Vec(u.imag()));
    return out;
}

} // namespace hartree

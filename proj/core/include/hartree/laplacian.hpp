#pragma once

#include "hartree/grid.hpp"

#include <Eigen/Sparse>

#include <array>

namespace hartree {

// Radial Laplacian Delta = r^{-N} d/dx (e^{(N-2)x} d/dx), x = log r, in the
// self-adjoint form  -Delta = W^{-1} E^T G^T Q G E  where G is the sixth-order
// staggered derivative, Q_m = h e^{(N-2)x_m} at cell midpoints and E appends
// ghost nodes: even reflection (quadratic in r^2) at the origin side and the
// r^{-(N-2)} decay law past r_max.
class Laplacian {
public:
    explicit Laplacian(const RadialGrid& grid);

    const RadialGrid& grid() const { return *grid_; }

    Vec apply(const Vec& u) const;
    CVec apply(const CVec& u) const;

    // d u / d x at the n+1 midpoints x_{i-1/2}, i = 0..n
    Vec midpoint_gradient(const Vec& u) const;
    // int |grad u|^2 dx over R^N from the staggered gradient
    double dirichlet(const Vec& u) const;
    double dirichlet(const CVec& u) const;
    // Re int grad conj(a) . grad b dx
    double dirichlet_pair(const CVec& a, const CVec& b) const;
    // Dirichlet integral restricted to midpoints with r_lo <= r < r_hi
    double dirichlet_region(const CVec& u, double r_lo, double r_hi) const;

    // -Delta u from the symmetrized stiffness, diag(w)^{-1} S u
    Vec minus_delta(const Vec& u) const;
    CVec minus_delta(const CVec& u) const;

    // du/dx at the nodes (sixth-order central differences on the extended vector)
    Vec dx(const Vec& u) const;
    CVec dx(const CVec& u) const;

    // Symmetric stiffness S with -Delta = diag(w)^{-1} S (no |S^{N-1}| factor).
    const Eigen::SparseMatrix<double>& stiffness() const { return S_; }

private:
    Eigen::VectorXd extend_shifted(const Vec& u) const;

    const RadialGrid* grid_;
    int N_;
    double h_;
    std::array<double, 3> ga_, gb_, gr_;
    Vec q_;
    Eigen::SparseMatrix<double> S_;
};

} // namespace hartree

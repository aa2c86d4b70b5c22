#include "hartree/lab.hpp"

namespace hartree {

Lab::Lab(const LabConfig& cfg) : cfg_(cfg) {
    grid_ = std::make_shared<const RadialGrid>(cfg.N, cfg.r_min, cfg.r_max, cfg.points);
    kernel_ = std::make_unique<RieszKernel>(*grid_);
    lap_ = std::make_unique<Laplacian>(*grid_);
    fit_ = fit_amplitude(*grid_, *kernel_, *lap_, 1e-2, 1e2, cfg.amplitude_tol);
    bubble_ = Bubble{cfg.N, fit_.c0};
    base_ = compute_constants(*grid_, *kernel_, *lap_, bubble_);
    ops_ = std::make_unique<LinOps>(*grid_, *kernel_, *lap_, bubble_);
}

const EigenPair& Lab::eigen() const {
    std::lock_guard lock(mu_);
    if (!eig_) eig_ = solve_eigen(*ops_, cfg_.eigen);
    return *eig_;
}

const Constants& Lab::constants() const {
    const EigenPair& e = eigen();
    std::lock_guard lock(mu_);
    if (!full_) {
        Constants c = base_;
        c.nu = e.nu;
        c.M = e.M;
        c.rhoY = e.rhoY;
        full_ = c;
    }
    return *full_;
}

} // namespace hartree

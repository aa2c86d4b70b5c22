#pragma once

#include "hartree/bubble.hpp"
#include "hartree/field.hpp"
#include "hartree/linops.hpp"

#include <memory>
#include <mutex>
#include <optional>

namespace hartree {

struct LabConfig {
    int N = 7;
    double r_min = 1e-4;
    double r_max = 1e3;
    int points = 2048;
    double amplitude_tol = 1e-5;
    EigenOptions eigen;
};

// Shared numerical context: grid, kernel, Laplacian, fitted bubble, constants and the
// unstable eigenpair. Everything is built once; the eigenpair on first request.
class Lab {
public:
    explicit Lab(const LabConfig& cfg = {});

    const LabConfig& config() const { return cfg_; }
    int dim() const { return cfg_.N; }
    const RadialGrid& grid() const { return *grid_; }
    std::shared_ptr<const RadialGrid> grid_ptr() const { return grid_; }
    const RieszKernel& kernel() const { return *kernel_; }
    const Laplacian& lap() const { return *lap_; }
    const Bubble& bubble() const { return bubble_; }
    const AmplitudeFit& amplitude() const { return fit_; }
    const LinOps& linops() const { return *ops_; }

    const EigenPair& eigen() const;
    // Includes nu, M and rhoY (forces the eigensolve).
    const Constants& constants() const;
    // Quadrature constants only, no eigensolve.
    const Constants& static_constants() const { return base_; }

    RadialField field(CVec v) const { return RadialField(grid_, std::move(v)); }

private:
    LabConfig cfg_;
    std::shared_ptr<const RadialGrid> grid_;
    std::unique_ptr<RieszKernel> kernel_;
    std::unique_ptr<Laplacian> lap_;
    AmplitudeFit fit_;
    Bubble bubble_;
    Constants base_;
    std::unique_ptr<LinOps> ops_;

    mutable std::mutex mu_;
    mutable std::optional<EigenPair> eig_;
    mutable std::optional<Constants> full_;
};

} // namespace hartree

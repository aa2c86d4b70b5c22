#pragma once

#include "hartree/lab.hpp"

namespace testing {

// One default lab per test binary (N = 7, [1e-4, 1e3], 2048 nodes).
inline const hartree::Lab& lab() {
    static const hartree::Lab instance{hartree::LabConfig{}};
    return instance;
}

// Closed forms for N = 7 from the conformal identity
// |x|^-4 * (1+|x|^2)^{-(N-2)} = pi^{N/2} Gamma((N-4)/2)/Gamma(N-2) (1+|x|^2)^{-2}, evaluated at 30 digits.
inline constexpr double kC0 = 4.15293272132714462997794038665;
inline constexpr double kC1 = 35.0;
inline constexpr double kC2 = 686.75723195807955311318334447;
inline constexpr double kC3 = 1716.89307989519888278295836118;
inline constexpr double kKappa = 0.00115437546467507226579940794673;
inline constexpr double kGradWSq = 153.125; // int |grad W|^2
inline constexpr double kV0 = 35.0;         // (|x|^-4 * W^2)(0)

// nodes where pointwise stencils are fully interior
inline bool interior(Eigen::Index i, Eigen::Index n) { return i >= 8 && i < n - 8; }

} // namespace testing

#pragma once

#include "hartree/kernel.hpp"
#include "hartree/laplacian.hpp"

namespace hartree {

// |x|^{-4} * |u|^2
Vec potential(const RieszKernel& k, const CVec& u);
// f(u) = (|x|^{-4} * |u|^2) u
CVec f_apply(const RieszKernel& k, const CVec& u);
// f'(u) g = (|x|^{-4} * |u|^2) g + 2 (|x|^{-4} * Re(u conj g)) u
CVec fprime_apply(const RieszKernel& k, const CVec& u, const CVec& g);
// Same with a precomputed potential |x|^{-4} * |u|^2.
CVec fprime_apply(const RieszKernel& k, const Vec& pot, const CVec& u, const CVec& g);
// F(u) = (|x|^{-4} * |u|^2) |u|^2 / 4
Vec F_density(const RieszKernel& k, const CVec& u);

} // namespace hartree

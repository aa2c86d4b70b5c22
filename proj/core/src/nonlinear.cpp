#include "hartree/nonlinear.hpp"

namespace hartree {

Vec potential(const RieszKernel& k, const CVec& u) { return k.convolve(u.cwiseAbs2()); }

CVec f_apply(const RieszKernel& k, const CVec& u) {
    Vec p = potential(k, u);
    return p.cast<cplx>().cwiseProduct(u);
}

CVec fprime_apply(const RieszKernel& k, const Vec& pot, const CVec& u, const CVec& g) {
    Vec m(u.size());
    for (Index i = 0; i < u.size(); ++i) m(i) = (u(i) * std::conj(g(i))).real();
    Vec q = k.convolve(m);
    CVec out(u.size());
    for (Index i = 0; i < u.size(); ++i) out(i) = pot(i) * g(i) + 2.0 * q(i) * u(i);
    return out;
}

CVec fprime_apply(const RieszKernel& k, const CVec& u, const CVec& g) {
    return fprime_apply(k, potential(k, u), u, g);
}

Vec F_density(const RieszKernel& k, const CVec& u) {
    Vec a = u.cwiseAbs2();
    return 0.25 * k.convolve(a).cwiseProduct(a);
}

} // namespace hartree

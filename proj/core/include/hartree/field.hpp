#pragma once

#include "hartree/grid.hpp"
#include "hartree/laplacian.hpp"

#include <iosfwd>
#include <memory>

namespace hartree {

// Complex samples of a radial function on a grid. Even at the origin by convention.
struct RadialField {
    std::shared_ptr<const RadialGrid> grid;
    CVec values;
    bool even_at_origin = true;

    RadialField() = default;
    RadialField(std::shared_ptr<const RadialGrid> g, CVec v);
    Index size() const { return values.size(); }
};

struct Norms {
    double l2 = 0.0;
    double h1dot = 0.0;
    double lp = 0.0;
    double p = 2.0;
};

// ||u||_{L^p(R^N)} including |S^{N-1}|; p in [1, inf).
double lp_norm(const RadialGrid& grid, const CVec& u, double p);
Norms norms(const Laplacian& lap, const CVec& u, double p);

// CSV with header "# N=<int> r_max=<float>" and columns r,re,im at 17 significant digits.
void write_field_csv(std::ostream& os, const RadialGrid& grid, const CVec& u);
struct FieldCsv {
    int N = 0;
    double r_max = 0.0;
    Vec r;
    CVec u;
};
FieldCsv read_field_csv(std::istream& is);

} // namespace hartree

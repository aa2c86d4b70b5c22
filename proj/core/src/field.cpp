#include "hartree/field.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hartree {

RadialField::RadialField(std::shared_ptr<const RadialGrid> g, CVec v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid || values.size() != grid->size())
        throw std::invalid_argument("RadialField: value count must equal node count");
}

double lp_norm(const RadialGrid& grid, const CVec& u, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm: p must lie in [1, inf)");
    Vec a(u.size());
    for (Index i = 0; i < u.size(); ++i) a(i) = std::pow(std::abs(u(i)), p);
    return std::pow(grid.integrate(a), 1.0 / p);
}

Norms norms(const Laplacian& lap, const CVec& u, double p) {
    Norms n;
    n.p = p;
    n.l2 = lap.grid().l2(u);
    n.h1dot = std::sqrt(lap.dirichlet(u));
    n.lp = lp_norm(lap.grid(), u, p);
    return n;
}

void write_field_csv(std::ostream& os, const RadialGrid& grid, const CVec& u) {
    os << "# N=" << grid.dim() << " r_max=" << std::setprecision(17) << grid.r_max() << "\n";
    os << "r,re,im\n";
    for (Index i = 0; i < u.size(); ++i)
        os << std::setprecision(17) << grid.r()(i) << "," << u(i).real() << "," << u(i).imag() << "\n";
}

FieldCsv read_field_csv(std::istream& is) {
    FieldCsv out;
    std::string line;
    std::vector<double> r, re, im;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                if (tok.rfind("N=", 0) == 0) out.N = std::stoi(tok.substr(2));
                else if (tok.rfind("r_max=", 0) == 0) out.r_max = std::stod(tok.substr(6));
            }
            continue;
        }
        if (line.rfind("r,", 0) == 0) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) throw std::runtime_error("malformed field csv line: " + line);
        if (!std::getline(ls, c, ',')) c = "0";
        r.push_back(std::stod(a));
        re.push_back(std::stod(b));
        im.push_back(std::stod(c));
    }
    out.r = Eigen::Map<Vec>(r.data(), static_cast<Index>(r.size()));
    out.u.resize(static_cast<Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) out.u(static_cast<Index>(i)) = cplx(re[i], im[i]);
    return out;
}

} // namespace hartree

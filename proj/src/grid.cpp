#include "ssqm/grid.hpp"

#include "ssqm/errors.hpp"

#include <cmath>
#include <sstream>

namespace ssqm {

std::vector<double> Grid::linspace(double lo, double hi, int n) {
    if (n < 1) throw DomainError("grid needs at least one sample");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

Grid Grid::make(double xlo, double xhi, int nx, double tlo, double thi, int nt) {
    Grid g;
    g.xs = linspace(xlo, xhi, nx);
    g.ts = linspace(tlo, thi, nt);
    return g;
}

Grid Grid::default_grid() { return make(0.40, 2.32, 25, 0.11, 2.03, 25); }

Grid Grid::refined(int nx, int nt) const {
    Grid g = make(xs.front(), xs.back(), nx, ts.front(), ts.back(), nt);
    g.pole_radius = pole_radius;
    return g;
}

void Grid::validate(const std::vector<double>& poles) const {
    for (const auto* v : {&xs, &ts})
        for (size_t i = 1; i < v->size(); ++i)
            if (!((*v)[i] > (*v)[i - 1])) throw DomainError("grid samples must be strictly increasing");
    for (double p : poles)
        for (double x : xs)
            if (std::abs(x - p) < pole_radius)
                throw DomainError("grid sample x = " + std::to_string(x) + " within pole radius of " +
                                  std::to_string(p));
}

std::string Grid::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "x:" << xs.front() << ":" << xs.back() << ":" << xs.size() << " t:" << ts.front() << ":" << ts.back()
       << ":" << ts.size();
    return os.str();
}

}  // namespace ssqm

#pragma once

#include <string>
#include <vector>

namespace ssqm {

struct Grid {
    std::vector<double> xs, ts;
    double pole_radius = 0.05;

    // x in {0.40, 0.48, ..., 2.32}, t in {0.11, 0.19, ..., 2.03}
    static Grid default_grid();
    static std::vector<double> linspace(double lo, double hi, int n);
    static Grid make(double xlo, double xhi, int nx, double tlo, double thi, int nt);
    // same bounds, new sample counts
    Grid refined(int nx, int nt) const;

    // throws DomainError on unsorted samples or samples near a pole
    void validate(const std::vector<double>& poles = {}) const;
    std::string describe() const;
};

}  // namespace ssqm

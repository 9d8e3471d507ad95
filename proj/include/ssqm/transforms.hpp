#pragma once

// Point transformations between the free and the oscillator-type
// Schrodinger equations, and the s3-phase conjugation of the linear case.

#include "ssqm/cliffop.hpp"
#include "ssqm/numerics.hpp"

#include <utility>

namespace ssqm {

// Maps the free equation (index 2) onto i dpsi/dt = (-Dx^2/2 + omega^2 x^2/2
// + beta x + gamma) psi (index 1).
struct PointMap {
    double omega = 1, beta = 0, gamma = 0;
    bool printed_phase = false;  // keep 2 omega^3 in the last phase term

    // (t2, x2) -> (t1, x1)
    std::pair<long double, long double> forward(long double t2, long double x2) const;
    // (t1, x1) -> (t2, x2); DomainError when |omega t1| >= pi/2
    std::pair<long double, long double> inverse(long double t1, long double x1) const;
    // prefactor and phase as a function of x = x2, t = t2
    Expr multiplier() const;
    std::complex<long double> multiplier_value(long double x2, long double t2) const;
    double potential(double x) const { return 0.5 * omega * omega * x * x + beta * x + gamma; }
};

PointMap niederer_map(double omega, double beta = 0, double gamma = 0);

// psi1(x1, t1) = M(x2, t2) psi2(x2, t2). Checks first that psi2 solves the
// free equation at five probe points (DomainError otherwise).
Sampler lift_wavefunction(const Sampler& psi2, const PointMap& m);

// (1 + i t)^(-1/2) exp(-x^2 / (2 (1 + i t)))
Sampler free_gaussian();
// exp(i k x - i k^2 t / 2)
Sampler plane_wave(double k);

// residuals at step h and h/2 for a sampler against potential V
struct FdCheck {
    double residual_h = 0, residual_h2 = 0, ratio = 0;
};
FdCheck fd_check(const Sampler& psi, const RealFn& V, double h = 1e-3);
// x in {-0.5, 0, 0.5}, t in {0.1, 0.2, 0.3}
std::vector<std::pair<double, double>> fd_probe_points();

// U D U^-1 with U = exp(i a t s3 / 2). NotLinearCase unless the s3
// coefficient of D is the constant a / 2.
CliffOp conjugate_by_phase(const CliffOp& delta_ss, const CQ& a);

}  // namespace ssqm

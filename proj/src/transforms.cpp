#include "ssqm/transforms.hpp"

#include <cmath>
#include <numbers>

namespace ssqm {

using ld = long double;
using cl = std::complex<long double>;

PointMap niederer_map(double omega, double beta, double gamma) {
    if (!(omega > 0)) throw DomainError("the point map needs omega > 0");
    PointMap m;
    m.omega = omega;
    m.beta = beta;
    m.gamma = gamma;
    return m;
}

std::pair<ld, ld> PointMap::forward(ld t2, ld x2) const {
    const ld w = omega, s = beta / (w * w);
    const ld t1 = std::atan(w * t2) / w;
    const ld x1 = (x2 + s) / std::sqrt(1 + w * w * t2 * t2) - s;
    return {t1, x1};
}

std::pair<ld, ld> PointMap::inverse(ld t1, ld x1) const {
    const ld w = omega, s = beta / (w * w);
    if (std::abs(w * t1) >= std::numbers::pi_v<ld> / 2) throw DomainError("|omega t1| reaches pi/2");
    const ld t2 = std::tan(w * t1) / w;
    const ld x2 = (x1 + s) * std::sqrt(1 + w * w * t2 * t2) - s;
    return {t2, x2};
}

Expr PointMap::multiplier() const {
    const Expr x = Expr::x(), t = Expr::t(), I = Expr::I();
    const Expr w = Expr::real(omega), b = Expr::real(beta), g = Expr::real(gamma);
    const Expr d = 1 + w * w * t * t;
    const Expr last = printed_phase ? w * w * w : w * w;
    Expr phase = (I * b * b / (2 * w * w * w) - I * g / w) * atan(w * t) - I * b * b / (2 * last) * t / d;
    phase = phase - I * t * x * (2 * b + w * w * x) / (2 * d);
    return exp(Expr::frac(1, 4) * ln(d) + phase);
}

cl PointMap::multiplier_value(ld x2, ld t2) const {
    const ld w = omega, b = beta, g = gamma;
    const ld d = 1 + w * w * t2 * t2;
    const ld last = printed_phase ? w * w * w : w * w;
    const cl I(0, 1);
    cl phase = (I * (b * b / (2 * w * w * w)) - I * (g / w)) * std::atan(w * t2) - I * (b * b / (2 * last)) * (t2 / d);
    phase -= I * (t2 * x2 * (2 * b + w * w * x2) / (2 * d));
    return std::pow(d, 0.25L) * std::exp(phase);
}

Sampler lift_wavefunction(const Sampler& psi2, const PointMap& m) {
    std::vector<std::pair<double, double>> probes = {{-0.5, 0.2}, {-0.25, 0.2}, {0, 0.2}, {0.25, 0.2}, {0.5, 0.2}};
    const double r = fd_schrodinger_residual(psi2, [](ld) { return 0.0L; }, probes);
    if (!(r < 1e-6)) throw DomainError("psi2 does not solve the free equation (FD residual " + std::to_string(r) + ")");
    return [psi2, m](ld x1, ld t1) {
        auto [t2, x2] = m.inverse(t1, x1);
        return m.multiplier_value(x2, t2) * psi2(x2, t2);
    };
}

Sampler free_gaussian() {
    return [](ld x, ld t) {
        const cl z(1, t);
        return std::exp(-x * x / (2.0L * z)) / std::sqrt(z);
    };
}

Sampler plane_wave(double k) {
    return [k](ld x, ld t) {
        const ld kk = k;
        return std::exp(cl(0, kk * x - kk * kk * t / 2));
    };
}

std::vector<std::pair<double, double>> fd_probe_points() {
    std::vector<std::pair<double, double>> pts;
    for (double x : {-0.5, 0.0, 0.5})
        for (double t : {0.1, 0.2, 0.3}) pts.push_back({x, t});
    return pts;
}

FdCheck fd_check(const Sampler& psi, const RealFn& V, double h) {
    FdCheck c;
    const auto pts = fd_probe_points();
    c.residual_h = fd_schrodinger_residual(psi, V, pts, h);
    c.residual_h2 = fd_schrodinger_residual(psi, V, pts, h / 2);
    c.ratio = c.residual_h2 > 0 ? c.residual_h / c.residual_h2 : 0;
    return c;
}

CliffOp conjugate_by_phase(const CliffOp& d, const CQ& a) {
    const Expr s3 = d.coeff(3, 0, 0);
    if (!s3.is_constant() || s3.constant_value() != a / CQ(2))
        throw NotLinearCase("the s3 coefficient is not the constant a/2");
    for (const auto& [key, c] : d.terms())
        if (key[0] == 3 && (key[1] != 0 || key[2] != 0)) throw NotLinearCase("s3 carries derivatives");
    // U = e^{i a t/2} P+ + e^{-i a t/2} P-, U^-1 = e^{-i a t/2} P+ + e^{i a t/2} P-
    const Expr th = Expr(CQ::I() * a / CQ(2)) * Expr::t();
    const Expr ep = exp(th), em = exp(-th), h = Expr::frac(1, 2);
    const CliffOp s0 = CliffOp::sigma(0), s3op = CliffOp::sigma(3);
    const CliffOp U = (h * (ep + em)) * s0 + (h * (ep - em)) * s3op;
    const CliffOp Ui = (h * (ep + em)) * s0 - (h * (ep - em)) * s3op;
    return compose(compose(U, d), Ui);
}

}  // namespace ssqm

#include "ssqm/models.hpp"

#include <algorithm>
#include <cmath>

namespace ssqm {

std::vector<double> real_poles(const Expr& e) {
    std::vector<double> out;
    for (const auto& [a, dv] : e.node().den) {
        if (a.kind != Atom::X) continue;
        for (auto r : upoly::roots(dv))
            if (std::abs(r.imag()) < 1e-9 * std::max(1.0, std::abs(r.real()))) out.push_back(r.real());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              out.end());
    return out;
}

Superpotential Superpotential::from_expr(const Expr& w, std::string text, std::map<std::string, double> params) {
    if (w.depends_on(Var::T)) throw DomainError("superpotential must not depend on t");
    Superpotential s;
    s.w = w;
    s.poles = real_poles(w);
    s.params = std::move(params);
    s.text = std::move(text);
    return s;
}

Expr potential_from_superpotential(const Expr& w) { return Expr::frac(1, 2) * w * w; }

std::pair<Expr, Expr> superpartners(const Expr& w) {
    Expr half = Expr::frac(1, 2);
    Expr sq = half * w * w, d = half * differentiate(w, Var::X);
    return {sq + d, sq - d};
}

CliffOp scalar_hamiltonian(const Expr& v, int mu) {
    return CliffOp::term(Expr::frac(-1, 2), mu, 0, 2) + CliffOp::scalar(v, mu);
}

CliffOp hamiltonian_ss(const Expr& w) {
    return scalar_hamiltonian(potential_from_superpotential(w)) +
           CliffOp::scalar(Expr::frac(1, 2) * differentiate(w, Var::X), 3);
}

ModelSet build_models(const Expr& w) {
    ModelSet m;
    m.U = potential_from_superpotential(w);
    std::tie(m.V1, m.V2) = superpartners(w);
    m.H_b = scalar_hamiltonian(m.U);
    m.H_f = CliffOp::scalar(Expr::frac(1, 2) * differentiate(w, Var::X), 3);
    m.H_SS = m.H_b + m.H_f;
    const CliffOp minus_idt = CliffOp::term(-Expr::I(), 0, 1, 0);
    m.Delta = minus_idt + scalar_hamiltonian(m.U);
    m.Delta_SS = minus_idt + m.H_SS;
    return m;
}

std::pair<CliffOp, CliffOp> projectors() {
    CliffOp s0 = CliffOp::sigma(0), s3 = CliffOp::sigma(3);
    return {Expr::frac(1, 2) * (s0 + s3), Expr::frac(1, 2) * (s0 - s3)};
}

}  // namespace ssqm

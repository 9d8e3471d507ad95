#include <doctest.h>

#include "ssqm/models.hpp"

using namespace ssqm;

namespace {
const Expr x = Expr::x(), t = Expr::t();
const Expr w = Expr::param("w");

std::vector<Expr> corpus() {
    return {Expr(), 3 * x, 2 * x - 1, 1 / x, -1 / x, 2 * x + 1 / x, 2 * x - 1 / x, 2 / x, 2 * x + 3 / x,
            x * x * x * x, exp(x) + x};
}
}  // namespace

TEST_CASE("potential from the superpotential") {
    CHECK(potential_from_superpotential(w * x) == Expr::frac(1, 2) * w * w * x * x);
    CHECK(potential_from_superpotential(Expr()).is_zero());
    CHECK(potential_from_superpotential(1 / x) == 1 / (2 * x * x));
}

TEST_CASE("superpartner potentials") {
    const Expr a = Expr::param("a"), b = Expr::param("b");
    auto [V1, V2] = superpartners(a * x + b);
    CHECK(V1 == Expr::frac(1, 2) * (a * x + b) * (a * x + b) + a / 2);
    std::tie(V1, V2) = superpartners(1 / x);
    CHECK(V1.is_zero());
    CHECK(V2 == 1 / (x * x));
    std::tie(V1, V2) = superpartners(Expr());
    CHECK(V1.is_zero());
    CHECK(V2.is_zero());
}

TEST_CASE("partner swap under W -> -W") {
    for (const Expr& W : corpus()) {
        const auto [V1, V2] = superpartners(W);
        const auto [U1, U2] = superpartners(-W);
        CHECK(V1 == U2);
        CHECK(V2 == U1);
    }
}

TEST_CASE("model set invariants on the corpus") {
    for (const Expr& W : corpus()) {
        const ModelSet m = build_models(W);
        CHECK(m.H_SS == m.H_b + m.H_f);
        CHECK(m.Delta_SS == Expr(-1) * Expr::I() * CliffOp::dt() + m.H_SS);
        CHECK(m.V1 + m.V2 == W * W);
        CHECK(m.V1 - m.V2 == differentiate(W, Var::X));
        CHECK(m.Delta_SS.parity() == Parity::Even);
        CHECK(anticommutator(m.H_f, CliffOp::sigma(1)).is_zero());
        CHECK(anticommutator(m.H_f, CliffOp::sigma(2)).is_zero());
        CHECK(m.Delta.parity() == Parity::Even);
        for (const auto& [key, c] : m.Delta.terms()) CHECK(key[0] == 0);
    }
}

TEST_CASE("Hamiltonians of the oscillator and the linear case") {
    const CliffOp H = hamiltonian_ss(w * x);
    const CliffOp want = Expr::frac(-1, 2) * CliffOp::dx(2) + Expr::frac(1, 2) * w * w * x * x * CliffOp::sigma(0) +
                         Expr::frac(1, 2) * w * CliffOp::sigma(3);
    CHECK(H == want);
    const Expr a = Expr::param("a"), b = Expr::param("b");
    const CliffOp H2 = hamiltonian_ss(a * x + b);
    CHECK(H2.coeff(0, 0, 0) == Expr::frac(1, 2) * (a * a * x * x + 2 * a * b * x + b * b));
    CHECK(H2.coeff(3, 0, 0) == a / 2);
    const ModelSet free = build_models(Expr());
    CHECK(free.Delta_SS == Expr(-1) * Expr::I() * CliffOp::dt() + Expr::frac(-1, 2) * CliffOp::dx(2));
}

TEST_CASE("projectors") {
    const auto [Pp, Pm] = projectors();
    CHECK(Pp + Pm == CliffOp::sigma(0));
    CHECK(compose(Pp, Pp) == Pp);
    CHECK(compose(Pm, Pm) == Pm);
    CHECK(compose(Pp, Pm).is_zero());
    const Expr W = 2 * x + 3 / x;
    const ModelSet m = build_models(W);
    const CliffOp upper = compose(compose(Pp, m.Delta_SS), Pp);
    const CliffOp scalar = Expr(-1) * Expr::I() * CliffOp::dt() + scalar_hamiltonian(m.V1);
    CHECK(upper == compose(scalar, Pp));
}

TEST_CASE("superpotentials must be static and expose their poles") {
    CHECK_THROWS_AS(Superpotential::from_expr(x * t), DomainError);
    const Superpotential s = Superpotential::from_expr(1 / x + 1 / (x - 2));
    REQUIRE(s.poles.size() == 2);
    CHECK(s.poles[0] == doctest::Approx(0.0));
    CHECK(s.poles[1] == doctest::Approx(2.0));
    CHECK(Superpotential::from_expr(3 * x).poles.empty());
}

#include <doctest.h>

#include "ssqm/superalg.hpp"
#include "ssqm/symmetry.hpp"

#include <cmath>

using namespace ssqm;

namespace {
const Expr x = Expr::x();

GradedOperatorSet witten_set(const Expr& W) {
    GradedOperatorSet s;
    s.hamiltonian = hamiltonian_ss(W);
    const auto [q1, q2] = witten_pair(W);
    s.even = {CliffOp::sigma(0), CliffOp::sigma(3), s.hamiltonian};
    s.even_labels = {"s0", "s3", "H"};
    s.odd = {q1, q2};
    s.odd_labels = {"Q1", "Q2"};
    return s;
}

Expr sampled(const Expr& W, double lo, double hi) {
    auto d = std::make_shared<SampleData>();
    d->x0 = lo;
    d->h = 1e-3;
    std::array<CompiledExpr, 4> c{CompiledExpr(W), CompiledExpr(differentiate(W, Var::X)),
                                  CompiledExpr(differentiate(W, Var::X, 2)), CompiledExpr(differentiate(W, Var::X, 3))};
    for (double xv = lo; xv <= hi + 1e-12; xv += d->h)
        for (int k = 0; k < 4; ++k) d->f[k].push_back(double(c[size_t(k)](xv, 0).real()));
    return Expr::sample(d);
}
}  // namespace

TEST_CASE("sqm(2) identities hold exactly for symbolic W") {
    const Grid g = Grid::default_grid();
    for (const Expr& W : {Expr::param("w") * x, 3 * x, pow(x, 4), 1 / x, 2 * x + 3 / x, exp(x)}) {
        const Sqm2Report r = verify_sqm2(W, g);
        CHECK(r.ok);
        CHECK(r.exact);
        CHECK(r.checks.size() == 5);
    }
}

TEST_CASE("sqm(2) identities hold on the grid for sampled W") {
    const Grid g = Grid::default_grid();
    const W0Solution s = integrate_w0(1, 0, {0.1, 0, 0}, 0.3, 2.5);
    for (const Expr& W : {s.w0 + x, sampled(1 / x, 0.3, 2.5), sampled(pow(x, 4), 0.3, 2.5)}) {
        const Sqm2Report r = verify_sqm2(W, g);
        CHECK(!r.exact);
        CHECK(r.ok);
        for (const auto& c : r.checks) CHECK(c.residual < 1e-8);
    }
}

TEST_CASE("bracket tables of small sets") {
    const Grid g = Grid::default_grid();
    GradedOperatorSet s;
    s.hamiltonian = hamiltonian_ss(pow(x, 4));
    s.even = {s.hamiltonian, CliffOp::sigma(0)};
    const StructureTable t = bracket_closure(s, g);
    CHECK(t.closed);
    CHECK(t.dimension == 2);
    for (const auto& e : t.entries)
        for (const auto& c : e.coeffs) CHECK(std::abs(c) < 1e-12);

    const StructureTable w = bracket_closure(witten_set(pow(x, 4)), g);
    CHECK(w.closed);
    CHECK(w.dimension == 5);
    CHECK(w.tag == "[sqm(2)⊞so(2)]⊕gl(1)");
    CHECK(w.jacobi_residual < 1e-8);
    // {Q1, Q1} = 4 H
    CHECK(std::abs(w.coeff(3, 3, 2) - 4.0) < 1e-9);
    // graded antisymmetry
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k) {
                const double sign = (w.odd[size_t(i)] && w.odd[size_t(j)]) ? 1 : -1;
                CHECK(std::abs(w.coeff(i, j, k) - sign * w.coeff(j, i, k)) < 1e-12);
            }
}

TEST_CASE("bracket closure rejects non-symmetries and dependent sets") {
    const Grid g = Grid::default_grid();
    GradedOperatorSet s = witten_set(pow(x, 4));
    s.even.push_back(x * CliffOp::sigma(0));
    CHECK_THROWS_AS(bracket_closure(s, g), NotSymmetric);
    s = witten_set(pow(x, 4));
    s.even.push_back(Expr(2) * CliffOp::sigma(3));
    CHECK_THROWS_AS(bracket_closure(s, g), IllConditioned);
}

TEST_CASE("structure tags") {
    CHECK(identify_structure({12, 12}, 13) == "osp(2/2)⊞sh(2/2)");
    CHECK(identify_structure({10, 10}, 7) == "[osp(2/1)⊞so(2)]⊕gl(1)");
    CHECK(identify_structure({8, 4}, 5) == "[sqm(2)⊞so(2)]⊕gl(1)");
    CHECK(identify_structure({8, 4}, 9) == "unknown");
}

TEST_CASE("greedy closure") {
    const Grid g = Grid::default_grid();
    const ClosureResult lin = greedy_closure(2 * x + 1, g);
    CHECK(lin.dimension == 13);
    CHECK(lin.tag == "osp(2/2)⊞sh(2/2)");
    CHECK(lin.table.closed);
    CHECK(lin.table.jacobi_residual < 1e-8);
    CHECK(lin.history.front() == 5);
    CHECK(lin.set.even.size() == 7);
    CHECK(lin.set.odd.size() == 6);

    const ClosureResult gen = greedy_closure(pow(x, 4), g);
    CHECK(gen.dimension == 5);
    CHECK(gen.tag == "[sqm(2)⊞so(2)]⊕gl(1)");

    // for W = 1/x the two extra superconformal charges close as well
    const ClosureResult cou = greedy_closure(1 / x, g);
    CHECK(cou.dimension == 9);
    CHECK(cou.table.jacobi_residual < 1e-8);
    CHECK(cou.history == std::vector<int>{5, 7, 9});
}

TEST_CASE("chain containment") {
    const Grid g = Grid::default_grid();
    for (const Expr& W : {1 / x, 2 * x + 1 / x, 2 * x + 1}) {
        const ClosureResult r = greedy_closure(W, g);
        CHECK(span_contains(r.set, witten_set(W), g));
        CHECK(!span_contains(witten_set(W), r.set, g));
    }
}

TEST_CASE("closure is invariant under rescaling basis elements") {
    const Grid g = Grid::default_grid();
    const ClosureResult r = greedy_closure(1 / x, g);
    GradedOperatorSet s = r.set;
    for (size_t i = 0; i < s.even.size(); ++i) s.even[i] = Expr(CQ(long(i) + 2)) * s.even[i];
    for (size_t i = 0; i < s.odd.size(); ++i) s.odd[i] = Expr(CQ::frac(-1, long(i) + 2)) * s.odd[i];
    const StructureTable t = bracket_closure(s, g);
    CHECK(t.closed);
    CHECK(t.dimension == r.dimension);
    CHECK(t.jacobi_residual < 1e-8);
}

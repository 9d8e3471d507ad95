#include <doctest.h>

#include "ssqm/superalg.hpp"
#include "ssqm/symmetry.hpp"

#include <cmath>
#include <random>

using namespace ssqm;

namespace {
const Expr x = Expr::x(), t = Expr::t();

std::array<CQ, 12> constants(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> d(-5, 5);
    std::array<CQ, 12> c;
    for (auto& v : c) v = CQ::frac(d(rng), 3);
    return c;
}

double residual_max(const Expr& W, const OddCoefficients& oc, const Grid& g) {
    const auto [r1, r2] = odd_residuals(W, oc);
    return std::max(max_abs_on_grid(r1, g), max_abs_on_grid(r2, g));
}
}  // namespace

TEST_CASE("Boyer verdicts") {
    BoyerInfo b = boyer_classify(Expr::frac(9, 2) * x * x);
    CHECK(b.verdict == BoyerVerdict::Quadratic);
    CHECK(b.count == 6);
    CHECK(b.tag == "so(2,1)⊞h(2)");
    CHECK(b.alpha == CQ(9));
    b = boyer_classify(1 / (x * x) + x * x);
    CHECK(b.verdict == BoyerVerdict::InverseSquare);
    CHECK(b.count == 4);
    CHECK(b.tag == "so(2,1)⊕gl(1)");
    CHECK(b.delta == CQ(1));
    b = boyer_classify(pow(x, 4));
    CHECK(b.verdict == BoyerVerdict::Generic);
    CHECK(b.count == 2);
    CHECK(b.tag == "so(2)⊕gl(1)");
    // shifted inverse square with a centered quadratic
    CHECK(boyer_classify(3 / ((x - 1) * (x - 1)) + (x - 1) * (x - 1)).count == 4);
    // off-center quadratic part
    CHECK(boyer_classify(1 / (x * x) + x).count == 2);
    CHECK(boyer_classify(exp(x)).count == 2);
}

TEST_CASE("even counts") {
    CHECK(even_count(2 * x + 3).total == 12);
    CHECK(even_count(Expr(5)).total == 12);
    CHECK(even_count(1 / x).total == 10);
    CHECK(even_count(-1 / x).total == 10);
    CHECK(even_count(2 / x).total == 8);
    CHECK(even_count(2 * x + 3 / x).total == 8);
    CHECK(even_count(pow(x, 4)).total == 4);
    CHECK(even_count(2 * x + 1 / x).total == 10);
    CHECK(even_count(1 / x + 0).total == even_count(1 / x).total);
}

TEST_CASE("even solutions match the Boyer counts and are symmetries") {
    for (const Expr& W : {2 * x + 1, 1 / x, 2 / x, 2 * x + 3 / x, pow(x, 4)}) {
        const auto [V1, V2] = superpartners(W);
        const EvenClassification ev = even_count(W);
        const CliffOp H = hamiltonian_ss(W);
        const auto s1 = even_solutions(V1), s2 = even_solutions(V2);
        CHECK(int(s1.size()) == ev.n1);
        CHECK(int(s2.size()) == ev.n2);
        for (const auto& s : s1) {
            CHECK(boyer_residual(V1, s.a0, s.b0, s.c0).is_zero());
            CHECK(schrodinger_derivative(even_operator(V1, s, +1), H).is_zero());
        }
        for (const auto& s : s2) CHECK(schrodinger_derivative(even_operator(V2, s, -1), H).is_zero());
    }
}

TEST_CASE("zero family gives zero residuals") {
    const std::array<CQ, 12> zero{};
    for (const Expr& W : {2 * x + 1, 1 / x}) {
        const auto [r1, r2] = odd_residuals(W, odd_family(CQ(2), CQ(1), zero));
        CHECK(r1.is_zero());
        CHECK(r2.is_zero());
    }
}

TEST_CASE("both constant families annihilate the residuals of a linear W") {
    for (auto [a, b] : {std::pair{CQ(0), CQ(0)}, {CQ(0), CQ::frac(3, 2)}, {CQ(2), CQ(3)}, {CQ::frac(-1, 2), CQ(1)}}) {
        const Expr W = Expr(a) * x + Expr(b);
        const auto [r1, r2] = odd_residuals(W, odd_family(a, b, constants(7)));
        CHECK(r1.is_zero());
        CHECK(r2.is_zero());
    }
}

TEST_CASE("family nullity is twelve for linear W") {
    const Grid g = Grid::default_grid();
    for (auto [a, b] : {std::pair{0.0, 0.0}, {0.0, 1.5}, {1.0, 0.0}, {2.0, 3.0}, {-0.5, 0.25}}) {
        const RankReport r = family_rank(Expr::real(a) * x + Expr::real(b), CQ::from_double(a), CQ::from_double(b), g);
        CHECK(r.nullity == 12);
        CHECK(r.cols == 12);
    }
}

TEST_CASE("printed a != 0 family leaves three constants unannihilated") {
    const Grid g = Grid::default_grid();
    const RankReport r = family_rank(2 * x + 3, CQ(2), CQ(3), g, true);
    CHECK(r.nullity == 9);
    CHECK(family_rank(2 * x + 3, CQ(2), CQ(3), g, false).nullity == 12);
    // the b-dependent defects vanish at b = 0
    CHECK(family_rank(x, CQ(1), CQ(0), g, true).nullity == 12);
}

TEST_CASE("odd counts") {
    const Grid g = Grid::default_grid();
    CHECK(odd_count(2 * x + 3, 2, 3, g).count == 12);
    CHECK(odd_count(Expr(4), 0, 4, g).count == 12);
    CHECK(odd_count(1 / x, 0, 0, g).count == 10);
    CHECK(odd_count(-1 / x, 0, 0, g).count == 10);
    CHECK(odd_count(2 / x, 0, 0, g).count == 4);
    CHECK(odd_count(2 * x + 3 / x, 2, 0, g).count == 4);
    CHECK(odd_count(2 * x + 1 + 1 / (x + Expr::frac(1, 2)), 2, 1, g).count == 10);
    const OddCountReport r = odd_count(pow(x, 4), 0, 0, g);
    CHECK(r.count == 2);
    CHECK(r.gap >= 10);
}

TEST_CASE("odd counts are stable under grid refinement") {
    const Grid g = Grid::default_grid(), fine = g.refined(35, 35);
    for (const Expr& W : {2 * x + 1, 1 / x, 2 / x, 2 * x + 3 / x, pow(x, 4)}) {
        const auto lp = linear_part(W);
        REQUIRE(lp);
        const double a = lp->a.re.get_d(), b = lp->b.re.get_d();
        CHECK(odd_count(W, a, b, g).count == odd_count(W, a, b, fine).count);
    }
}

TEST_CASE("exact odd solutions contain the Witten pair and are symmetries") {
    const Grid g = Grid::default_grid();
    for (const Expr& W : {2 * x + 1, 1 / x, pow(x, 4)}) {
        const auto lp = linear_part(W);
        const auto sols = odd_solutions_exact(W, lp->a, g);
        REQUIRE(sols);
        const CliffOp H = hamiltonian_ss(W);
        GradedOperatorSet all, witten;
        all.hamiltonian = witten.hamiltonian = H;
        for (const auto& s : *sols) {
            const CliffOp q = odd_operator(W, s);
            CHECK(schrodinger_derivative(q, H).is_zero());
            CHECK(q.parity() == Parity::Odd);
            all.odd.push_back(q);
        }
        const auto [q1, q2] = witten_pair(W);
        witten.odd = {q1, q2};
        CHECK(span_contains(all, witten, g));
    }
}

TEST_CASE("linear part extraction") {
    auto lp = linear_part(2 * x + 1 + 1 / (x + 3));
    REQUIRE(lp);
    CHECK(lp->a == CQ(2));
    CHECK(lp->b == CQ(1));
    lp = linear_part(pow(x, 4) + x);
    REQUIRE(lp);
    CHECK(lp->higher_degree);
    CHECK(!linear_part(exp(x)));
}

TEST_CASE("A(0) operator for constant W") {
    const Grid g = Grid::default_grid();
    for (const CQ& b : {CQ(0), CQ(1), CQ::frac(5, 2)}) {
        const Expr W(b);
        const CliffOp q = q1_A0(b, W);
        CHECK(q.parity() == Parity::Odd);
        CHECK(max_abs_on_grid(schrodinger_derivative(q, hamiltonian_ss(W)), g) < 1e-9);
        CHECK(schrodinger_derivative(q, hamiltonian_ss(W)).is_zero());
        // at t = 0 only the multiplicative s1 term survives
        CliffOp at0;
        for (const auto& [key, c] : q.terms()) at0 += CliffOp::term(substitute_var(c, Var::T, Expr()), key[0], key[1], key[2]);
        CHECK(at0 == Expr::frac(1, 4) * x * x * CliffOp::sigma(1));
    }
}

TEST_CASE("printed A(0) operator with x/4 is not a symmetry") {
    const Grid g = Grid::default_grid();
    const CliffOp q = q1_A0(CQ(1), Expr(1), true);
    CHECK(max_abs_on_grid(schrodinger_derivative(q, hamiltonian_ss(Expr(1))), g) > 0.1);
    CliffOp at0;
    for (const auto& [key, c] : q.terms()) at0 += CliffOp::term(substitute_var(c, Var::T, Expr()), key[0], key[1], key[2]);
    CHECK(at0 == Expr::frac(1, 4) * x * CliffOp::sigma(1));
}

TEST_CASE("W0 conditions of the A(0) direction") {
    for (const Expr& e : w0_conditions(Expr(), CQ(2))) CHECK(e.is_zero());
    const auto c = w0_conditions(1 / x, CQ(0));
    CHECK(c[2] == Expr(1));
    const Expr cc = Expr::frac(3, 2);
    const auto d = w0_conditions(cc / (x * x), CQ(0));
    CHECK(d[2].is_zero());
    CHECK(!d[0].is_zero());
    CHECK(!d[1].is_zero());
}

TEST_CASE("C family residuals reduce to the W0 equation") {
    CHECK_THROWS_AS(odd_C_family(CQ(0), CQ(1), CQ(1)), DegenerateCase);
    const OddCoefficients z = odd_C_family(CQ(1), CQ(2), CQ(0));
    for (const auto& f : z.f) CHECK(f.is_zero());
    // W0 = 1/x with a = 1, b = 1/2: the residual factors as exp(3 i a t) times
    // a constant multiple of the W0 equation
    const CQ a(1), b = CQ::frac(1, 2);
    const Expr W0 = 1 / x, L = Expr(a) * x + Expr(b);
    const Expr W1 = differentiate(W0, Var::X);
    const Expr ode = differentiate(W0, Var::X, 3) - 6 * W0 * W0 * W1 + 12 * L * L * W1 - 12 * L * W0 * W1 +
                     36 * Expr(a) * L * W0;
    const auto [r1, r2] = odd_residuals(W0 + L, odd_C_family(a, b, CQ(1)));
    const Expr phase = exp(Expr(CQ(-3) * CQ::I() * a) * t);
    const Expr q1 = r1 * phase / ode, q2 = r2 * phase / ode;
    CHECK(q1.is_constant());
    CHECK(q2.is_constant());
    CHECK(!(q1.is_zero() && q2.is_zero()));
}

TEST_CASE("W0 integration") {
    const W0Solution zero = integrate_w0(1, 0.5, {0, 0, 0}, 1, 2);
    for (double xv : {1.0, 1.3, 1.77, 2.0}) CHECK(zero.data->eval(0, xv) == 0.0);
    CHECK_THROWS_AS(integrate_w0(0, 1, {0.1, 0, 0}, 0.5, 2), DegenerateCase);
    // fourth-order convergence of the endpoint value
    auto end = [](double h) { return integrate_w0(1, 0, {0.1, 0.2, -0.1}, 0.5, 2, h).data->f[0].back(); };
    const double e1 = std::abs(end(0.04) - end(0.02)), e2 = std::abs(end(0.02) - end(0.01));
    CHECK(std::log2(e1 / e2) > 3.8);
}

TEST_CASE("non-blow-up initial data") {
    InitSearch s = find_nonblowup_init(1, 0, {0.1, 0, 0}, 0.5, 2);
    CHECK(s.scale == 1);
    Grid g = Grid::default_grid();
    g.xs = Grid::linspace(0.5, 2.0, 25);
    CHECK(ode_residual_a(s.solution.w0, 1, 0, g) < 1e-6);
    s = find_nonblowup_init(1, 0, {40, 40, 0}, 0.5, 2);
    CHECK(s.scale < 1);
    CHECK(s.scale > 0);
    CHECK(s.iterations == 40);
}

TEST_CASE("a = 0 family fit") {
    const double kappa = 0.7;
    const W0Solution s = integrate_w0_a0(0.5, kappa, {0.1, 0.2, 0.1}, 0.5, 2);
    Grid g = Grid::default_grid();
    g.xs = Grid::linspace(0.55, 1.95, 25);
    const auto [k, rel] = ode_fit_a0(s.w0, 0.5, g);
    CHECK(k == doctest::Approx(kappa).epsilon(1e-6));
    CHECK(rel < 1e-6);
}

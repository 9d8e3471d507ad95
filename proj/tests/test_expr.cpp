#include <doctest.h>

#include "properties.hpp"
#include "ssqm/cliffop.hpp"
#include "ssqm/models.hpp"
#include "ssqm/parser.hpp"

#include <cmath>

using namespace ssqm;

namespace {
const Expr x = Expr::x(), t = Expr::t();

std::complex<double> at(const Expr& e, double xv, double tv = 0, Bindings b = {}) {
    b["x"] = xv;
    b["t"] = tv;
    return evaluate(e, b);
}
}  // namespace

TEST_CASE("power rule and exponential derivative") {
    CHECK(differentiate(x * x, Var::X) == 2 * x);
    const Expr a = Expr::param("a");
    CHECK(differentiate(exp(a * t), Var::T) == a * exp(a * t));
    CHECK(differentiate(x * x * x, Var::X, 3) == Expr(6));
    CHECK(differentiate(x * x, Var::T).is_zero());
}

TEST_CASE("derivative of W^2/2 for linear W matches finite differences") {
    const CQ a = CQ::frac(3, 2), b = CQ::frac(-1, 3);
    const Expr W = Expr(a) * x + Expr(b);
    const Expr d = differentiate(Expr::frac(1, 2) * W * W, Var::X);
    CHECK(d == Expr(a) * W);
    const Expr half_sq = Expr::frac(1, 2) * W * W;
    for (double xv : {-1.0, -0.3, 0.2, 0.9, 1.7}) {
        const double h = 1e-5;
        const auto fd = (at(half_sq, xv + h) - at(half_sq, xv - h)) / (2 * h);
        CHECK(std::abs(fd - at(d, xv)) < 1e-8);
    }
}

TEST_CASE("evaluation examples") {
    CHECK(at(1 / x, 2).real() == doctest::Approx(0.5));
    const Expr a = Expr::param("a");
    const auto v = evaluate(exp(Expr(3) * Expr::I() * a * t), {{"a", 1.0}, {"t", 0.0}});
    CHECK(std::abs(v - 1.0) < 1e-15);
    const auto [V1, V2] = superpartners(1 / x);
    CHECK(std::abs(at(V1, 2)) < 1e-15);
    CHECK(at(V2, 2).real() == doctest::Approx(0.25));
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(evaluate(Expr::param("q") * x, {{"x", 1.0}}), UnboundSymbol);
    CHECK_THROWS_AS(evaluate(1 / x, {{"x", 0.0}}), PoleHit);
}

TEST_CASE("grid maxima of trivially zero expressions") {
    const Grid g = Grid::default_grid();
    CHECK(max_abs_on_grid(Expr(), g) == 0.0);
    CHECK(max_abs_on_grid(x - x, g) == 0.0);
    CHECK((x - x).is_zero());
}

TEST_CASE("normalization cancels common factors and is idempotent") {
    const Expr e = (x * x - 1) / (x - 1);
    CHECK(e == x + 1);
    CHECK(at(e, 1.0).real() == doctest::Approx(2.0));
    const Expr r = (x * x + t) / (x * (t + 2)) + exp(Expr::I() * x) / 3;
    CHECK(normalize(normalize(r)) == normalize(r));
    const Expr f = pow(x, 3) * t, h = 1 / (x + 2);
    CHECK(differentiate(f + h, Var::X) == differentiate(f, Var::X) + differentiate(h, Var::X));
}

TEST_CASE("opaque samples carry three derivatives") {
    auto data = std::make_shared<SampleData>();
    data->x0 = 0;
    data->h = 0.01;
    for (int i = 0; i <= 200; ++i) {
        const double xv = 0.01 * i;
        data->f[0].push_back(std::sin(xv));
        data->f[1].push_back(std::cos(xv));
        data->f[2].push_back(-std::sin(xv));
        data->f[3].push_back(-std::cos(xv));
    }
    const Expr s = Expr::sample(data);
    CHECK(std::abs(at(differentiate(s, Var::X, 3), 1.005) + std::cos(1.005)) < 1e-6);
    CHECK(std::abs(at(s, 1.005) - std::sin(1.005)) < 1e-9);
    CHECK_THROWS_AS(differentiate(s, Var::X, 4), OrderTooHigh);
    CHECK(differentiate(s, Var::T).is_zero());
}

TEST_CASE("parser reads decimals exactly and reports positions") {
    CHECK(parse_expr("0.3") == Expr::frac(3, 10));
    CHECK(parse_expr("a*x + b", {{"a", CQ(2)}, {"b", CQ::frac(1, 2)}}) == 2 * x + Expr::frac(1, 2));
    CHECK(parse_expr("x^-2") == 1 / (x * x));
    CHECK(parse_expr("exp(i*t) - atan(x) + ln(x)") == exp(Expr::I() * t) - atan(x) + ln(x));
    CHECK(parse_expr("2*x+3/x") == 2 * x + 3 / x);
    try {
        parse_expr("x + * 2");
        FAIL("no syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.pos == 4);
    }
    CHECK_THROWS_AS(parse_expr("(x + 1"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("a*x", {}, false), UnboundSymbol);
    CHECK_THROWS_AS(parse_expr("x^x"), SyntaxError);
}

TEST_CASE("differentiation obeys the Leibniz rule on random pairs") {
    const auto r = props::leibniz_suite();
    CHECK_MESSAGE(r.ok(), r.first_failure);
    CHECK(r.cases == 200);
}

TEST_CASE("evaluation is a ring homomorphism on random pairs") {
    const auto r = props::homomorphism_suite();
    CHECK_MESSAGE(r.ok(), r.first_failure);
    CHECK(r.cases == 100);
}

#include <doctest.h>

#include "ssqm/classify.hpp"
#include "ssqm/parser.hpp"
#include "ssqm/symmetry.hpp"

#include <algorithm>
#include <random>

using namespace ssqm;

namespace {
const Expr x = Expr::x();

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

ClassificationResult run(const std::string& text, const std::map<std::string, CQ>& p = {}) {
    return classify(parse_superpotential(text, p), Grid::default_grid());
}
}  // namespace

TEST_CASE("parsing superpotentials") {
    Superpotential s = parse_superpotential("a*x + b", std::map<std::string, double>{{"a", 1}, {"b", 0}});
    CHECK(s.w == x);
    CHECK(s.poles.empty());
    s = parse_superpotential("c/x", std::map<std::string, double>{{"c", 1}});
    REQUIRE(s.poles.size() == 1);
    CHECK(s.poles[0] == 0.0);
    s = parse_superpotential("a*x + c/x", std::map<std::string, double>{{"a", 2}, {"c", 3}});
    const StructuralForm f = match_form(s.w);
    CHECK(f.kind == FormKind::ShiftedPole);
    CHECK(f.a == CQ(2));
    CHECK(f.c == CQ(3));
    CHECK(f.p == CQ(0));
    CHECK(!f.unit_residue);
    CHECK_THROWS_AS(parse_superpotential("a*x +", std::map<std::string, double>{{"a", 1}}), SyntaxError);
    CHECK_THROWS_AS(parse_superpotential("a*x", std::map<std::string, double>{}), UnboundSymbol);
    CHECK_THROWS_AS(parse_superpotential("x*t", std::map<std::string, double>{}), DomainError);
}

TEST_CASE("decimal parameters are bound exactly") {
    CHECK(shortest_decimal(0.1) == CQ::frac(1, 10));
    CHECK(shortest_decimal(-2.5) == CQ::frac(-5, 2));
    CHECK(shortest_decimal(1e-20) == CQ(1) / pow(CQ(10), 20));
    CHECK(shortest_decimal(3e21) == CQ(3) * pow(CQ(10), 21));
    CHECK(parse_constant("1/3") == CQ::frac(1, 3));
    CHECK_THROWS_AS(parse_constant("x"), DomainError);
    CHECK(parse_superpotential("c/x", std::map<std::string, double>{{"c", 0.1}}).w == Expr::frac(1, 10) / x);
}

TEST_CASE("structural forms") {
    CHECK(match_form(3 * x + 1).kind == FormKind::Linear);
    CHECK(match_form(Expr()).kind == FormKind::Linear);
    StructuralForm f = match_form(-1 / (x + 2));
    CHECK(f.kind == FormKind::Pole);
    CHECK(f.unit_residue);
    CHECK(f.p == CQ(-2));
    f = match_form(2 * x + 1 + 1 / (x + Expr::frac(1, 2)));
    CHECK(f.kind == FormKind::ShiftedPole);
    CHECK(f.unit_residue);
    CHECK(match_form(x + 1 + 1 / x).kind == FormKind::Other);
    CHECK(match_form(1 + 1 / x).kind == FormKind::Other);
    CHECK(match_form(pow(x, 4)).kind == FormKind::Other);
    CHECK(match_form(1 / (x * x)).kind == FormKind::Other);
    CHECK(match_form(exp(x)).kind == FormKind::Other);
    // (x^2 - 1)/(x - 1) reduces to a linear form
    CHECK(match_form((x * x - 1) / (x - 1)).kind == FormKind::Linear);
}

TEST_CASE("classification examples") {
    ClassificationResult r = run("a*x+b", {{"a", CQ(1)}, {"b", CQ(0)}});
    CHECK(r.even == 12);
    CHECK(r.odd == 12);
    CHECK(r.total == 24);
    CHECK(r.d == 13);
    CHECK(r.tag == "osp(2/2)⊞sh(2/2)");
    CHECK(r.table1_class == 1);
    CHECK(r.table2_class == "1′");
    CHECK(r.table3_row == 1);
    CHECK(has(r.notes, "Free case"));
    CHECK(has(r.notes, "Harmonic oscillator"));

    r = run("1/x");
    CHECK(r.total == 20);
    CHECK(r.d == 7);
    CHECK(r.table3_row == 2);
    CHECK(has(r.notes, "Coulomb"));

    r = run("w*x + 1/x", {{"w", CQ(3)}});
    CHECK(r.even == 10);
    CHECK(r.odd == 10);
    CHECK(r.table1_class == 3);
    CHECK(r.table2_class == "3′");
    CHECK(has(r.notes, "Calogero"));

    r = run("2*x+3/x");
    CHECK(r.even == 8);
    CHECK(r.odd == 4);
    CHECK(r.total == 12);
    CHECK(r.table1_class == 4);
    CHECK(r.table2_class == "4′");
    CHECK(r.table3_row == 3);
    CHECK(!r.d);
    CHECK(r.tag.empty());

    r = run("2/x");
    CHECK(r.table2_class == "5′");
    CHECK(r.total == 12);

    r = run("x^4");
    CHECK(r.even == 4);
    CHECK(r.odd == 2);
    CHECK(r.total == 6);
    CHECK(r.d == 5);
    CHECK(r.table1_class == 10);
    CHECK(r.table2_class == "10′");
    CHECK(r.table3_row == 4);
    CHECK(has(r.flags, "form-unmatched"));
}

TEST_CASE("table rows agree with the computed counts on the corpus") {
    for (const char* w : {"0", "3", "2*x", "2*x-1", "1/x", "-1/x", "2*x+1/x", "2*x-1/x", "2/x", "2*x+3/x", "x^4",
                          "2*x+1+1/(x+0.5)", "x+1+1/x", "1+1/x", "-1/(x+3)"}) {
        const ClassificationResult r = run(w);
        CHECK_MESSAGE(r.consistent, w);
        CHECK(r.total == r.even + r.odd);
        CHECK(r.table3_row >= 1);
    }
}

TEST_CASE("classification is grid-stable") {
    const Grid g = Grid::default_grid(), fine = g.refined(35, 35);
    for (const char* w : {"2*x+1", "1/x", "2*x+3/x", "x^4", "x+1+1/x"}) {
        const Superpotential s = parse_superpotential(w, std::map<std::string, CQ>{});
        const ClassificationResult a = classify(s, g), b = classify(s, fine);
        CHECK(a.even == b.even);
        CHECK(a.odd == b.odd);
        CHECK(a.table1_class == b.table1_class);
        CHECK(a.table2_class == b.table2_class);
        CHECK(a.table3_row == b.table3_row);
    }
}

TEST_CASE("rescaling preserves the classes of the named forms") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> num(1, 12);
    const Grid g = Grid::default_grid();
    for (const Expr& W : {2 * x + 1, 1 / x, 3 * x - 1 / x, 2 * x + 3 / x, 2 * x + 1 + 1 / (x + Expr::frac(1, 2))}) {
        const ClassificationResult base = classify(Superpotential::from_expr(W), g);
        for (int k = 0; k < 10; ++k) {
            const CQ lam = CQ::frac(num(rng), 4);
            // W(x) -> lam W(lam x)
            const Expr Wl = Expr(lam) * substitute_var(W, Var::X, Expr(lam) * x);
            const ClassificationResult r = classify(Superpotential::from_expr(Wl), g);
            CHECK(r.even == base.even);
            CHECK(r.odd == base.odd);
            CHECK(r.table1_class == base.table1_class);
            CHECK(r.table2_class == base.table2_class);
            CHECK(r.table3_row == base.table3_row);
        }
    }
}

TEST_CASE("non-rational superpotentials need a declared linear part") {
    const Superpotential s = Superpotential::from_expr(exp(x));
    CHECK_THROWS_AS(classify(s, Grid::default_grid()), AmbiguousLinearPart);
    ClassifyOptions opt;
    opt.a = 0;
    opt.b = 0;
    const ClassificationResult r = classify(s, Grid::default_grid(), opt);
    CHECK(has(r.flags, "linear-part-declared"));
    CHECK(r.table3_row == 4);
    CHECK(r.consistent);
}

TEST_CASE("integrated W0 is flagged as a member of its equation") {
    const W0Solution w0 = integrate_w0(1, 0, {0.1, 0, 0}, 0.3, 2.5);
    Superpotential s = Superpotential::from_expr(w0.w0 + x, "W0 + x");
    ClassifyOptions opt;
    opt.a = 1;
    opt.b = 0;
    Grid g = Grid::default_grid();
    g.xs = Grid::linspace(0.5, 2.0, 25);
    const ClassificationResult r = classify(s, g, opt);
    CHECK(r.odd == 4);
    CHECK(r.table2_class == "7′");
    CHECK(has(r.flags, "w0-ode-class7′"));
}

TEST_CASE("records carry the documented fields") {
    const nlohmann::json j = to_json(run("2*x+3/x"));
    for (const char* k : {"schema", "kind", "input", "params", "even", "odd", "total", "table1_class", "table2_class",
                          "table3_row", "tag", "d", "flags", "notes", "grid", "tol", "consistent"})
        CHECK_MESSAGE(j.contains(k), k);
    CHECK(j["schema"] == kRecordSchema);
    CHECK(j["d"].is_null());
    const nlohmann::json back = nlohmann::json::parse(j.dump());
    CHECK(back == j);
}

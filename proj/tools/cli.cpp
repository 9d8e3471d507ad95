#include "cli.hpp"

#include "ssqm/classify.hpp"
#include "ssqm/parser.hpp"
#include "ssqm/superalg.hpp"
#include "ssqm/symmetry.hpp"
#include "ssqm/transforms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace ssqm::cli {

using nlohmann::json;

namespace {

struct RunConfig {
    std::string command, target, text;
    std::vector<std::string> params;
    std::string grid_x, grid_t;
    std::optional<double> tol;
    std::string format = "json";
    std::string out;
    std::optional<double> a, b;
    // transform
    double omega = 1, beta = 0, gamma = 0, k = 0.5, h = 1e-3;
    // closure
    std::optional<int> expect_d;
    // a0-operator
    bool printed = false;
    // integrate-w0
    double x0 = 0.5, x1 = 2.0, kappa = 0;
    std::string init = "0.1,0,0";
    int max_iter = 40;
};

struct UsageError : Error {
    using Error::Error;
};

std::array<double, 3> parse_range(const std::string& s, const char* what) {
    std::array<double, 3> v{};
    std::stringstream ss(s);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ':')) {
        if (i == 3) throw UsageError(std::string(what) + " expects lo:hi:n");
        v[size_t(i++)] = parse_constant(part).re.get_d();
    }
    if (i != 3 || v[2] < 2 || v[2] != std::floor(v[2]) || !(v[1] > v[0]))
        throw UsageError(std::string(what) + " expects lo:hi:n with lo < hi and n >= 2");
    return v;
}

Grid make_grid(const RunConfig& c, std::optional<std::pair<double, double>> x_default = {}) {
    Grid g = Grid::default_grid();
    if (x_default) g.xs = Grid::linspace(x_default->first, x_default->second, 25);
    if (!c.grid_x.empty()) {
        auto v = parse_range(c.grid_x, "--grid-x");
        g.xs = Grid::linspace(v[0], v[1], int(v[2]));
    }
    if (!c.grid_t.empty()) {
        auto v = parse_range(c.grid_t, "--grid-t");
        g.ts = Grid::linspace(v[0], v[1], int(v[2]));
    }
    return g;
}

std::map<std::string, CQ> exact_params(const RunConfig& c) {
    std::map<std::string, CQ> p;
    for (const auto& s : c.params) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("-p expects name=value, got " + s);
        p[s.substr(0, eq)] = parse_constant(s.substr(eq + 1));
    }
    return p;
}

json params_json(const std::map<std::string, CQ>& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v.re.get_d();
    return j;
}

CQ param_or(const std::map<std::string, CQ>& p, const std::string& name, const CQ& fallback) {
    auto it = p.find(name);
    return it == p.end() ? fallback : it->second;
}

json base_record(const RunConfig& c, const std::string& kind, const Grid& g, double tol) {
    json j;
    j["schema"] = kRecordSchema;
    j["kind"] = kind;
    if (!c.text.empty()) j["input"] = c.text;
    j["grid"] = g.describe();
    j["tol"] = tol;
    return j;
}

json check(const std::string& name, bool ok, double residual) {
    return {{"identity", name}, {"ok", ok}, {"value", residual}};
}

bool all_ok(const json& checks) {
    for (const auto& c : checks)
        if (!c["ok"].get<bool>()) return false;
    return true;
}

void render_human(const json& r, std::ostream& os) {
    for (const auto& [key, v] : r.items()) {
        if (key == "checks") {
            for (const auto& c : v)
                os << (c["ok"].get<bool>() ? "PASS " : "FAIL ") << c["identity"].get<std::string>()
                   << "  " << c["value"].dump() << "\n";
        } else {
            os << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
}

std::pair<double, double> linear_part_or_declared(const RunConfig& c, const Expr& W) {
    if (c.a && c.b) return {*c.a, *c.b};
    auto lp = linear_part(W);
    if (!lp) throw AmbiguousLinearPart("W is not rational; pass --a and --b");
    return {lp->a.re.get_d(), lp->b.re.get_d()};
}

Superpotential load_w(const RunConfig& c, const std::map<std::string, CQ>& p) {
    if (c.text.empty()) throw UsageError("a superpotential is required");
    return parse_superpotential(c.text, p);
}

// ------------------------------------------------------------------ commands

std::pair<json, int> cmd_classify(const RunConfig& c) {
    const auto p = exact_params(c);
    const Superpotential W = load_w(c, p);
    const Grid g = make_grid(c);
    ClassifyOptions opt;
    opt.a = c.a;
    opt.b = c.b;
    opt.tol = c.tol.value_or(1e-8);
    const ClassificationResult r = classify(W, g, opt);
    json j = to_json(r);
    j["params"] = params_json(p);
    return {j, r.consistent ? kOk : kFailure};
}

std::pair<json, int> cmd_count(const RunConfig& c) {
    if (c.target != "even" && c.target != "odd" && c.target != "both")
        throw UsageError("count expects even, odd or both");
    const auto p = exact_params(c);
    const Superpotential W = load_w(c, p);
    const Grid g = make_grid(c);
    g.validate(W.poles);
    json j = base_record(c, "count", g, c.tol.value_or(1e-6));
    j["params"] = params_json(p);
    j["sector"] = c.target;
    if (c.target != "odd") {
        const EvenClassification ev = even_count(W.w);
        j["even"] = ev.total;
        j["even_upper"] = {{"count", ev.n1}, {"algebra", ev.upper.tag}};
        j["even_lower"] = {{"count", ev.n2}, {"algebra", ev.lower.tag}};
    }
    if (c.target != "even") {
        const auto [a, b] = linear_part_or_declared(c, W.w);
        OddCountOptions opt;
        if (c.tol) opt.rel_threshold = *c.tol;
        const OddCountReport od = odd_count(W.w, a, b, g, opt);
        j["odd"] = od.count;
        j["linear_part"] = {{"a", a}, {"b", b}};
        json blocks = json::array();
        for (const auto& bl : od.blocks)
            blocks.push_back({{"omega", bl.omega}, {"rank", bl.rank.rank}, {"nullity", bl.rank.nullity},
                              {"gap", bl.rank.gap}});
        j["rank_report"] = {{"rows", od.rows},
                            {"cols", od.cols},
                            {"threshold", od.threshold},
                            {"gap", od.gap},
                            {"smallest_kept", od.smallest_kept},
                            {"largest_dropped", od.largest_dropped},
                            {"blocks", blocks}};
    }
    return {j, kOk};
}

std::pair<json, int> verify_sqm2_cmd(const RunConfig& c) {
    const auto p = exact_params(c);
    const Superpotential W = load_w(c, p);
    const Grid g = make_grid(c);
    g.validate(W.poles);
    const double tol = c.tol.value_or(1e-8);
    const Sqm2Report rep = verify_sqm2(W.w, g, tol);
    json j = base_record(c, "verify.sqm2", g, tol);
    j["params"] = params_json(p);
    j["exact"] = rep.exact;
    json checks = json::array();
    for (const auto& ch : rep.checks) {
        json k = check(ch.identity, ch.ok, ch.residual);
        if (!ch.offending.empty()) k["offending"] = ch.offending;
        checks.push_back(k);
    }
    j["checks"] = checks;
    return {j, all_ok(checks) ? kOk : kFailure};
}

std::pair<json, int> verify_a0(const RunConfig& c) {
    const auto p = exact_params(c);
    const CQ b = param_or(p, "b", CQ(0));
    const Expr W(b);
    const Grid g = make_grid(c);
    const double tol = c.tol.value_or(1e-9);
    const CliffOp q = q1_A0(b, W, c.printed);
    const CliffOp d = schrodinger_derivative(q, hamiltonian_ss(W));
    json j = base_record(c, "verify.a0-operator", g, tol);
    j["params"] = params_json(p);
    j["printed"] = c.printed;
    j["operator"] = q.str();
    const double res = max_abs_on_grid(d, g);
    j["checks"] = json::array({check("i dQ/dt + [Q, H_SS] = 0", res < tol, res)});
    return {j, all_ok(j["checks"]) ? kOk : kFailure};
}

std::pair<json, int> verify_closure(const RunConfig& c) {
    const auto p = exact_params(c);
    const Superpotential W = load_w(c, p);
    const Grid g = make_grid(c);
    g.validate(W.poles);
    const double tol = c.tol.value_or(1e-8);
    const ClosureResult r = greedy_closure(W.w, g, tol);
    json j = base_record(c, "verify.closure", g, tol);
    j["params"] = params_json(p);
    j["dimension"] = r.dimension;
    j["n_even"] = r.table.n_even;
    j["n_odd"] = r.table.n_odd;
    j["tag"] = r.tag;
    j["history"] = r.history;
    j["accepted"] = r.accepted;
    j["rejected"] = r.rejected;
    j["symmetries"] = {{"even", r.even_symmetries}, {"odd", r.odd_symmetries}};
    j["labels"] = r.table.labels;
    json checks = json::array();
    checks.push_back(check("graded brackets close", r.table.closed, r.table.max_residual));
    checks.push_back(check("graded Jacobi identity", r.table.jacobi_residual < tol, r.table.jacobi_residual));
    if (c.expect_d)
        checks.push_back(check("dimension = " + std::to_string(*c.expect_d), r.dimension == *c.expect_d,
                               std::abs(r.dimension - *c.expect_d)));
    j["checks"] = checks;
    return {j, all_ok(checks) ? kOk : kFailure};
}

std::pair<json, int> verify_transform(const RunConfig& c) {
    const PointMap m = niederer_map(c.omega, c.beta, c.gamma);
    const double tol = c.tol.value_or(1e-5);
    const RealFn V = [m](long double x) { return (long double)m.potential(double(x)); };
    Grid g = Grid::default_grid();
    json j = base_record(c, "verify.transform", g, tol);
    j.erase("grid");
    j["probes"] = fd_probe_points();
    j["omega"] = c.omega;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["k"] = c.k;
    j["h"] = c.h;
    json checks = json::array();
    auto add = [&](const std::string& name, const Sampler& psi) {
        const FdCheck fc = fd_check(lift_wavefunction(psi, m), V, c.h);
        checks.push_back(check(name + ": FD residual < " + std::to_string(tol).substr(0, 7),
                               fc.residual_h < tol, fc.residual_h));
        checks.push_back(check(name + ": h -> h/2 ratio within 20% of 4", std::abs(fc.ratio - 4) < 0.8,
                               fc.ratio));
    };
    add("lifted Gaussian", free_gaussian());
    add("lifted plane wave", plane_wave(c.k));
    j["checks"] = checks;
    return {j, all_ok(checks) ? kOk : kFailure};
}

std::pair<json, int> verify_conjugation(const RunConfig& c) {
    const auto p = exact_params(c);
    const CQ a = param_or(p, "a", CQ(1)), b = param_or(p, "b", CQ(0));
    const Expr W = Expr(a) * Expr::x() + Expr(b);
    const CliffOp conj = conjugate_by_phase(build_models(W).Delta_SS, a);
    int s3_terms = 0;
    for (const auto& [key, coef] : conj.terms())
        if (key[0] == 3) ++s3_terms;
    Grid g = Grid::default_grid();
    json j = base_record(c, "verify.conjugation", g, 0);
    j.erase("grid");
    j.erase("tol");
    j["input"] = W.str();
    j["params"] = params_json(p);
    j["conjugated"] = conj.str();
    j["checks"] = json::array({check("s3 coefficient of U Delta_SS U^-1 is zero", s3_terms == 0, s3_terms)});
    return {j, all_ok(j["checks"]) ? kOk : kFailure};
}

std::pair<json, int> cmd_integrate(const RunConfig& c) {
    std::array<double, 3> init{};
    {
        std::stringstream ss(c.init);
        std::string part;
        int i = 0;
        while (std::getline(ss, part, ',')) {
            if (i == 3) throw UsageError("--init expects w,w1,w2");
            init[size_t(i++)] = parse_constant(part).re.get_d();
        }
        if (i != 3) throw UsageError("--init expects w,w1,w2");
    }
    const double a = c.a.value_or(1), b = c.b.value_or(0);
    const Grid g = make_grid(c, std::pair{c.x0, c.x1});
    const double tol = c.tol.value_or(1e-6);
    json j = base_record(c, "integrate-w0", g, tol);
    j.erase("input");
    j["a"] = a;
    j["b"] = b;
    j["x0"] = c.x0;
    j["x1"] = c.x1;
    json checks = json::array();
    Expr w0;
    if (a != 0) {
        const InitSearch s = find_nonblowup_init(a, b, init, c.x0, c.x1, c.max_iter);
        w0 = s.solution.w0;
        j["init"] = s.init;
        j["scale"] = s.scale;
        j["bisections"] = s.iterations;
        const double ode = ode_residual_a(w0, a, b, g);
        checks.push_back(check("W0 solves its third-order ODE", ode < tol, ode));
        const Expr W = w0 + Expr::real(a) * Expr::x() + Expr::real(b);
        auto [r1, r2] = odd_residuals(W, odd_C_family(CQ::from_double(a), CQ::from_double(b), CQ(1)));
        const double cf = std::max(max_abs_on_grid(r1, g), max_abs_on_grid(r2, g));
        checks.push_back(check("C family annihilates the odd residuals", cf < tol, cf));
        const int n = odd_count(W, a, b, g).count;
        j["odd"] = n;
        checks.push_back(check("odd count >= 4", n >= 4, n));
    } else {
        const W0Solution s = integrate_w0_a0(b, c.kappa, init, c.x0, c.x1);
        w0 = s.w0;
        j["init"] = init;
        j["kappa"] = c.kappa;
        const auto [kappa, rel] = ode_fit_a0(w0, b, g);
        j["kappa_fit"] = kappa;
        checks.push_back(check("W0 solves its third-order ODE", rel < tol, rel));
        const int n = odd_count(w0 + Expr::real(b), 0, b, g).count;
        j["odd"] = n;
        checks.push_back(check("odd count >= 4", n >= 4, n));
    }
    j["checks"] = checks;
    return {j, all_ok(checks) ? kOk : kFailure};
}

void add_common(CLI::App* sub, RunConfig& c, bool with_w) {
    if (with_w) sub->add_option("W", c.text, "superpotential, e.g. \"a*x + c/x\"");
    sub->add_option("-p,--param", c.params, "parameter binding name=value (repeatable)");
    sub->add_option("--grid-x", c.grid_x, "x samples lo:hi:n");
    sub->add_option("--grid-t", c.grid_t, "t samples lo:hi:n");
    sub->add_option("--tol", c.tol, "tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "json or human")->check(CLI::IsMember({"json", "human"}));
    sub->add_option("--out", c.out, "write the record to PATH");
    sub->add_option("--a", c.a, "declared slope of the linear part");
    sub->add_option("--b", c.b, "declared intercept of the linear part");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app("Symmetries and invariance superalgebras of supersymmetric quantum mechanics", "ssqm");
    app.require_subcommand(1);

    auto* cl = app.add_subcommand("classify", "even/odd counts, classes and structure tag");
    add_common(cl, c, true);

    auto* co = app.add_subcommand("count", "count even or odd symmetries");
    co->add_option("sector", c.target, "even | odd | both")->required();
    add_common(co, c, true);

    auto* ve = app.add_subcommand("verify", "check operator identities");
    ve->add_option("identity", c.target, "sqm2 | a0-operator | closure | transform | conjugation")
        ->required()
        ->check(CLI::IsMember({"sqm2", "a0-operator", "closure", "transform", "conjugation"}));
    add_common(ve, c, true);
    ve->add_option("--omega", c.omega, "transform: oscillator frequency");
    ve->add_option("--beta", c.beta, "transform: linear coefficient");
    ve->add_option("--gamma", c.gamma, "transform: constant shift");
    ve->add_option("--k", c.k, "transform: plane-wave wavenumber");
    ve->add_option("--step", c.h, "transform: finite-difference step")->check(CLI::PositiveNumber);
    ve->add_option("--expect-d", c.expect_d, "closure: expected dimension");
    ve->add_flag("--printed", c.printed, "a0-operator: use the x/4 variant of the sigma1 term");

    auto* iw = app.add_subcommand("integrate-w0", "integrate the W0 equation and check it");
    add_common(iw, c, false);
    iw->add_option("--x0", c.x0, "left end");
    iw->add_option("--x1", c.x1, "right end");
    iw->add_option("--init", c.init, "W0,W0',W0'' at x0");
    iw->add_option("--kappa", c.kappa, "constant of the a = 0 equation");
    iw->add_option("--max-iter", c.max_iter, "bisection steps");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    json record;
    int code = kOk;
    try {
        if (cl->parsed()) std::tie(record, code) = cmd_classify(c);
        else if (co->parsed()) std::tie(record, code) = cmd_count(c);
        else if (iw->parsed()) std::tie(record, code) = cmd_integrate(c);
        else if (c.target == "sqm2") std::tie(record, code) = verify_sqm2_cmd(c);
        else if (c.target == "a0-operator") std::tie(record, code) = verify_a0(c);
        else if (c.target == "closure") std::tie(record, code) = verify_closure(c);
        else if (c.target == "transform") std::tie(record, code) = verify_transform(c);
        else std::tie(record, code) = verify_conjugation(c);
    } catch (const SyntaxError& e) {
        err << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnboundSymbol& e) {
        err << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const RankUnstable& e) {
        err << "numeric instability: " << e.what() << "\n";
        return kNumeric;
    } catch (const BlowUp& e) {
        err << "numeric instability: " << e.what() << "\n";
        return kNumeric;
    } catch (const IllConditioned& e) {
        err << "numeric instability: " << e.what() << "\n";
        return kNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }

    std::ostringstream text;
    if (c.format == "human") render_human(record, text);
    else text << record.dump() << "\n";
    if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::app);
        if (!f) {
            err << "cannot open " << c.out << "\n";
            return kUsage;
        }
        f << text.str();
    } else {
        out << text.str();
    }
    return code;
}

}  // namespace ssqm::cli

#include "ssqm/classify.hpp"

#include "ssqm/parser.hpp"
#include "ssqm/symmetry.hpp"

#include <charconv>
#include <cmath>

namespace ssqm {

CQ parse_constant(const std::string& text) {
    const Expr e = parse_expr(text, {}, false);
    if (!e.is_constant()) throw DomainError("not a constant: " + text);
    return e.constant_value();
}

CQ shortest_decimal(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite parameter");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    // to_chars may use exponent notation; rewrite m e k as (m) * 10^k
    if (auto pos = s.find('e'); pos != std::string::npos) {
        const int k = std::stoi(s.substr(pos + 1));
        s = "(" + s.substr(0, pos) + ")" + (k < 0 ? "/10^" : "*10^") + std::to_string(std::abs(k));
    }
    return parse_constant(s);
}

Superpotential parse_superpotential(const std::string& text, const std::map<std::string, CQ>& params) {
    const Expr w = parse_expr(text, params, false);
    std::map<std::string, double> p;
    for (const auto& [k, v] : params) p[k] = v.re.get_d();
    return Superpotential::from_expr(w, text, p);
}

Superpotential parse_superpotential(const std::string& text, const std::map<std::string, double>& params) {
    std::map<std::string, CQ> exact;
    for (const auto& [k, v] : params) exact[k] = shortest_decimal(v);
    Superpotential s = parse_superpotential(text, exact);
    s.params = params;
    return s;
}

StructuralForm match_form(const Expr& W) {
    StructuralForm f;
    auto r = as_rational_in_x(W);
    if (!r) return f;
    UPoly num = r->first, den = r->second;
    const UPoly g = upoly::gcd(num, den);
    if (upoly::degree(g) > 0) {
        UPoly q, rem;
        upoly::divmod(num, g, q, rem);
        num = q;
        upoly::divmod(den, g, q, rem);
        den = upoly::monic(q);
    }
    upoly::trim(num);
    const int dd = upoly::degree(den);
    if (dd == 0) {
        if (upoly::degree(num) > 1) return f;
        const CQ lead = den[0];
        f.kind = FormKind::Linear;
        if (num.size() > 0) f.b = num[0] / lead;
        if (num.size() > 1) f.a = num[1] / lead;
        return f;
    }
    if (dd != 1) return f;
    UPoly q, rem;
    upoly::divmod(num, den, q, rem);
    upoly::trim(q);
    upoly::trim(rem);
    if (upoly::degree(q) > 1 || rem.empty()) return f;
    const CQ p = -den[0] / den[1];
    const CQ qa = q.size() > 1 ? q[1] : CQ(0), qb = q.size() > 0 ? q[0] : CQ(0);
    // the polynomial part must vanish at the pole: q = a (x - p)
    if (qb + qa * p != CQ(0)) return f;
    f.a = qa;
    f.b = qb;
    f.c = rem[0] / den[1];
    f.p = p;
    f.kind = qa.is_zero() ? FormKind::Pole : FormKind::ShiftedPole;
    f.unit_residue = f.c == CQ(1) || f.c == CQ(-1);
    return f;
}

namespace {

std::string prime(int k) { return std::to_string(k) + "′"; }

int table1_by_count(int n) {
    switch (n) {
        case 12: return 1;
        case 10: return 2;
        case 8: return 5;
        case 6: return 8;
        default: return 10;
    }
}

std::string table2_by_count(int n, bool a_zero) {
    switch (n) {
        case 12: return prime(1);
        case 10: return prime(2);
        case 4: return prime(a_zero ? 6 : 7);
        case 3: return prime(8);
        default: return prime(10);
    }
}

}  // namespace

ClassificationResult classify(const Superpotential& sp, const Grid& g, const ClassifyOptions& opt) {
    const Expr& W = sp.w;
    g.validate(sp.poles);
    ClassificationResult r;
    r.input = sp.text;
    r.params = sp.params;
    r.grid = g.describe();
    r.tol = opt.tol;

    // linear part
    const auto lp = linear_part(W);
    if (opt.a && opt.b) {
        r.a = *opt.a;
        r.b = *opt.b;
        r.flags.push_back("linear-part-declared");
    } else if (lp) {
        r.a = lp->a.re.get_d();
        r.b = lp->b.re.get_d();
        if (lp->higher_degree) r.flags.push_back("polynomial-part-degree>=2");
    } else {
        throw AmbiguousLinearPart("W is not rational; declare a and b");
    }

    const EvenClassification ev = even_count(W);
    r.even_upper = ev.n1;
    r.even_lower = ev.n2;
    r.even = ev.total;
    const OddCountReport od = odd_count(W, r.a, r.b, g);
    r.odd = od.count;
    r.odd_gap = od.gap;
    r.odd_threshold = od.threshold;
    r.total = r.even + r.odd;

    r.form = match_form(W);
    const StructuralForm& f = r.form;
    std::pair<int, int> expected{-1, -1};
    switch (f.kind) {
        case FormKind::Linear:
            r.table1_class = 1;
            r.table2_class = prime(1);
            r.table3_row = 1;
            expected = {12, 12};
            r.notes = {"Free case", "Linear case", "Harmonic oscillator"};
            r.tag = "osp(2/2)⊞sh(2/2)";
            r.d = 13;
            break;
        case FormKind::Pole:
        case FormKind::ShiftedPole: {
            const bool pole_only = f.kind == FormKind::Pole;
            if (f.unit_residue) {
                r.table1_class = pole_only ? 2 : 3;
                r.table2_class = prime(pole_only ? 2 : 3);
                expected = {10, 10};
                r.tag = "[osp(2/1)⊞so(2)]⊕gl(1)";
                r.d = 7;
            } else {
                r.table1_class = 4;
                r.table2_class = prime(pole_only ? 5 : 4);
                expected = {8, 4};
                if (pole_only) r.flags.push_back("table1-class4-with-a=0");
            }
            r.table3_row = pole_only ? 2 : 3;
            if (!f.p.is_zero()) r.flags.push_back("shifted-pole");
            if (f.p.is_zero()) r.notes.push_back(pole_only ? "Coulomb" : "Calogero");
            break;
        }
        case FormKind::Other: {
            r.flags.push_back("form-unmatched");
            r.table1_class = table1_by_count(r.even);
            r.table2_class = table2_by_count(r.odd, r.a == 0);
            r.table3_row = 4;
            r.tag = "[sqm(2)⊞so(2)]⊕gl(1)";
            r.d = 5;
            r.notes.push_back("N bounds: printed 12 <= N <= 6, corrected 6 <= N <= 12");
            const bool in_row = (r.even == 8 || r.even == 6 || r.even == 4) &&
                                (r.odd == 4 || r.odd == 3 || r.odd == 2);
            if (!in_row) r.consistent = false;
            // membership of W0 = W - a x - b in the two W0 families
            const Expr W0 = W - Expr::real(r.a) * Expr::x() - Expr::real(r.b);
            if (r.a == 0) {
                const auto [kappa, rel] = ode_fit_a0(W0, r.b, g);
                if (rel < opt.tol) {
                    r.flags.push_back("w0-ode-a0");
                    if (std::abs(kappa) < opt.tol) r.flags.push_back("w0-ode-class6′");
                }
            } else if (ode_residual_a(W0, r.a, r.b, g) < opt.tol) {
                r.flags.push_back("w0-ode-class7′");
            }
            break;
        }
    }
    if (expected.first >= 0 && (r.even != expected.first || r.odd != expected.second)) r.consistent = false;
    if (!r.consistent) r.flags.push_back("count-mismatch");
    return r;
}

nlohmann::json to_json(const ClassificationResult& r) {
    nlohmann::json j;
    j["schema"] = kRecordSchema;
    j["kind"] = "classify";
    j["input"] = r.input;
    j["params"] = r.params;
    j["even"] = r.even;
    j["even_upper"] = r.even_upper;
    j["even_lower"] = r.even_lower;
    j["odd"] = r.odd;
    j["total"] = r.total;
    j["table1_class"] = r.table1_class;
    j["table2_class"] = r.table2_class;
    j["table3_row"] = r.table3_row;
    j["tag"] = r.tag.empty() ? nlohmann::json() : nlohmann::json(r.tag);
    j["d"] = r.d ? nlohmann::json(*r.d) : nlohmann::json();
    j["consistent"] = r.consistent;
    j["linear_part"] = {{"a", r.a}, {"b", r.b}};
    j["odd_rank"] = {{"gap", r.odd_gap}, {"threshold", r.odd_threshold}};
    j["flags"] = r.flags;
    j["notes"] = r.notes;
    j["grid"] = r.grid;
    j["tol"] = r.tol;
    return j;
}

}  // namespace ssqm

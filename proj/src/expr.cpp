#include "ssqm/expr.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace ssqm {

// ---------------------------------------------------------------- samples

double SampleData::eval(int order, double x) const {
    if (order < 0 || order > 3) throw OrderTooHigh("sampled function has derivatives up to order 3");
    const size_t n = size();
    if (n < 4) throw DomainError("sampled function needs at least four nodes");
    const double tol = 1e-9 * std::max(1.0, std::abs(h));
    if (x < x0 - tol || x > x_end() + tol)
        throw DomainError("x = " + std::to_string(x) + " outside sampled range of " + label);
    double s = (x - x0) / h;
    long i = std::clamp(long(std::floor(s)), 0L, long(n) - 2);
    double u = s - double(i);
    if (std::abs(u) < 1e-12) return f[order][i];
    if (std::abs(u - 1) < 1e-12) return f[order][i + 1];
    if (order < 3) {
        const auto& y = f[order];
        const auto& dy = f[order + 1];
        double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
        double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
        return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
    }
    long j = std::clamp(i - 1, 0L, long(n) - 4);
    double r = 0;
    for (int a = 0; a < 4; ++a) {
        double w = 1;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (s - double(j + b)) / double(a - b);
        r += w * f[3][j + a];
    }
    return r;
}

// ------------------------------------------------------------ comparisons

static int sgn3(int c) { return c < 0 ? -1 : (c > 0 ? 1 : 0); }

int cmp(const Atom& a, const Atom& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    switch (a.kind) {
        case Atom::X:
        case Atom::T: return 0;
        case Atom::Param: return sgn3(a.name.compare(b.name));
        case Atom::Ln:
        case Atom::Atan: return cmp_node(a.arg, b.arg);
        case Atom::Sample: {
            if (a.sample != b.sample) {
                int c = sgn3(a.sample->label.compare(b.sample->label));
                if (c) return c;
                return std::less<const SampleData*>()(a.sample.get(), b.sample.get()) ? -1 : 1;
            }
            return a.order < b.order ? -1 : (a.order > b.order ? 1 : 0);
        }
    }
    return 0;
}

int cmp(const Mono& a, const Mono& b) {
    if (a.pw.size() != b.pw.size()) return a.pw.size() < b.pw.size() ? -1 : 1;
    for (size_t i = 0; i < a.pw.size(); ++i) {
        int c = cmp(a.pw[i].first, b.pw[i].first);
        if (c) return c;
        if (a.pw[i].second != b.pw[i].second) return a.pw[i].second < b.pw[i].second ? -1 : 1;
    }
    if (!a.ex || !b.ex) return (bool)a.ex - (bool)b.ex;
    return cmp_node(a.ex, b.ex);
}

int cmp_node(const NodePtr& a, const NodePtr& b) {
    if (a == b) return 0;
    const auto& na = a->num;
    const auto& nb = b->num;
    if (na.size() != nb.size()) return na.size() < nb.size() ? -1 : 1;
    for (auto ia = na.begin(), ib = nb.begin(); ia != na.end(); ++ia, ++ib) {
        int c = cmp(ia->first, ib->first);
        if (c) return c;
        c = cmp(ia->second, ib->second);
        if (c) return c;
    }
    const auto& da = a->den;
    const auto& db = b->den;
    if (da.size() != db.size()) return da.size() < db.size() ? -1 : 1;
    for (auto ia = da.begin(), ib = db.begin(); ia != da.end(); ++ia, ++ib) {
        int c = cmp(ia->first, ib->first);
        if (c) return c;
        if (ia->second.size() != ib->second.size()) return ia->second.size() < ib->second.size() ? -1 : 1;
        for (size_t k = 0; k < ia->second.size(); ++k) {
            c = cmp(ia->second[k], ib->second[k]);
            if (c) return c;
        }
    }
    return 0;
}

int cmp(const Expr& a, const Expr& b) { return cmp_node(a.ptr(), b.ptr()); }

// ------------------------------------------------------ univariate polys

namespace upoly {

void trim(UPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int degree(const UPoly& p) {
    for (int k = int(p.size()) - 1; k >= 0; --k)
        if (!p[k].is_zero()) return k;
    return -1;
}

UPoly add(const UPoly& a, const UPoly& b) {
    UPoly r(std::max(a.size(), b.size()));
    for (size_t k = 0; k < a.size(); ++k) r[k] += a[k];
    for (size_t k = 0; k < b.size(); ++k) r[k] += b[k];
    trim(r);
    return r;
}

UPoly mul(const UPoly& a, const UPoly& b) {
    if (a.empty() || b.empty()) return {};
    UPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

UPoly deriv(const UPoly& a) {
    if (a.size() <= 1) return {};
    UPoly r(a.size() - 1);
    for (size_t k = 1; k < a.size(); ++k) r[k - 1] = a[k] * CQ(long(k));
    trim(r);
    return r;
}

void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r) {
    int db = degree(b);
    if (db < 0) throw std::domain_error("polynomial division by zero");
    r = a;
    trim(r);
    int da = degree(r);
    q.assign(std::max(0, da - db + 1), CQ());
    CQ lc_inv = b[db].inv();
    while ((da = degree(r)) >= db) {
        CQ c = r[da] * lc_inv;
        q[da - db] = c;
        for (int k = 0; k <= db; ++k) r[da - db + k] -= c * b[k];
        r[da] = CQ();
        trim(r);
    }
    trim(q);
}

UPoly monic(const UPoly& a) {
    UPoly r = a;
    trim(r);
    if (r.empty()) return r;
    CQ inv = r.back().inv();
    for (auto& c : r) c *= inv;
    return r;
}

UPoly gcd(const UPoly& a0, const UPoly& b0) {
    UPoly a = a0, b = b0, q, r;
    trim(a);
    trim(b);
    while (!b.empty()) {
        divmod(a, b, q, r);
        a = std::move(b);
        b = monic(r);
    }
    return monic(a);
}

CQ eval(const UPoly& p, const CQ& v) {
    CQ r;
    for (size_t k = p.size(); k-- > 0;) r = r * v + p[k];
    return r;
}

std::vector<std::complex<double>> roots(const UPoly& p0) {
    UPoly p = monic(p0);
    int n = degree(p);
    if (n <= 0) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i].to_complex();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<std::complex<double>> out;
    for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

}  // namespace upoly

// -------------------------------------------------------- node building

namespace {

NodePtr zero_node() {
    static NodePtr z = std::make_shared<ExprNode>();
    return z;
}

Atom atom_of(Atom::Kind k) {
    Atom a;
    a.kind = k;
    return a;
}

Expr atom_expr(const Atom& a, int p = 1) {
    auto n = std::make_shared<ExprNode>();
    Mono m;
    m.pw.push_back({a, p});
    n->num[m] = CQ(1);
    return Expr(NodePtr(n));
}

bool same_atom(const Atom& a, const Atom& b) { return cmp(a, b) == 0; }

NodePtr exp_sum(const NodePtr& a, const NodePtr& b);

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r;
    size_t i = 0, j = 0;
    while (i < a.pw.size() || j < b.pw.size()) {
        if (j == b.pw.size() || (i < a.pw.size() && cmp(a.pw[i].first, b.pw[j].first) < 0)) {
            r.pw.push_back(a.pw[i++]);
        } else if (i == a.pw.size() || cmp(a.pw[i].first, b.pw[j].first) > 0) {
            r.pw.push_back(b.pw[j++]);
        } else {
            r.pw.push_back({a.pw[i].first, a.pw[i].second + b.pw[j].second});
            ++i;
            ++j;
        }
    }
    if (!a.ex) r.ex = b.ex;
    else if (!b.ex) r.ex = a.ex;
    else r.ex = exp_sum(a.ex, b.ex);
    return r;
}

void poly_add_term(Poly& p, const Mono& m, const CQ& c) {
    if (c.is_zero()) return;
    auto it = p.find(m);
    if (it == p.end()) {
        p.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) p.erase(it);
    }
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) poly_add_term(r, mono_mul(ma, mb), ca * cb);
    return r;
}

Poly poly_from_upoly(const UPoly& u, const Atom& v) {
    Poly r;
    for (size_t k = 0; k < u.size(); ++k) {
        if (u[k].is_zero()) continue;
        Mono m;
        if (k > 0) m.pw.push_back({v, int(k)});
        r[m] = u[k];
    }
    return r;
}

// cancel common univariate factors between numerator and each
// denominator factor; denominators are kept monic
void cancel(Poly& num, Den& den) {
    if (num.empty()) {
        den.clear();
        return;
    }
    for (auto it = den.begin(); it != den.end();) {
        const Atom& v = it->first;
        std::map<Mono, UPoly, MonoLess> groups;
        for (const auto& [m, c] : num) {
            Mono rest;
            rest.ex = m.ex;
            int k = 0;
            for (const auto& pr : m.pw) {
                if (same_atom(pr.first, v)) k = pr.second;
                else rest.pw.push_back(pr);
            }
            auto& g = groups[rest];
            if (int(g.size()) <= k) g.resize(k + 1);
            g[k] = c;
        }
        UPoly g = it->second;
        for (const auto& [rest, u] : groups) {
            g = upoly::gcd(g, u);
            if (upoly::degree(g) <= 0) break;
        }
        if (upoly::degree(g) > 0) {
            UPoly q, r;
            upoly::divmod(it->second, g, q, r);
            it->second = upoly::monic(q);
            Poly nn;
            for (const auto& [rest, u] : groups) {
                upoly::divmod(u, g, q, r);
                for (size_t k = 0; k < q.size(); ++k) {
                    if (q[k].is_zero()) continue;
                    Mono m = rest;
                    if (k > 0) {
                        m.pw.push_back({v, int(k)});
                        std::sort(m.pw.begin(), m.pw.end(),
                                  [](const auto& p1, const auto& p2) { return cmp(p1.first, p2.first) < 0; });
                    }
                    poly_add_term(nn, m, q[k]);
                }
            }
            num = std::move(nn);
        }
        if (upoly::degree(it->second) <= 0) it = den.erase(it);
        else ++it;
    }
}

NodePtr make_node(Poly num, Den den) {
    cancel(num, den);
    if (num.empty()) return zero_node();
    auto n = std::make_shared<ExprNode>();
    n->num = std::move(num);
    n->den = std::move(den);
    return n;
}

// a*D/Da where D is the merged denominator
Poly lift_num(const Poly& num, const Den& own, const Den& target) {
    Poly r = num;
    for (const auto& [v, dv] : target) {
        auto it = own.find(v);
        UPoly factor;
        if (it == own.end()) {
            factor = dv;
        } else {
            UPoly q, rem;
            upoly::divmod(dv, it->second, q, rem);
            factor = q;
        }
        if (upoly::degree(factor) > 0 || (factor.size() == 1 && !factor[0].is_one()))
            r = poly_mul(r, poly_from_upoly(factor, v));
    }
    return r;
}

NodePtr add_nodes(const NodePtr& a, const NodePtr& b) {
    if (a->num.empty()) return b;
    if (b->num.empty()) return a;
    Den lcm = a->den;
    for (const auto& [v, dv] : b->den) {
        auto it = lcm.find(v);
        if (it == lcm.end()) {
            lcm[v] = dv;
        } else {
            UPoly g = upoly::gcd(it->second, dv), q, r;
            upoly::divmod(upoly::mul(it->second, dv), g, q, r);
            it->second = upoly::monic(q);
        }
    }
    Poly na = lift_num(a->num, a->den, lcm);
    Poly nb = lift_num(b->num, b->den, lcm);
    for (const auto& [m, c] : nb) poly_add_term(na, m, c);
    return make_node(std::move(na), std::move(lcm));
}

NodePtr exp_sum(const NodePtr& a, const NodePtr& b) {
    NodePtr s = add_nodes(a, b);
    if (s->num.empty()) return nullptr;
    return s;
}

NodePtr mul_nodes(const NodePtr& a, const NodePtr& b) {
    if (a->num.empty() || b->num.empty()) return zero_node();
    Poly n = poly_mul(a->num, b->num);
    Den d = a->den;
    for (const auto& [v, dv] : b->den) {
        auto it = d.find(v);
        if (it == d.end()) d[v] = dv;
        else it->second = upoly::mul(it->second, dv);
    }
    return make_node(std::move(n), std::move(d));
}

NodePtr neg_node(const NodePtr& a) {
    auto n = std::make_shared<ExprNode>(*a);
    for (auto& [m, c] : n->num) c = -c;
    return n;
}

NodePtr inverse_node(const NodePtr& e) {
    if (e->num.empty()) throw PoleHit("division by zero expression");
    const Poly& N = e->num;
    // common monomial factor
    std::map<Atom, int, AtomLess> minp;
    bool first = true;
    NodePtr common_ex;
    for (const auto& [m, c] : N) {
        if (first) {
            for (const auto& pr : m.pw) minp[pr.first] = pr.second;
            common_ex = m.ex;
            first = false;
            continue;
        }
        std::map<Atom, int, AtomLess> cur;
        for (const auto& pr : m.pw) cur[pr.first] = pr.second;
        for (auto it = minp.begin(); it != minp.end();) {
            auto jt = cur.find(it->first);
            if (jt == cur.end()) {
                it = minp.erase(it);
            } else {
                it->second = std::min(it->second, jt->second);
                ++it;
            }
        }
        bool same = (!common_ex && !m.ex) || (common_ex && m.ex && cmp_node(common_ex, m.ex) == 0);
        if (!same) throw NonSeparable("cannot divide by a sum of different exponentials");
    }
    // reduced numerator must be univariate
    std::optional<Atom> var;
    UPoly u;
    for (const auto& [m, c] : N) {
        int k = 0;
        for (const auto& pr : m.pw) {
            int p = pr.second - (minp.count(pr.first) ? minp[pr.first] : 0);
            if (p == 0) continue;
            if (var && !same_atom(*var, pr.first))
                throw NonSeparable("cannot divide by an expression mixing several atoms");
            var = pr.first;
            k = p;
        }
        if (int(u.size()) <= k) u.resize(k + 1);
        u[k] += c;
    }
    auto inv = std::make_shared<ExprNode>();
    // numerator: old denominator product times 1/lc times exp(-ex)
    Poly num;
    Mono one;
    num[one] = CQ(1);
    for (const auto& [v, dv] : e->den) num = poly_mul(num, poly_from_upoly(dv, v));
    CQ lc = var ? u[upoly::degree(u)] : u[0];
    Mono scale;
    if (common_ex) scale.ex = neg_node(common_ex);
    Poly sp;
    sp[scale] = lc.inv();
    num = poly_mul(num, sp);
    Den den;
    for (const auto& [a, p] : minp) {
        UPoly mono(p + 1);
        mono[p] = CQ(1);
        den[a] = mono;
    }
    if (var) {
        UPoly mu = upoly::monic(u);
        auto it = den.find(*var);
        if (it == den.end()) den[*var] = mu;
        else it->second = upoly::mul(it->second, mu);
    }
    return make_node(std::move(num), std::move(den));
}

}  // namespace

// -------------------------------------------------------------- Expr API

Expr::Expr() : n_(zero_node()) {}
Expr::Expr(long v) : Expr(CQ(v)) {}
Expr::Expr(const CQ& c) {
    if (c.is_zero()) {
        n_ = zero_node();
        return;
    }
    auto n = std::make_shared<ExprNode>();
    n->num[Mono{}] = c;
    n_ = n;
}

Expr Expr::x() { return atom_expr(atom_of(Atom::X)); }
Expr Expr::t() { return atom_expr(atom_of(Atom::T)); }
Expr Expr::I() { return Expr(CQ::I()); }
Expr Expr::param(const std::string& name) {
    Atom a = atom_of(Atom::Param);
    a.name = name;
    return atom_expr(a);
}
Expr Expr::sample(std::shared_ptr<const SampleData> s, int order) {
    if (order > 3) throw OrderTooHigh("sampled function stores derivatives up to order 3");
    Atom a = atom_of(Atom::Sample);
    a.sample = std::move(s);
    a.order = order;
    return atom_expr(a);
}

bool Expr::is_zero() const { return n_->num.empty(); }

bool Expr::is_constant() const {
    if (n_->num.empty()) return true;
    if (n_->num.size() != 1 || !n_->den.empty()) return false;
    const Mono& m = n_->num.begin()->first;
    return m.pw.empty() && !m.ex;
}

CQ Expr::constant_value() const {
    if (!is_constant()) throw DomainError("expression is not constant: " + str());
    return n_->num.empty() ? CQ() : n_->num.begin()->second;
}

static bool atom_depends(const Atom& a, Var v) {
    switch (a.kind) {
        case Atom::X: return v == Var::X;
        case Atom::T: return v == Var::T;
        case Atom::Param: return false;
        case Atom::Ln:
        case Atom::Atan: return Expr(a.arg).depends_on(v);
        case Atom::Sample: return v == Var::X;
    }
    return false;
}

bool Expr::depends_on(Var v) const {
    for (const auto& [m, c] : n_->num) {
        for (const auto& pr : m.pw)
            if (atom_depends(pr.first, v)) return true;
        if (m.ex && Expr(m.ex).depends_on(v)) return true;
    }
    for (const auto& [a, d] : n_->den)
        if (atom_depends(a, v)) return true;
    return false;
}

template <class F>
static bool any_atom(const NodePtr& n, F&& f) {
    for (const auto& [m, c] : n->num) {
        for (const auto& pr : m.pw) {
            if (f(pr.first)) return true;
            if (pr.first.arg && any_atom(pr.first.arg, f)) return true;
        }
        if (m.ex && any_atom(m.ex, f)) return true;
    }
    for (const auto& [a, d] : n->den) {
        if (f(a)) return true;
        if (a.arg && any_atom(a.arg, f)) return true;
    }
    return false;
}

bool Expr::has_samples() const {
    return any_atom(n_, [](const Atom& a) { return a.kind == Atom::Sample; });
}

bool Expr::has_transcendental() const {
    for (const auto& [m, c] : n_->num)
        if (m.ex) return true;
    return any_atom(n_, [](const Atom& a) { return a.kind == Atom::Ln || a.kind == Atom::Atan; });
}

std::vector<std::string> Expr::params() const {
    std::set<std::string> s;
    any_atom(n_, [&](const Atom& a) {
        if (a.kind == Atom::Param) s.insert(a.name);
        return false;
    });
    return {s.begin(), s.end()};
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add_nodes(a.ptr(), b.ptr())); }
Expr operator-(const Expr& a) { return Expr(neg_node(a.ptr())); }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul_nodes(a.ptr(), b.ptr())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(mul_nodes(a.ptr(), inverse_node(b.ptr()))); }
bool operator==(const Expr& a, const Expr& b) { return cmp_node(a.ptr(), b.ptr()) == 0; }

Expr pow(const Expr& e, int n) {
    if (n < 0) return Expr(inverse_node(pow(e, -n).ptr()));
    Expr r(1), b = e;
    while (n) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

Expr exp(const Expr& e) {
    if (e.is_zero()) return Expr(1);
    auto n = std::make_shared<ExprNode>();
    Mono m;
    m.ex = e.ptr();
    n->num[m] = CQ(1);
    return Expr(NodePtr(n));
}

Expr ln(const Expr& e) {
    if (e.is_zero()) throw PoleHit("ln(0)");
    if (e.is_constant() && e.constant_value().is_one()) return Expr();
    Atom a = atom_of(Atom::Ln);
    a.arg = e.ptr();
    return atom_expr(a);
}

Expr atan(const Expr& e) {
    if (e.is_zero()) return Expr();
    Atom a = atom_of(Atom::Atan);
    a.arg = e.ptr();
    return atom_expr(a);
}

Expr from_upoly(const UPoly& p, Var v) {
    return Expr(make_node(poly_from_upoly(p, atom_of(v == Var::X ? Atom::X : Atom::T)), {}));
}

// -------------------------------------------------------- atom mapping

namespace {

using Leaf = std::function<std::optional<Expr>(const Atom&)>;

Expr map_atoms(const Expr& e, const Leaf& leaf);

Expr map_atom(const Atom& a, const Leaf& leaf) {
    if (auto r = leaf(a)) return *r;
    if (a.kind == Atom::Ln) return ln(map_atoms(Expr(a.arg), leaf));
    if (a.kind == Atom::Atan) return atan(map_atoms(Expr(a.arg), leaf));
    return atom_expr(a);
}

Expr map_atoms(const Expr& e, const Leaf& leaf) {
    Expr num;
    for (const auto& [m, c] : e.node().num) {
        Expr term(c);
        for (const auto& [a, p] : m.pw) term = term * pow(map_atom(a, leaf), p);
        if (m.ex) term = term * exp(map_atoms(Expr(m.ex), leaf));
        num = num + term;
    }
    Expr den(1);
    for (const auto& [a, dv] : e.node().den) {
        Expr va = map_atom(a, leaf), s;
        for (size_t k = dv.size(); k-- > 0;) s = s * va + Expr(dv[k]);
        den = den * s;
    }
    return num / den;
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, CQ>& values) {
    return map_atoms(e, [&](const Atom& a) -> std::optional<Expr> {
        if (a.kind == Atom::Param) {
            auto it = values.find(a.name);
            if (it != values.end()) return Expr(it->second);
        }
        return std::nullopt;
    });
}

Expr substitute(const Expr& e, const std::string& name, const CQ& value) {
    return substitute(e, std::map<std::string, CQ>{{name, value}});
}

Expr substitute_var(const Expr& e, Var v, const Expr& value) {
    return map_atoms(e, [&](const Atom& a) -> std::optional<Expr> {
        if ((a.kind == Atom::X && v == Var::X) || (a.kind == Atom::T && v == Var::T)) return value;
        if (a.kind == Atom::Sample && v == Var::X) throw DomainError("cannot substitute into a sampled function");
        return std::nullopt;
    });
}

CQ evaluate_exact(const Expr& e, const CQ& x, const CQ& t) {
    Expr r = map_atoms(e, [&](const Atom& a) -> std::optional<Expr> {
        if (a.kind == Atom::X) return Expr(x);
        if (a.kind == Atom::T) return Expr(t);
        if (a.kind == Atom::Param) throw UnboundSymbol("unbound parameter " + a.name);
        return std::nullopt;
    });
    if (!r.is_constant()) throw DomainError("expression is not rational at the given point");
    return r.constant_value();
}

// ------------------------------------------------------ differentiation

namespace {

Expr d_atom(const Atom& a, Var v) {
    switch (a.kind) {
        case Atom::X: return Expr(v == Var::X ? 1 : 0);
        case Atom::T: return Expr(v == Var::T ? 1 : 0);
        case Atom::Param: return Expr();
        case Atom::Ln: {
            Expr u(a.arg);
            Expr du = differentiate(u, v);
            return du.is_zero() ? du : du / u;
        }
        case Atom::Atan: {
            Expr u(a.arg);
            Expr du = differentiate(u, v);
            return du.is_zero() ? du : du / (Expr(1) + u * u);
        }
        case Atom::Sample:
            if (v == Var::T) return Expr();
            if (a.order >= 3) throw OrderTooHigh("sampled function differentiated beyond order 3");
            return Expr::sample(a.sample, a.order + 1);
    }
    return Expr();
}

Expr mono_expr(const Mono& m) {
    auto n = std::make_shared<ExprNode>();
    n->num[m] = CQ(1);
    return Expr(NodePtr(n));
}

Expr d_mono(const Mono& m, Var v) {
    Expr r;
    for (size_t i = 0; i < m.pw.size(); ++i) {
        Expr da = d_atom(m.pw[i].first, v);
        if (da.is_zero()) continue;
        Mono rest = m;
        if (--rest.pw[i].second == 0) rest.pw.erase(rest.pw.begin() + i);
        r = r + Expr(long(m.pw[i].second)) * da * mono_expr(rest);
    }
    if (m.ex) {
        Expr de = differentiate(Expr(m.ex), v);
        if (!de.is_zero()) r = r + de * mono_expr(m);
    }
    return r;
}

Expr d1(const Expr& e, Var v) {
    const auto& n = e.node();
    if (n.num.empty()) return e;
    Expr num;
    for (const auto& [m, c] : n.num) {
        Expr dm = d_mono(m, v);
        if (!dm.is_zero()) num = num + Expr(c) * dm;
    }
    auto invd = std::make_shared<ExprNode>();
    invd->num[Mono{}] = CQ(1);
    invd->den = n.den;
    Expr r = num * Expr(NodePtr(invd));
    Expr s;
    for (const auto& [a, dv] : n.den) {
        Expr da = d_atom(a, v);
        if (da.is_zero()) continue;
        Expr va = atom_expr(a);
        Expr p, dp;
        UPoly ddv = upoly::deriv(dv);
        for (size_t k = dv.size(); k-- > 0;) p = p * va + Expr(dv[k]);
        for (size_t k = ddv.size(); k-- > 0;) dp = dp * va + Expr(ddv[k]);
        s = s + dp * da / p;
    }
    if (!s.is_zero()) r = r - e * s;
    return r;
}

}  // namespace

Expr differentiate(const Expr& e, Var v, int order) {
    if (order < 0) throw DomainError("negative derivative order");
    Expr r = e;
    for (int k = 0; k < order; ++k) r = d1(r, v);
    return r;
}

// ------------------------------------------------------------ evaluation

int CompiledExpr::intern(const Atom& a) {
    for (size_t i = 0; i < atoms_.size(); ++i) {
        const CAtom& c = atoms_[i];
        if (c.kind != a.kind) continue;
        if (a.kind == Atom::X || a.kind == Atom::T) return int(i);
        if (a.kind == Atom::Param && c.name == a.name) return int(i);
        if (a.kind == Atom::Sample && c.sample == a.sample && c.order == a.order) return int(i);
    }
    CAtom c;
    c.kind = a.kind;
    c.name = a.name;
    c.sample = a.sample;
    c.order = a.order;
    if (a.arg) c.arg = std::make_shared<CompiledExpr>(Expr(a.arg));
    atoms_.push_back(std::move(c));
    return int(atoms_.size() - 1);
}

CompiledExpr::CompiledExpr(const Expr& e) {
    for (const auto& [m, c] : e.node().num) {
        CTerm t;
        t.c = c.to_complexl();
        for (const auto& [a, p] : m.pw) t.pw.push_back({intern(a), p});
        if (m.ex) {
            exps_.push_back(std::make_shared<CompiledExpr>(Expr(m.ex)));
            t.ex = int(exps_.size() - 1);
        }
        terms_.push_back(std::move(t));
    }
    for (const auto& [a, dv] : e.node().den) {
        CDen d;
        d.atom = intern(a);
        for (const auto& c : dv) d.coef.push_back(c.to_complexl());
        den_.push_back(std::move(d));
    }
}

cld CompiledExpr::operator()(long double x, long double t, const Bindings* b) const {
    std::vector<cld> av(atoms_.size());
    for (size_t i = 0; i < atoms_.size(); ++i) {
        const CAtom& a = atoms_[i];
        switch (a.kind) {
            case Atom::X: av[i] = x; break;
            case Atom::T: av[i] = t; break;
            case Atom::Param: {
                if (!b || !b->count(a.name)) throw UnboundSymbol("unbound parameter " + a.name);
                auto v = b->at(a.name);
                av[i] = cld(v.real(), v.imag());
                break;
            }
            case Atom::Ln: av[i] = std::log((*a.arg)(x, t, b)); break;
            case Atom::Atan: av[i] = std::atan((*a.arg)(x, t, b)); break;
            case Atom::Sample: av[i] = a.sample->eval(a.order, double(x)); break;
        }
    }
    cld num = 0;
    for (const auto& tm : terms_) {
        cld v = tm.c;
        for (const auto& [ai, p] : tm.pw) {
            cld base = av[ai];
            for (int k = 0; k < p; ++k) v *= base;
        }
        if (tm.ex >= 0) v *= std::exp((*exps_[tm.ex])(x, t, b));
        num += v;
    }
    if (den_.empty()) return num;
    cld den = 1;
    for (const auto& d : den_) {
        cld s = 0;
        for (size_t k = d.coef.size(); k-- > 0;) s = s * av[d.atom] + d.coef[k];
        den *= s;
    }
    if (std::abs(den) < 1e-12L) throw PoleHit("denominator vanishes");
    return num / den;
}

cld evaluate_l(const Expr& e, const Bindings& b) {
    long double x = 0, t = 0;
    auto ix = b.find("x"), it = b.find("t");
    if (ix != b.end()) x = ix->second.real();
    else if (e.depends_on(Var::X)) throw UnboundSymbol("unbound variable x");
    if (it != b.end()) t = it->second.real();
    else if (e.depends_on(Var::T)) throw UnboundSymbol("unbound variable t");
    return CompiledExpr(e)(x, t, &b);
}

std::complex<double> evaluate(const Expr& e, const Bindings& b) {
    cld v = evaluate_l(e, b);
    return {double(v.real()), double(v.imag())};
}

// ------------------------------------------------------------ extraction

std::optional<std::pair<UPoly, UPoly>> as_rational_in_x(const Expr& e) {
    UPoly num, den{CQ(1)};
    for (const auto& [m, c] : e.node().num) {
        if (m.ex) return std::nullopt;
        int k = 0;
        for (const auto& [a, p] : m.pw) {
            if (a.kind != Atom::X) return std::nullopt;
            k = p;
        }
        if (int(num.size()) <= k) num.resize(k + 1);
        num[k] = c;
    }
    for (const auto& [a, dv] : e.node().den) {
        if (a.kind != Atom::X) return std::nullopt;
        den = dv;
    }
    return std::make_pair(num, den);
}

// -------------------------------------------------------------- printing

static std::string atom_str(const Atom& a) {
    switch (a.kind) {
        case Atom::X: return "x";
        case Atom::T: return "t";
        case Atom::Param: return a.name;
        case Atom::Ln: return "ln(" + Expr(a.arg).str() + ")";
        case Atom::Atan: return "atan(" + Expr(a.arg).str() + ")";
        case Atom::Sample: {
            std::string s = a.sample->label.empty() ? "W0" : a.sample->label;
            for (int k = 0; k < a.order; ++k) s += "'";
            return s;
        }
    }
    return "?";
}

static std::string poly_str(const Poly& p) {
    if (p.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : p) {
        std::vector<std::string> f;
        for (const auto& [a, k] : m.pw) f.push_back(atom_str(a) + (k > 1 ? "^" + std::to_string(k) : ""));
        if (m.ex) f.push_back("exp(" + Expr(m.ex).str() + ")");
        std::string cs = c.str();
        bool neg = c.is_real() && sgn(c.re) < 0;
        if (neg) cs = (-c).str();
        if (!first) os << (neg ? " - " : " + ");
        else if (neg) os << "-";
        first = false;
        bool unit = cs == "1";
        if (!unit || f.empty()) os << cs;
        for (size_t i = 0; i < f.size(); ++i) os << ((i == 0 && unit) ? "" : "*") << f[i];
    }
    return os.str();
}

std::string Expr::str() const {
    std::string s = poly_str(n_->num);
    if (n_->den.empty()) return s;
    std::string d;
    for (const auto& [a, dv] : n_->den) {
        Poly p = poly_from_upoly(dv, a);
        if (!d.empty()) d += "*";
        d += "(" + poly_str(p) + ")";
    }
    return "(" + s + ")/" + d;
}

}  // namespace ssqm

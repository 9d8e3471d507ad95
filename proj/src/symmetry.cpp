#include "ssqm/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssqm {

namespace {

Expr q(long n, long d = 1) { return Expr::frac(n, d); }
const Expr& I() {
    static const Expr i = Expr::I();
    return i;
}

// one term coef(x) * d^order f_fn / dt^order of a determining equation
struct Entry {
    int fn;
    int order;
    Expr coef;
};

// the two odd equations, term by term
std::array<std::vector<Entry>, 2> odd_table(const Expr& W) {
    const Expr x = Expr::x();
    const Expr W1 = differentiate(W, Var::X), W3 = differentiate(W, Var::X, 3);
    const Expr W2W1 = W * W * W1, x2W1 = x * x * W1, xW = x * W, xW1 = x * W1, WW = W * W;
    std::vector<Entry> a = {
        {kAlpha2, 0, q(1, 8) * I() * W3 - q(3, 4) * I() * W2W1},
        {kAlpha2, 2, -q(1, 4) * I() * x2W1 - q(1, 2) * I() * xW},
        {kBeta2, 1, -I() * xW1 - I() * W},
        {kAlpha2, 1, -q(1, 4) * W1},
        {kGamma2, 0, W1},
        {kAlpha1, 1, -q(1, 4) * I() * WW},
        {kAlpha1, 3, -q(1, 4) * I() * x * x},
        {kBeta1, 2, -I() * x},
        {kAlpha1, 2, -q(1, 4)},
        {kGamma1, 1, Expr(1)},
    };
    std::vector<Entry> b = {
        {kAlpha1, 0, -q(1, 8) * I() * W3 + q(3, 4) * I() * W2W1},
        {kAlpha1, 2, q(1, 4) * I() * x2W1 + q(1, 2) * I() * xW},
        {kBeta1, 1, I() * xW1 + I() * W},
        {kAlpha1, 1, q(1, 4) * W1},
        {kGamma1, 0, -W1},
        {kAlpha2, 1, -q(1, 4) * I() * WW},
        {kAlpha2, 3, -q(1, 4) * I() * x * x},
        {kBeta2, 2, -I() * x},
        {kAlpha2, 2, -q(1, 4)},
        {kGamma2, 1, Expr(1)},
    };
    return {a, b};
}

// the scalar even equation on (a0, b0, c0)
std::vector<Entry> even_table(const Expr& V) {
    const Expr x = Expr::x();
    const Expr V1 = differentiate(V, Var::X);
    return {
        {0, 1, q(1, 2) * x * V1 + V}, {1, 0, V1}, {0, 3, q(1, 4) * x * x},
        {1, 2, x},                    {2, 1, I()}, {0, 2, -q(1, 4) * I()},
    };
}

long binom(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
long falling(int k, int j) {
    long r = 1;
    for (int i = 0; i < j; ++i) r *= (k - i);
    return r;
}

// Coefficient of t^m in e^{-iwt} d^o (t^k e^{iwt}), times the entry value.
// S is CQ or std::complex<double>.
template <class S>
S separated(int o, int k, int m, const S& iw) {
    int j = k - m;
    if (j < 0 || j > o) return S(0);
    S p(1);
    for (int e = 0; e < o - j; ++e) p = p * iw;
    return S(binom(o, j) * falling(k, j)) * p;
}

CQ exact_x(double x) { return CQ::frac(long(std::llround(x * 1e6)), 1000000); }

bool exactly_evaluable(const Expr& e) {
    return !e.has_samples() && !e.has_transcendental() && e.params().empty();
}

// points of g.xs farther than the pole radius from every pole
std::vector<double> usable_xs(const std::vector<double>& xs, const std::vector<double>& poles, double radius) {
    std::vector<double> out;
    for (double x : xs) {
        bool ok = true;
        for (double p : poles)
            if (std::abs(x - p) < radius) ok = false;
        if (ok) out.push_back(x);
    }
    return out;
}

Expr time_basis(int k, const CQ& iw) {
    Expr e = pow(Expr::t(), k);
    if (!iw.is_zero()) e = e * exp(Expr(iw) * Expr::t());
    return e;
}

// Exact nullspace of a frequency-separated system; rows indexed by
// (x, equation, t-power), columns by (function, power) with the functions
// placed in the order `slot`. With the coefficients of the highest
// derivatives placed last, every basis vector has the lowest differential
// order its free column allows.
template <class Table>
std::vector<std::vector<CQ>> exact_block(const std::vector<std::vector<std::vector<CQ>>>& vals,
                                         const Table& tables, const std::vector<int>& slot, int P, const CQ& iw) {
    const size_t cols = slot.size() * size_t(P + 1);
    std::vector<std::vector<CQ>> rows;
    for (const auto& at_x : vals) {
        for (size_t eq = 0; eq < tables.size(); ++eq) {
            for (int m = 0; m <= P; ++m) {
                std::vector<CQ> row(cols);
                bool any = false;
                for (size_t e = 0; e < tables[eq].size(); ++e) {
                    const CQ& c = at_x[eq][e];
                    if (c.is_zero()) continue;
                    const auto& en = tables[eq][e];
                    for (int k = m; k <= P; ++k) {
                        CQ s = separated<CQ>(en.order, k, m, iw);
                        if (s.is_zero()) continue;
                        row[size_t(slot[size_t(en.fn)] * (P + 1) + k)] += c * s;
                        any = true;
                    }
                }
                if (any) rows.push_back(std::move(row));
            }
        }
    }
    auto basis = exact_nullspace(std::move(rows), cols);
    // back to (function, power) indexing
    for (auto& v : basis) {
        std::vector<CQ> w(cols);
        for (size_t fn = 0; fn < slot.size(); ++fn)
            for (int k = 0; k <= P; ++k) w[fn * size_t(P + 1) + size_t(k)] = v[size_t(slot[fn] * (P + 1) + k)];
        v = std::move(w);
    }
    return basis;
}

// column order c0, b0, a0 and gamma, beta, alpha
const std::vector<int> kEvenSlots = {2, 1, 0};
const std::vector<int> kOddSlots = {4, 5, 2, 3, 0, 1};

}  // namespace

// ------------------------------------------------------------ even sector

static const char* tag_for(BoyerVerdict v) {
    switch (v) {
        case BoyerVerdict::Quadratic: return "so(2,1)⊞h(2)";
        case BoyerVerdict::InverseSquare: return "so(2,1)⊕gl(1)";
        default: return "so(2)⊕gl(1)";
    }
}

BoyerInfo boyer_classify(const Expr& V) {
    BoyerInfo info;
    info.tag = tag_for(info.verdict);
    auto r = as_rational_in_x(V);
    if (!r) return info;
    UPoly N = r->first, D = r->second;
    upoly::trim(N);
    upoly::trim(D);
    auto set = [&](BoyerVerdict v, int count) {
        info.verdict = v;
        info.count = count;
        info.tag = tag_for(v);
    };
    if (upoly::degree(D) == 0) {
        if (upoly::degree(N) <= 2) {
            set(BoyerVerdict::Quadratic, 6);
            info.alpha = N.size() > 2 ? CQ(2) * N[2] : CQ(0);
        }
        return info;
    }
    if (upoly::degree(D) != 2 || upoly::degree(N) > 4) return info;
    CQ p = -D[1] / CQ(2);
    if (!p.is_real() || D[0] != p * p) return info;
    // Taylor coefficients of N about p
    std::vector<CQ> n(5);
    UPoly cur = N;
    CQ fact(1);
    for (int j = 0; j <= 4; ++j) {
        if (j > 0) fact *= CQ(j);
        n[size_t(j)] = upoly::eval(cur, p) / fact;
        cur = upoly::deriv(cur);
    }
    if (n[0].is_zero() || !n[1].is_zero() || !n[3].is_zero()) return info;
    set(BoyerVerdict::InverseSquare, 4);
    info.alpha = CQ(2) * n[4];
    info.delta = n[0];
    info.pole = p.re.get_d();
    return info;
}

EvenClassification even_count(const Expr& W) {
    auto [v1, v2] = superpartners(W);
    EvenClassification c;
    c.upper = boyer_classify(v1);
    c.lower = boyer_classify(v2);
    c.n1 = c.upper.count;
    c.n2 = c.lower.count;
    c.total = c.n1 + c.n2;
    return c;
}

Expr boyer_residual(const Expr& V, const Expr& a0, const Expr& b0, const Expr& c0) {
    const Expr x = Expr::x();
    auto dt = [](const Expr& e, int o) { return differentiate(e, Var::T, o); };
    return (q(1, 2) * dt(a0, 1) * x + b0) * differentiate(V, Var::X) + dt(a0, 1) * V +
           q(1, 4) * dt(a0, 3) * x * x + dt(b0, 2) * x + I() * dt(c0, 1) - q(1, 4) * I() * dt(a0, 2);
}

// exact square root of a nonnegative rational, if any
static std::optional<mpq_class> exact_sqrt(const mpq_class& v) {
    if (sgn(v) < 0) return std::nullopt;
    mpz_class n = v.get_num(), d = v.get_den();
    mpz_class sn = sqrt(n), sd = sqrt(d);
    if (sn * sn != n || sd * sd != d) return std::nullopt;
    return mpq_class(sn, sd);
}

std::vector<EvenSolution> even_solutions(const Expr& V, int max_power) {
    if (!exactly_evaluable(V) || V.depends_on(Var::T))
        throw DomainError("even solutions need a rational, time-independent potential");
    BoyerInfo info = boyer_classify(V);
    std::vector<CQ> iws = {CQ(0)};
    if (info.verdict != BoyerVerdict::Generic && !info.alpha.is_zero()) {
        if (!info.alpha.is_real()) throw DomainError("complex oscillator frequency");
        auto s = exact_sqrt(abs(info.alpha.re));
        if (!s) throw DomainError("oscillator frequency is not rational");
        // e^{iwt} with w = sqrt(alpha); real exponentials for alpha < 0
        CQ iw1 = sgn(info.alpha.re) > 0 ? CQ(mpq_class(0), *s) : CQ(*s);
        for (int k : {1, -1, 2, -2}) iws.push_back(CQ(k) * iw1);
    }
    auto table = even_table(V);
    std::vector<double> xs = usable_xs(Grid::default_grid().xs, real_poles(V), 0.05);
    std::vector<std::vector<std::vector<CQ>>> vals;
    for (double xd : xs) {
        CQ x = exact_x(xd);
        std::vector<CQ> row;
        for (const auto& e : table) row.push_back(evaluate_exact(e.coef, x, CQ(0)));
        vals.push_back({row});
    }
    std::array<std::vector<Entry>, 1> tables = {table};
    std::vector<EvenSolution> out;
    for (const CQ& iw : iws) {
        for (const auto& v : exact_block(vals, tables, kEvenSlots, max_power, iw)) {
            std::array<Expr, 3> f;
            for (int fn = 0; fn < 3; ++fn)
                for (int k = 0; k <= max_power; ++k) {
                    const CQ& c = v[size_t(fn * (max_power + 1) + k)];
                    if (!c.is_zero()) f[size_t(fn)] += Expr(c) * time_basis(k, iw);
                }
            out.push_back({f[0], f[1], f[2]});
        }
    }
    return out;
}

CliffOp even_operator(const Expr& V, const EvenSolution& s, int block) {
    const Expr x = Expr::x();
    const Expr& A = s.a0;
    const Expr beta = I() * s.b0, gamma = I() * s.c0;
    const Expr Ad = differentiate(A, Var::T), Add = differentiate(A, Var::T, 2);
    const Expr B = q(1, 2) * I() * Ad * x + beta;
    const Expr C = q(1, 4) * Add * x * x - I() * differentiate(beta, Var::T) * x + A * V + gamma;
    auto on = [&](const Expr& c, int k) {
        if (block == 0) return CliffOp::term(c, 0, 0, k);
        Expr h = q(1, 2) * c;
        return CliffOp::term(h, 0, 0, k) + CliffOp::term(block > 0 ? h : -h, 3, 0, k);
    };
    return on(-q(1, 2) * A, 2) + on(B, 1) + on(C, 0);
}

// ------------------------------------------------------------- odd sector

std::optional<LinearPart> linear_part(const Expr& W) {
    auto r = as_rational_in_x(W);
    if (!r) return std::nullopt;
    UPoly quo, rem;
    upoly::divmod(r->first, r->second, quo, rem);
    upoly::trim(quo);
    LinearPart lp;
    if (upoly::degree(quo) >= 2) {
        lp.higher_degree = true;
        return lp;
    }
    if (quo.size() > 0) lp.b = quo[0];
    if (quo.size() > 1) lp.a = quo[1];
    return lp;
}

std::array<std::string, 12> family_constant_names(bool a_zero) {
    if (a_zero) return {"A0", "B0", "C0", "D0", "E0", "F0", "G0", "H0", "K0", "L0", "M0", "N0"};
    return {"A", "B", "C", "D", "E", "F", "K", "L", "M", "G", "P", "Q"};
}

OddCoefficients family_a0(const CQ& b, const std::array<CQ, 12>& c) {
    const Expr t = Expr::t(), B = Expr(b);
    const Expr A0(c[0]), B0(c[1]), C0(c[2]), D0(c[3]), E0(c[4]), F0(c[5]);
    const Expr G0(c[6]), H0(c[7]), K0(c[8]), L0(c[9]), M0(c[10]), N0(c[11]);
    OddCoefficients oc;
    oc.a_zero = true;
    oc.constants = c;
    oc.names = family_constant_names(true);
    const Expr lift = t * (1 + q(3, 2) * I() * B * B * t) * q(1, 4);
    oc.f[kAlpha1] = q(1, 2) * A0 * t * t + B0 * t + C0;
    oc.f[kAlpha2] = q(1, 2) * D0 * t * t + E0 * t + F0;
    oc.f[kBeta1] = -q(1, 4) * B * D0 * t * t + G0 * t + H0;
    oc.f[kBeta2] = q(1, 4) * B * A0 * t * t + K0 * t + L0;
    oc.f[kGamma1] = A0 * lift + q(1, 4) * I() * B0 * B * B * t + I() * K0 * B * t + M0;
    oc.f[kGamma2] = D0 * lift + q(1, 4) * I() * E0 * B * B * t - I() * G0 * B * t + N0;
    return oc;
}

OddCoefficients family_a(const CQ& a, const CQ& b, const std::array<CQ, 12>& c, bool printed) {
    if (a.is_zero()) throw DegenerateCase("the a != 0 family needs a != 0");
    const Expr t = Expr::t(), av(a), bv(b);
    auto e = [&](int k) { return exp(Expr(CQ(k) * CQ::I() * a) * t); };
    const Expr A(c[0]), B(c[1]), C(c[2]), D(c[3]), E(c[4]), F(c[5]);
    const Expr K(c[6]), L(c[7]), M(c[8]), G(c[9]), P(c[10]), Q(c[11]);
    const Expr e1 = e(1), em1 = e(-1), e2 = e(2), em2 = e(-2), e3 = e(3), em3 = e(-3);
    OddCoefficients oc;
    oc.a_zero = false;
    oc.constants = c;
    oc.names = family_constant_names(false);
    oc.f[kAlpha1] = A * e1 + B * em1 + I() * C * e3 - I() * D * em3;
    oc.f[kAlpha2] = E * e1 + F * em1 + C * e3 + D * em3;
    const Expr d_sign = printed ? Expr(-1) : Expr(1);
    oc.f[kBeta1] = q(1, 2) * I() * bv * (A * e1 - B * em1) + I() * (K * e2 - L * em2) -
                   q(3, 2) * bv * (C * e3 + d_sign * D * em3) + M;
    const Expr ef = printed ? q(1, 2) * bv : q(1, 2) * I() * bv;
    oc.f[kBeta2] = ef * (E * e1 - F * em1) + K * e2 + L * em2 + q(3, 2) * I() * bv * (C * e3 - D * em3) + G;
    oc.f[kGamma1] =
        e1 * (I() * P + q(1, 4) * av * E + q(1, 4) * bv * bv * E + q(1, 4) * I() * av * A +
              q(1, 4) * I() * bv * bv * A) -
        em1 * (I() * Q - q(1, 4) * av * F + q(1, 4) * bv * bv * F + q(1, 4) * I() * av * B -
               q(1, 4) * I() * bv * bv * B) +
        2 * I() * bv * (K * e2 + L * em2) - C * e3 * (q(3, 4) * av + q(9, 4) * bv * bv) -
        D * em3 * (q(3, 4) * av - q(9, 4) * bv * bv);
    oc.f[kGamma2] = P * e1 + Q * em1 + 2 * bv * (K * e2 - L * em2) + q(3, 4) * I() * C * e3 * (3 * bv * bv + av) +
                    q(3, 4) * I() * D * em3 * (3 * bv * bv - av);
    return oc;
}

OddCoefficients odd_family(const CQ& a, const CQ& b, const std::array<CQ, 12>& c, bool printed) {
    return a.is_zero() ? family_a0(b, c) : family_a(a, b, c, printed);
}

OddCoefficients odd_C_family(const CQ& a, const CQ& b, const CQ& C) {
    if (a.is_zero()) throw DegenerateCase("the C family needs a != 0");
    const Expr bv(b), av(a), Cv(C);
    const Expr e3 = Cv * exp(Expr(CQ(3) * CQ::I() * a) * Expr::t());
    OddCoefficients oc;
    oc.a_zero = false;
    oc.names = family_constant_names(false);
    oc.constants[2] = C;
    oc.f[kAlpha1] = I() * e3;
    oc.f[kAlpha2] = e3;
    oc.f[kBeta1] = -q(3, 2) * bv * e3;
    oc.f[kBeta2] = q(3, 2) * I() * bv * e3;
    oc.f[kGamma1] = -(q(3, 4) * av + q(9, 4) * bv * bv) * e3;
    oc.f[kGamma2] = (q(9, 4) * I() * bv * bv + q(3, 4) * I() * av) * e3;
    return oc;
}

std::pair<Expr, Expr> odd_residuals(const Expr& W, const OddCoefficients& oc) {
    auto tables = odd_table(W);
    Expr r[2];
    for (int eq = 0; eq < 2; ++eq)
        for (const auto& e : tables[size_t(eq)])
            r[eq] += e.coef * differentiate(oc.f[size_t(e.fn)], Var::T, e.order);
    return {r[0], r[1]};
}

RankReport family_rank(const Expr& W, const CQ& a, const CQ& b, const Grid& g, bool printed) {
    const long npts = long(g.xs.size() * g.ts.size());
    Eigen::MatrixXd M(4 * npts, 12);
    for (int j = 0; j < 12; ++j) {
        std::array<CQ, 12> c{};
        c[size_t(j)] = CQ(1);
        auto [ra, rb] = odd_residuals(W, odd_family(a, b, c, printed));
        CompiledExpr ca(ra), cb(rb);
        long row = 0;
        for (double x : g.xs)
            for (double t : g.ts) {
                std::complex<double> va(ca(x, t)), vb(cb(x, t));
                M(row++, j) = va.real();
                M(row++, j) = va.imag();
                M(row++, j) = vb.real();
                M(row++, j) = vb.imag();
            }
    }
    return numerical_rank(normalize_columns(M));
}

OddCountReport odd_count(const Expr& W, double a, double b, const Grid& g, const OddCountOptions& opt) {
    (void)b;  // b enters through W; the frequency set depends on a only
    const int P = opt.max_power;
    const int cols = 6 * (P + 1);
    auto tables = odd_table(W);
    // coefficient values at each x, per equation and entry
    std::vector<std::array<std::vector<std::complex<double>>, 2>> vals;
    std::array<std::vector<CompiledExpr>, 2> ce;
    for (int eq = 0; eq < 2; ++eq)
        for (const auto& e : tables[size_t(eq)]) ce[size_t(eq)].emplace_back(e.coef);
    for (double x : g.xs) {
        std::array<std::vector<std::complex<double>>, 2> v;
        for (int eq = 0; eq < 2; ++eq)
            for (const auto& c : ce[size_t(eq)]) v[size_t(eq)].push_back(std::complex<double>(c(x, 0)));
        vals.push_back(std::move(v));
    }
    std::vector<double> omegas = {0};
    if (a != 0)
        for (int k : {1, -1, 2, -2, 3, -3}) omegas.push_back(k * a);

    OddCountReport rep;
    rep.gap = std::numeric_limits<double>::infinity();
    rep.smallest_kept = std::numeric_limits<double>::infinity();
    for (double w : omegas) {
        const std::complex<double> iw(0, w);
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(long(vals.size()) * 2 * (P + 1), cols);
        long row = 0;
        for (const auto& at_x : vals)
            for (int eq = 0; eq < 2; ++eq)
                for (int m = 0; m <= P; ++m, ++row)
                    for (size_t e = 0; e < tables[size_t(eq)].size(); ++e) {
                        const auto& en = tables[size_t(eq)][e];
                        for (int k = m; k <= P; ++k)
                            M(row, en.fn * (P + 1) + k) += at_x[size_t(eq)][e] * separated(en.order, k, m, iw);
                    }
        // unit columns; numerically zero columns become exact zeros
        Eigen::VectorXd nr = M.colwise().norm();
        const double mx = nr.maxCoeff();
        for (int j = 0; j < cols; ++j) {
            if (nr(j) <= 1e-12 * mx || nr(j) == 0.0) {
                M.col(j).setZero();
                nr(j) = 1;
            } else {
                M.col(j) /= nr(j);
            }
        }
        RankReportC rr = numerical_rank(M, opt.rel_threshold);
        rep.rows += M.rows();
        rep.cols += M.cols();
        rep.count += int(rr.nullity);
        rep.threshold = std::max(rep.threshold, rr.threshold);
        rep.gap = std::min(rep.gap, rr.gap);
        if (rr.rank > 0) rep.smallest_kept = std::min(rep.smallest_kept, rr.smallest_kept);
        rep.largest_dropped = std::max(rep.largest_dropped, rr.largest_dropped);
        for (long v = 0; v < rr.nullity; ++v) {
            OddSolution s;
            for (int fn = 0; fn < 6; ++fn)
                for (int k = 0; k <= P; ++k) {
                    std::complex<double> c = rr.nullspace(fn * (P + 1) + k, v) / nr(fn * (P + 1) + k);
                    if (std::abs(c) == 0.0) continue;
                    s.f[size_t(fn)] += Expr(CQ::from_complex(c)) * time_basis(k, CQ::from_double(w) * CQ::I());
                }
            rep.basis.push_back(std::move(s));
        }
        rep.blocks.push_back({w, std::move(rr)});
    }
    if (!std::isfinite(rep.smallest_kept)) rep.smallest_kept = 0;
    return rep;
}

std::optional<std::vector<OddSolution>> odd_solutions_exact(const Expr& W, const CQ& a, const Grid& g,
                                                            int max_power) {
    if (!exactly_evaluable(W) || W.depends_on(Var::T)) return std::nullopt;
    auto tables = odd_table(W);
    std::vector<double> xs = usable_xs(g.xs, real_poles(W), g.pole_radius);
    std::vector<std::vector<std::vector<CQ>>> vals;
    try {
        for (double xd : xs) {
            CQ x = exact_x(xd);
            std::vector<std::vector<CQ>> at_x(2);
            for (int eq = 0; eq < 2; ++eq)
                for (const auto& e : tables[size_t(eq)]) at_x[size_t(eq)].push_back(evaluate_exact(e.coef, x, CQ(0)));
            vals.push_back(std::move(at_x));
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    std::vector<CQ> iws = {CQ(0)};
    if (!a.is_zero())
        for (int k : {1, -1, 2, -2, 3, -3}) iws.push_back(CQ(k) * CQ::I() * a);
    std::vector<OddSolution> out;
    for (const CQ& iw : iws) {
        for (const auto& v : exact_block(vals, tables, kOddSlots, max_power, iw)) {
            OddSolution s;
            for (int fn = 0; fn < 6; ++fn)
                for (int k = 0; k <= max_power; ++k) {
                    const CQ& c = v[size_t(fn * (max_power + 1) + k)];
                    if (!c.is_zero()) s.f[size_t(fn)] += Expr(c) * time_basis(k, iw);
                }
            out.push_back(std::move(s));
        }
    }
    return out;
}

CliffOp odd_operator(const Expr& W, const OddSolution& s) {
    const Expr x = Expr::x();
    const Expr W1 = differentiate(W, Var::X);
    const auto& f = s.f;
    auto dt = [](const Expr& e, int o = 1) { return differentiate(e, Var::T, o); };
    // scalar block operator -a/2 Dx^2 + B Dx + C for superpotential w
    auto block = [&](const Expr& a, const Expr& beta, const Expr& gamma, const Expr& w, const Expr& w1) {
        std::array<Expr, 3> z;
        z[2] = -q(1, 2) * a;
        z[1] = q(1, 2) * I() * dt(a) * x - q(1, 2) * a * w + beta;
        z[0] = q(1, 4) * dt(a, 2) * x * x + q(1, 2) * I() * dt(a) * x * w - I() * dt(beta) * x - q(1, 4) * a * w1 +
               q(1, 4) * a * w * w + beta * w + gamma;
        return z;
    };
    auto zp = block(f[kAlpha1] - I() * f[kAlpha2], I() * f[kBeta1] + f[kBeta2], I() * f[kGamma1] + f[kGamma2], W, W1);
    auto zm = block(f[kAlpha1] + I() * f[kAlpha2], I() * f[kBeta1] - f[kBeta2], I() * f[kGamma1] - f[kGamma2], -W, -W1);
    CliffOp out;
    for (int k = 0; k <= 2; ++k) {
        out += CliffOp::term(q(1, 2) * (zp[size_t(k)] + zm[size_t(k)]), 1, 0, k);
        out += CliffOp::term(q(1, 2) * I() * (zp[size_t(k)] - zm[size_t(k)]), 2, 0, k);
    }
    return out;
}

// ---------------------------------------------------- explicit operators

std::pair<CliffOp, CliffOp> witten_pair(const Expr& W) {
    CliffOp q1 = I() * CliffOp::dx(1, 1) - W * CliffOp::sigma(2);
    CliffOp q2 = I() * CliffOp::dx(1, 2) + W * CliffOp::sigma(1);
    return {q1, q2};
}

CliffOp q1_A0(const CQ& b, const Expr& W, bool printed) {
    const Expr x = Expr::x(), t = Expr::t(), B(b);
    const Expr W1 = differentiate(W, Var::X);
    const Expr xterm = printed ? q(1, 4) * x : q(1, 4) * x * x;
    CliffOp s1 = (q(1, 2) * I() * t * t) * CliffOp::dt(1) + (q(1, 2) * I() * t * x) * CliffOp::dx(1, 1) +
                 CliffOp::scalar(xterm + q(1, 4) * B * t * t * W - q(1, 8) * t * t * W * W + q(1, 4) * I() * t -
                                     q(3, 8) * B * B * t * t,
                                 1);
    CliffOp s2 = (q(1, 4) * I() * B * t * t) * CliffOp::dx(1, 2) +
                 CliffOp::scalar(q(1, 2) * B * t * x + q(1, 8) * I() * t * t * W1 - q(1, 2) * t * x * W, 2) -
                 (q(1, 4) * I() * t * t * W) * CliffOp::dx(1, 2);
    return s1 + s2;
}

std::array<Expr, 3> w0_conditions(const Expr& W0, const CQ& b) {
    const Expr x = Expr::x(), B(b);
    const Expr W1 = differentiate(W0, Var::X);
    return {differentiate(W0, Var::X, 3) - 6 * W0 * (W0 + 2 * B) * W1, 2 * B * x * W1 + W0 * (W0 + 4 * B),
            x * (x * W1 + 2 * W0)};
}

// ------------------------------------------------------------ W0 ODEs

static W0Solution sample_solution(const OdeRhs& rhs, const std::array<double, 3>& init, double x0, double x1,
                                  double h, const std::string& label) {
    if (!(x1 > x0)) throw DomainError("integration span must satisfy x1 > x0");
    Trajectory tr = rk4(rhs, {init[0], init[1], init[2]}, x0, x1, h);
    auto data = std::make_shared<SampleData>();
    data->label = label;
    data->x0 = tr.xs.front();
    data->h = tr.xs.size() > 1 ? tr.xs[1] - tr.xs[0] : h;
    for (size_t i = 0; i < tr.xs.size(); ++i) {
        for (int k = 0; k < 3; ++k) data->f[k].push_back(tr.ys[i][size_t(k)]);
        data->f[3].push_back(tr.dys[i][2]);
    }
    W0Solution s;
    s.data = data;
    s.w0 = Expr::sample(data, 0);
    s.x0 = x0;
    s.x1 = x1;
    return s;
}

W0Solution integrate_w0(double a, double b, const std::array<double, 3>& init, double x0, double x1, double h) {
    if (a == 0) throw DegenerateCase("the W0 equation of the C family needs a != 0");
    OdeRhs rhs = [a, b](double x, const std::vector<double>& y) {
        const double L = a * x + b, w = y[0], w1 = y[1];
        return std::vector<double>{y[1], y[2], 6 * w * w * w1 - 12 * L * L * w1 + 12 * L * w * w1 - 36 * a * L * w};
    };
    return sample_solution(rhs, init, x0, x1, h, "W0");
}

W0Solution integrate_w0_a0(double b, double kappa, const std::array<double, 3>& init, double x0, double x1,
                           double h) {
    OdeRhs rhs = [b, kappa](double, const std::vector<double>& y) {
        const double w = y[0] + b;
        return std::vector<double>{y[1], y[2], 6 * w * w * y[1] + kappa * y[1]};
    };
    return sample_solution(rhs, init, x0, x1, h, "W0");
}

InitSearch find_nonblowup_init(double a, double b, const std::array<double, 3>& init, double x0, double x1,
                               int max_iter) {
    InitSearch out;
    auto scaled = [&](double s) { return std::array<double, 3>{s * init[0], s * init[1], s * init[2]}; };
    try {
        out.init = init;
        out.solution = integrate_w0(a, b, init, x0, x1);
        return out;
    } catch (const BlowUp&) {
    }
    // lo always integrates (s = 0 is the fixed point W0 = 0)
    double lo = 0, hi = 1;
    std::optional<W0Solution> best;
    for (int it = 0; it < max_iter; ++it) {
        ++out.iterations;
        double mid = 0.5 * (lo + hi);
        try {
            W0Solution s = integrate_w0(a, b, scaled(mid), x0, x1);
            lo = mid;
            best = std::move(s);
        } catch (const BlowUp&) {
            hi = mid;
        }
    }
    if (!best) throw BlowUp("no non-blow-up scaling of the initial data found", x0);
    out.scale = lo;
    out.init = scaled(lo);
    out.solution = std::move(*best);
    return out;
}

double ode_residual_a(const Expr& W0, double a, double b, const Grid& g) {
    CompiledExpr w(W0), w1(differentiate(W0, Var::X)), w3(differentiate(W0, Var::X, 3));
    double worst = 0;
    for (double x : g.xs) {
        const long double L = a * x + b, v = w(x, 0).real(), v1 = w1(x, 0).real();
        long double r = w3(x, 0).real() - (6 * v * v * v1 - 12 * L * L * v1 + 12 * L * v * v1 - 36 * a * L * v);
        worst = std::max(worst, double(std::abs(r)));
    }
    return worst;
}

std::pair<double, double> ode_fit_a0(const Expr& W0, double b, const Grid& g) {
    CompiledExpr w(W0), w1(differentiate(W0, Var::X)), w3(differentiate(W0, Var::X, 3));
    // W0''' - 6 (W0 + b)^2 W0' = kappa W0'
    std::vector<double> r, d;
    for (double x : g.xs) {
        double v = double(w(x, 0).real()) + b, v1 = double(w1(x, 0).real());
        r.push_back(double(w3(x, 0).real()) - 6 * v * v * v1);
        d.push_back(v1);
    }
    double rd = 0, dd = 0, rr = 0;
    for (size_t i = 0; i < r.size(); ++i) {
        rd += r[i] * d[i];
        dd += d[i] * d[i];
        rr += r[i] * r[i];
    }
    if (dd == 0) return {0, rr == 0 ? 0 : 1};
    const double kappa = rd / dd;
    double res = 0;
    for (size_t i = 0; i < r.size(); ++i) res += (r[i] - kappa * d[i]) * (r[i] - kappa * d[i]);
    const double scale = std::max(std::sqrt(rr), std::sqrt(dd) * std::abs(kappa));
    return {kappa, scale > 0 ? std::sqrt(res) / scale : 0};
}

}  // namespace ssqm

#include "ssqm/cliffop.hpp"

#include <sstream>

namespace ssqm {

std::pair<CQ, int> pauli_mul(int mu, int nu) {
    if (mu == 0) return {CQ(1), nu};
    if (nu == 0) return {CQ(1), mu};
    if (mu == nu) return {CQ(1), 0};
    int rho = 6 - mu - nu;
    // cyclic (1,2), (2,3), (3,1) give +i
    bool cyclic = (mu == 1 && nu == 2) || (mu == 2 && nu == 3) || (mu == 3 && nu == 1);
    return {cyclic ? CQ::I() : -CQ::I(), rho};
}

static long binom(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

CliffOp CliffOp::term(const Expr& c, int mu, int j, int k) {
    if (mu < 0 || mu > 3) throw DomainError("Pauli index out of range");
    if (j > kMaxDt || k > kMaxDx) throw OrderOverflow("operator order exceeds Dt^1 Dx^4");
    CliffOp op;
    op.add_term({mu, j, k}, c);
    return op;
}

void CliffOp::add_term(const OpKey& key, const Expr& c) {
    if (c.is_zero()) return;
    auto it = t_.find(key);
    if (it == t_.end()) {
        t_.emplace(key, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

Expr CliffOp::coeff(int mu, int j, int k) const {
    auto it = t_.find({mu, j, k});
    return it == t_.end() ? Expr() : it->second;
}

Parity CliffOp::parity() const {
    if (t_.empty()) return Parity::Zero;
    bool odd = false, even = false;
    for (const auto& [k, c] : t_) (pauli_odd(k[0]) ? odd : even) = true;
    return odd && even ? Parity::Mixed : (odd ? Parity::Odd : Parity::Even);
}

int CliffOp::max_dx() const {
    int m = -1;
    for (const auto& [k, c] : t_) m = std::max(m, k[2]);
    return m;
}

int CliffOp::max_dt() const {
    int m = -1;
    for (const auto& [k, c] : t_) m = std::max(m, k[1]);
    return m;
}

bool CliffOp::has_samples() const {
    for (const auto& [k, c] : t_)
        if (c.has_samples()) return true;
    return false;
}

CliffOp operator+(const CliffOp& a, const CliffOp& b) {
    CliffOp r = a;
    for (const auto& [k, c] : b.t_) r.add_term(k, c);
    return r;
}

CliffOp operator-(const CliffOp& a) {
    CliffOp r;
    for (const auto& [k, c] : a.t_) r.t_.emplace(k, -c);
    return r;
}

CliffOp operator-(const CliffOp& a, const CliffOp& b) { return a + (-b); }

CliffOp operator*(const Expr& c, const CliffOp& a) {
    CliffOp r;
    if (c.is_zero()) return r;
    for (const auto& [k, v] : a.t_) r.add_term(k, c * v);
    return r;
}

CliffOp operator*(const CliffOp& a, const CliffOp& b) {
    CliffOp r;
    for (const auto& [ka, f] : a.t_) {
        const int mu = ka[0], j = ka[1], k = ka[2];
        for (const auto& [kb, g] : b.t_) {
            const int nu = kb[0], l = kb[1], m = kb[2];
            auto [phase, rho] = pauli_mul(mu, nu);
            for (int p = 0; p <= j; ++p) {
                Expr gt = differentiate(g, Var::T, p);
                if (gt.is_zero()) continue;
                for (int q = 0; q <= k; ++q) {
                    Expr gx = differentiate(gt, Var::X, q);
                    if (gx.is_zero()) continue;
                    int jj = j - p + l, kk = k - q + m;
                    if (jj > kMaxDt || kk > kMaxDx)
                        throw OrderOverflow("product exceeds Dt^1 Dx^4: " + std::to_string(jj) + "," +
                                            std::to_string(kk));
                    Expr c = Expr(phase * CQ(binom(j, p) * binom(k, q))) * f * gx;
                    r.add_term({rho, jj, kk}, c);
                }
            }
        }
    }
    return r;
}

bool operator==(const CliffOp& a, const CliffOp& b) { return (a - b).is_zero(); }

std::pair<Expr, Expr> CliffOp::apply(const std::pair<Expr, Expr>& psi) const {
    Expr u, v;
    for (const auto& [key, c] : t_) {
        const int mu = key[0], j = key[1], k = key[2];
        Expr du = differentiate(differentiate(psi.first, Var::T, j), Var::X, k);
        Expr dv = differentiate(differentiate(psi.second, Var::T, j), Var::X, k);
        switch (mu) {
            case 0: u += c * du; v += c * dv; break;
            case 1: u += c * dv; v += c * du; break;
            case 2: u += -Expr::I() * c * dv; v += Expr::I() * c * du; break;
            case 3: u += c * du; v += -(c * dv); break;
        }
    }
    return {u, v};
}

std::string CliffOp::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ") * s" << k[0];
        if (k[1]) os << " * Dt";
        if (k[2]) os << " * Dx" << (k[2] > 1 ? "^" + std::to_string(k[2]) : "");
    }
    return os.str();
}

CliffOp compose(const CliffOp& a, const CliffOp& b) { return a * b; }
CliffOp commutator(const CliffOp& a, const CliffOp& b) { return a * b - b * a; }
CliffOp anticommutator(const CliffOp& a, const CliffOp& b) { return a * b + b * a; }

CliffOp graded_bracket(const CliffOp& a, const CliffOp& b) {
    if (a.parity() == Parity::Odd && b.parity() == Parity::Odd) return anticommutator(a, b);
    return commutator(a, b);
}

CliffOp time_derivative(const CliffOp& a) {
    CliffOp r;
    for (const auto& [k, c] : a.terms()) r += CliffOp::term(differentiate(c, Var::T), k[0], k[1], k[2]);
    return r;
}

CliffOp canonical_reduce(const CliffOp& q, const CliffOp& h) {
    if (h.max_dt() > 0) throw DomainError("Hamiltonian must not contain Dt");
    CliffOp r;
    const CliffOp minus_ih = -Expr::I() * h;
    for (const auto& [k, c] : q.terms()) {
        if (k[1] == 0) {
            r += CliffOp::term(c, k[0], 0, k[2]);
        } else {
            CliffOp left = CliffOp::term(c, k[0], 0, k[2]);
            r += left * minus_ih;
        }
    }
    return r;
}

CliffOp schrodinger_derivative(const CliffOp& q, const CliffOp& h) {
    CliffOp r = canonical_reduce(q, h);
    return Expr::I() * time_derivative(r) + commutator(r, h);
}

double max_abs_on_grid(const Expr& e, const Grid& g, const Bindings& b) {
    if (e.is_zero()) return 0;
    CompiledExpr ce(e);
    double m = 0;
    const bool dx = e.depends_on(Var::X), dt = e.depends_on(Var::T);
    const std::vector<double> zero{0.0};
    for (double x : dx ? g.xs : zero)
        for (double t : dt ? g.ts : zero) m = std::max(m, double(std::abs(ce(x, t, &b))));
    return m;
}

double max_abs_on_grid(const CliffOp& op, const Grid& g, const Bindings& b) {
    double m = 0;
    for (const auto& [k, c] : op.terms()) m = std::max(m, max_abs_on_grid(c, g, b));
    return m;
}

bool is_zero_operator(const CliffOp& op, const Grid& g, double tol) {
    if (op.is_zero()) return true;
    if (!op.has_samples()) return false;
    return max_abs_on_grid(op, g) < tol;
}

}  // namespace ssqm

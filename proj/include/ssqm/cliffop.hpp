#pragma once

// Clifford-matrix-valued differential operators
//   sum of c(x,t) * s<mu> * Dt^j * Dx^k,  mu in 0..3, j <= 1, k <= 4
// composed with the Leibniz rule and the Pauli table.

#include "ssqm/expr.hpp"
#include "ssqm/grid.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>

namespace ssqm {

constexpr int kMaxDt = 1;
constexpr int kMaxDx = 4;

enum class Parity { Zero, Even, Odd, Mixed };

// sigma_mu * sigma_nu = phase * sigma_rho
std::pair<CQ, int> pauli_mul(int mu, int nu);
inline bool pauli_odd(int mu) { return mu == 1 || mu == 2; }

using OpKey = std::array<int, 3>;  // mu, j, k

class CliffOp {
public:
    CliffOp() = default;

    static CliffOp sigma(int mu) { return term(Expr(1), mu, 0, 0); }
    static CliffOp scalar(const Expr& c, int mu = 0) { return term(c, mu, 0, 0); }
    static CliffOp dx(int k = 1, int mu = 0) { return term(Expr(1), mu, 0, k); }
    static CliffOp dt(int mu = 0) { return term(Expr(1), mu, 1, 0); }
    static CliffOp term(const Expr& c, int mu, int j, int k);

    const std::map<OpKey, Expr>& terms() const { return t_; }
    Expr coeff(int mu, int j, int k) const;
    bool is_zero() const { return t_.empty(); }
    Parity parity() const;
    int max_dx() const;
    int max_dt() const;
    bool has_samples() const;

    friend CliffOp operator+(const CliffOp& a, const CliffOp& b);
    friend CliffOp operator-(const CliffOp& a, const CliffOp& b);
    friend CliffOp operator-(const CliffOp& a);
    // left multiplication by a function
    friend CliffOp operator*(const Expr& c, const CliffOp& a);
    // operator product
    friend CliffOp operator*(const CliffOp& a, const CliffOp& b);
    CliffOp& operator+=(const CliffOp& b) { return *this = *this + b; }
    friend bool operator==(const CliffOp& a, const CliffOp& b);

    // apply to a two-component function of (x, t)
    std::pair<Expr, Expr> apply(const std::pair<Expr, Expr>& psi) const;

    // terms in order (mu, j, k)
    std::string str() const;

private:
    std::map<OpKey, Expr> t_;
    void add_term(const OpKey& k, const Expr& c);
};

CliffOp compose(const CliffOp& a, const CliffOp& b);
CliffOp commutator(const CliffOp& a, const CliffOp& b);
CliffOp anticommutator(const CliffOp& a, const CliffOp& b);
// commutator unless both are odd
CliffOp graded_bracket(const CliffOp& a, const CliffOp& b);
CliffOp time_derivative(const CliffOp& a);
// replace each a sigma Dt Dx^k term by a sigma Dx^k (-i H)
CliffOp canonical_reduce(const CliffOp& q, const CliffOp& h);
// i dQ/dt + [Q, H] after canonical reduction; zero iff Q is a symmetry
CliffOp schrodinger_derivative(const CliffOp& q, const CliffOp& h);

double max_abs_on_grid(const Expr& e, const Grid& g, const Bindings& b = {});
double max_abs_on_grid(const CliffOp& op, const Grid& g, const Bindings& b = {});
// exact zero when possible, grid test for sampled coefficients
bool is_zero_operator(const CliffOp& op, const Grid& g, double tol = 1e-9);

}  // namespace ssqm

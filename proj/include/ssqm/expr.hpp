#pragma once

// Symbolic scalar expressions over (x, t).
//
// Normal form: N / D where N is a sparse polynomial over atoms (x, t,
// parameters, ln(.), atan(.), sampled functions) whose monomials may carry an
// exp(.) factor, and D is a product of monic univariate polynomials, one per
// atom. Coefficients are exact complex rationals. The form is canonical, so
// structural equality is mathematical equality within the represented class.

#include "ssqm/cq.hpp"
#include "ssqm/errors.hpp"

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ssqm {

using cld = std::complex<long double>;

enum class Var { X, T };

// A function of x known on a uniform grid together with derivatives 0..3.
struct SampleData {
    std::string label;
    double x0 = 0, h = 1;
    std::vector<double> f[4];

    size_t size() const { return f[0].size(); }
    double x_end() const { return x0 + h * double(size() - 1); }
    // derivative of given order; orders 0..2 use cubic Hermite with the
    // next derivative as slope, order 3 uses four-point Lagrange
    double eval(int order, double x) const;
};

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct Atom {
    enum Kind { X = 0, T = 1, Param = 2, Ln = 3, Atan = 4, Sample = 5 };
    Kind kind = X;
    std::string name;                          // Param
    NodePtr arg;                               // Ln, Atan
    std::shared_ptr<const SampleData> sample;  // Sample
    int order = 0;                             // Sample derivative order
};

int cmp(const Atom& a, const Atom& b);
struct AtomLess {
    bool operator()(const Atom& a, const Atom& b) const { return cmp(a, b) < 0; }
};

struct Mono {
    std::vector<std::pair<Atom, int>> pw;  // sorted by atom, positive powers
    NodePtr ex;                            // exp argument, null for none
};
int cmp(const Mono& a, const Mono& b);
struct MonoLess {
    bool operator()(const Mono& a, const Mono& b) const { return cmp(a, b) < 0; }
};

using Poly = std::map<Mono, CQ, MonoLess>;
using UPoly = std::vector<CQ>;  // coefficients, low degree first
using Den = std::map<Atom, UPoly, AtomLess>;

struct ExprNode {
    Poly num;
    Den den;
};

using Bindings = std::map<std::string, std::complex<double>>;

class Expr {
public:
    Expr();  // zero
    Expr(long v);
    Expr(int v) : Expr(long(v)) {}
    Expr(const CQ& c);
    explicit Expr(NodePtr n) : n_(std::move(n)) {}

    static Expr x();
    static Expr t();
    static Expr var(Var v) { return v == Var::X ? x() : t(); }
    static Expr I();
    static Expr param(const std::string& name);
    static Expr real(double v) { return Expr(CQ::from_double(v)); }
    static Expr frac(long n, long d) { return Expr(CQ::frac(n, d)); }
    static Expr sample(std::shared_ptr<const SampleData> s, int order = 0);

    const ExprNode& node() const { return *n_; }
    const NodePtr& ptr() const { return n_; }

    bool is_zero() const;
    bool is_constant() const;
    // value when is_constant()
    CQ constant_value() const;
    bool depends_on(Var v) const;
    bool has_samples() const;
    bool has_transcendental() const;  // exp, ln, atan
    std::vector<std::string> params() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    Expr& operator+=(const Expr& b) { return *this = *this + b; }
    Expr& operator-=(const Expr& b) { return *this = *this - b; }
    Expr& operator*=(const Expr& b) { return *this = *this * b; }

    // structural equality of normal forms
    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    std::string str() const;

private:
    NodePtr n_;
};

int cmp(const Expr& a, const Expr& b);
int cmp_node(const NodePtr& a, const NodePtr& b);

Expr pow(const Expr& e, int n);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr atan(const Expr& e);

// identity; present for the invariant normalize(normalize(e)) = normalize(e)
inline Expr normalize(const Expr& e) { return e; }

Expr differentiate(const Expr& e, Var v, int order = 1);

// replace every occurrence of a parameter by a constant
Expr substitute(const Expr& e, const std::string& name, const CQ& value);
Expr substitute(const Expr& e, const std::map<std::string, CQ>& values);
// replace the variable x (or t) by an expression
Expr substitute_var(const Expr& e, Var v, const Expr& value);

// numeric evaluation; bindings may hold "x", "t" and parameter names
std::complex<double> evaluate(const Expr& e, const Bindings& b);
cld evaluate_l(const Expr& e, const Bindings& b);
// exact evaluation at rational x, t; throws if e is not rational there
CQ evaluate_exact(const Expr& e, const CQ& x, const CQ& t);

// Precompiled form for repeated evaluation at many points.
class CompiledExpr {
public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);
    cld operator()(long double x, long double t, const Bindings* b = nullptr) const;

private:
    struct CAtom {
        Atom::Kind kind;
        std::string name;
        std::shared_ptr<CompiledExpr> arg;
        std::shared_ptr<const SampleData> sample;
        int order = 0;
    };
    struct CTerm {
        cld c;
        std::vector<std::pair<int, int>> pw;  // atom index, power
        int ex = -1;
    };
    struct CDen {
        int atom;
        std::vector<cld> coef;
    };
    std::vector<CAtom> atoms_;
    std::vector<std::shared_ptr<CompiledExpr>> exps_;
    std::vector<CTerm> terms_;
    std::vector<CDen> den_;
    int intern(const Atom& a);
};

// If e is a rational function of x alone (no other atoms, no exp), return
// (numerator, denominator) as univariate polynomials; denominator is monic.
std::optional<std::pair<UPoly, UPoly>> as_rational_in_x(const Expr& e);
Expr from_upoly(const UPoly& p, Var v);

// univariate polynomial helpers
namespace upoly {
void trim(UPoly& p);
int degree(const UPoly& p);
UPoly add(const UPoly& a, const UPoly& b);
UPoly mul(const UPoly& a, const UPoly& b);
UPoly deriv(const UPoly& a);
// a = q*b + r
void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r);
UPoly gcd(const UPoly& a, const UPoly& b);  // monic
UPoly monic(const UPoly& a);
CQ eval(const UPoly& p, const CQ& v);
std::vector<std::complex<double>> roots(const UPoly& p);
}  // namespace upoly

}  // namespace ssqm

#pragma once

// Determining equations for even and odd symmetries, rank-oracle counting,
// and explicit symmetry operators.

#include "ssqm/cliffop.hpp"
#include "ssqm/models.hpp"
#include "ssqm/numerics.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ssqm {

// ------------------------------------------------------------ even sector

enum class BoyerVerdict { Quadratic, InverseSquare, Generic };

struct BoyerInfo {
    BoyerVerdict verdict = BoyerVerdict::Generic;
    int count = 2;
    std::string tag;      // Lie algebra of the scalar equation
    CQ alpha;             // V = alpha x^2 / 2 + ... (Quadratic, InverseSquare)
    double pole = 0;      // InverseSquare
    CQ delta;             // coefficient of 1/(x - pole)^2
};

// V''' = 0 -> 6; V = q(x) + delta/(x-p)^2 with q quadratic centered at p and
// delta != 0 -> 4; otherwise 2
BoyerInfo boyer_classify(const Expr& V);

struct EvenClassification {
    BoyerInfo upper, lower;  // V1, V2
    int n1 = 0, n2 = 0, total = 0;
};
EvenClassification even_count(const Expr& W);

// left minus right side of the first-order equation on U with x-independent
// a0(t), b0(t), c0(t)
Expr boyer_residual(const Expr& V, const Expr& a0, const Expr& b0, const Expr& c0);

struct EvenSolution {
    Expr a0, b0, c0;  // functions of t
};
// exact time-separated solutions of the scalar determining equation
std::vector<EvenSolution> even_solutions(const Expr& V, int max_power = 4);
// reduced operator -a/2 Dx^2 + B Dx + C on one component; block +1 uses
// P+ (upper, potential V1), -1 uses P- (lower, V2), 0 returns the scalar form
CliffOp even_operator(const Expr& V, const EvenSolution& s, int block);

// ------------------------------------------------------------- odd sector

// W = W0 + a x + b with a, b from the polynomial part of a rational W;
// higher_degree marks a polynomial part of degree >= 2 (then a = b = 0).
// Empty for non-rational W.
struct LinearPart {
    CQ a, b;
    bool higher_degree = false;
};
std::optional<LinearPart> linear_part(const Expr& W);

enum OddFn { kAlpha1 = 0, kAlpha2, kBeta1, kBeta2, kGamma1, kGamma2 };

struct OddCoefficients {
    std::array<Expr, 6> f;  // alpha1, alpha2, beta1, beta2, gamma1, gamma2
    bool a_zero = true;
    std::array<CQ, 12> constants;
    std::array<std::string, 12> names;
};

std::array<std::string, 12> family_constant_names(bool a_zero);
// a = 0 family with constants A0..N0
OddCoefficients family_a0(const CQ& b, const std::array<CQ, 12>& c);
// a != 0 family with constants A,B,C,D,E,F,K,L,M,G,P,Q; `printed` keeps the
// two sign/factor defects of the printed version
OddCoefficients family_a(const CQ& a, const CQ& b, const std::array<CQ, 12>& c, bool printed = false);
OddCoefficients odd_family(const CQ& a, const CQ& b, const std::array<CQ, 12>& c, bool printed = false);
// single constant C != 0 of the a != 0 family
OddCoefficients odd_C_family(const CQ& a, const CQ& b, const CQ& C);

// the two third-order determining equations, left-hand sides as printed
std::pair<Expr, Expr> odd_residuals(const Expr& W, const OddCoefficients& oc);

// rank of the residual matrix over the 12 family constants (real and
// imaginary parts of both residuals at every grid point)
RankReport family_rank(const Expr& W, const CQ& a, const CQ& b, const Grid& g, bool printed = false);

struct OddSolution {
    std::array<Expr, 6> f;
};

struct OddCountOptions {
    int max_power = 3;
    double rel_threshold = 1e-6;
};

struct OddBlock {
    double omega = 0;
    RankReportC rank;
};

struct OddCountReport {
    int count = 0;
    long rows = 0, cols = 0;
    double threshold = 0;
    double gap = 0;  // minimum over blocks
    double smallest_kept = 0, largest_dropped = 0;
    std::vector<OddBlock> blocks;
    std::vector<OddSolution> basis;  // from the floating-point nullspaces
};

// Count of odd symmetries for W = W0 + a x + b: each of the six functions
// is expanded over t^k exp(i w t), k <= max_power, w in {0, +-a, +-2a, +-3a};
// time is separated exactly and the rank taken per frequency block.
OddCountReport odd_count(const Expr& W, double a, double b, const Grid& g, const OddCountOptions& opt = {});

// exact version for rational W and rational a; empty optional if W cannot be
// evaluated exactly
std::optional<std::vector<OddSolution>> odd_solutions_exact(const Expr& W, const CQ& a, const Grid& g,
                                                            int max_power = 3);

// reduced odd operator E12 Z+ + E21 Z- built from a solution
CliffOp odd_operator(const Expr& W, const OddSolution& s);

// ---------------------------------------------------- explicit operators

// Q1 = i s1 Dx - s2 W, Q2 = i s2 Dx + s1 W
std::pair<CliffOp, CliffOp> witten_pair(const Expr& W);

// the A(0) operator of the a = 0 family for W = b; `printed` keeps the x/4
// term of the printed version instead of x^2/4
CliffOp q1_A0(const CQ& b, const Expr& W, bool printed = false);

// the three time-independent conditions on W0 for the A(0) direction
std::array<Expr, 3> w0_conditions(const Expr& W0, const CQ& b);

// ------------------------------------------------------------ W0 ODEs

struct W0Solution {
    std::shared_ptr<const SampleData> data;
    Expr w0;  // opaque-sample expression
    double x0 = 0, x1 = 0;
};

// W0''' = 6 W0^2 W0' - 12 L^2 W0' + 12 L W0 W0' - 36 a L W0, L = a x + b,
// integrated with RK4 from (W0, W0', W0'') at x0 to x1
W0Solution integrate_w0(double a, double b, const std::array<double, 3>& init, double x0, double x1,
                        double h = 1e-3);
// a = 0 family W''' = 6 W^2 W' + kappa W' with W = W0 + b
W0Solution integrate_w0_a0(double b, double kappa, const std::array<double, 3>& init, double x0, double x1,
                           double h = 1e-3);

// scale init by s in [0, 1], bisecting s until the integration does not blow up
struct InitSearch {
    std::array<double, 3> init;
    double scale = 1;
    int iterations = 0;
    W0Solution solution;
};
InitSearch find_nonblowup_init(double a, double b, const std::array<double, 3>& init, double x0, double x1,
                               int max_iter = 40);

// max |residual| of the a != 0 ODE on the grid (x samples only)
double ode_residual_a(const Expr& W0, double a, double b, const Grid& g);
// least-squares kappa for the a = 0 family and the relative fit residual
std::pair<double, double> ode_fit_a0(const Expr& W0, double b, const Grid& g);

}  // namespace ssqm

#pragma once

// Operators built from a potential or superpotential (m = 1, hbar = 1).

#include "ssqm/cliffop.hpp"

#include <map>
#include <string>
#include <vector>

namespace ssqm {

struct Superpotential {
    Expr w;                    // function of x only
    std::vector<double> poles;  // real roots of the denominator
    std::map<std::string, double> params;
    std::string text;

    // checks that w is independent of t and computes poles
    static Superpotential from_expr(const Expr& w, std::string text = {},
                                    std::map<std::string, double> params = {});
};

struct ModelSet {
    Expr U, V1, V2;
    CliffOp H_b, H_f, H_SS;
    CliffOp Delta;     // scalar equation -i Dt - Dx^2/2 + U, sigma_0 only
    CliffOp Delta_SS;  // -i Dt s0 + H_SS
};

Expr potential_from_superpotential(const Expr& w);
// V1 = W^2/2 + W'/2, V2 = W^2/2 - W'/2
std::pair<Expr, Expr> superpartners(const Expr& w);
// -Dx^2/2 + V
CliffOp scalar_hamiltonian(const Expr& v, int mu = 0);
CliffOp hamiltonian_ss(const Expr& w);
ModelSet build_models(const Expr& w);
std::pair<CliffOp, CliffOp> projectors();

// real roots of the x-denominator of a rational expression
std::vector<double> real_poles(const Expr& e);

}  // namespace ssqm

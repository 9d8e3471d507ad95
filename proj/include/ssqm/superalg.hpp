#pragma once

// Graded bracket tables, closure detection and structure tags.

#include "ssqm/cliffop.hpp"
#include "ssqm/grid.hpp"

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace ssqm {

struct Sqm2Check {
    std::string identity;
    bool ok = false;
    double residual = 0;     // max on-grid coefficient of the difference
    std::string offending;   // first nonzero term of the difference
};

struct Sqm2Report {
    bool ok = false;
    bool exact = false;  // decided coefficient-wise rather than on the grid
    std::vector<Sqm2Check> checks;
};

// {Q1,Q1} = {Q2,Q2} = 4 H_SS, {Q1,Q2} = 0, [Q1,H_SS] = [Q2,H_SS] = 0
Sqm2Report verify_sqm2(const Expr& W, const Grid& g, double tol = 1e-8);

struct GradedOperatorSet {
    std::vector<CliffOp> even, odd;
    std::vector<std::string> even_labels, odd_labels;
    CliffOp hamiltonian;

    size_t size() const { return even.size() + odd.size(); }
    // element i: even ones first, then odd
    const CliffOp& at(size_t i) const { return i < even.size() ? even[i] : odd[i - even.size()]; }
    std::string label(size_t i) const;
    bool is_odd(size_t i) const { return i >= even.size(); }
};

struct BracketEntry {
    int i = 0, j = 0;
    bool anticommutator = false;
    std::vector<std::complex<double>> coeffs;  // expansion over the set
    double residual = 0;                       // relative least-squares residual
};

struct StructureTable {
    std::vector<std::string> labels;
    std::vector<bool> odd;
    std::vector<BracketEntry> entries;  // i <= j
    int n_even = 0, n_odd = 0;
    int dimension = 0;
    bool closed = false;
    double max_residual = 0;
    double jacobi_residual = 0;  // graded Jacobi identity on the extracted constants
    std::string tag;

    // c_ij^k for any ordered pair, using graded antisymmetry
    std::complex<double> coeff(int i, int j, int k) const;
};

// Expands every pairwise graded bracket over the set by least squares on
// grid-sampled coefficients. Throws NotSymmetric if a member is not a
// symmetry of s.hamiltonian, IllConditioned if the set is dependent.
StructureTable bracket_closure(const GradedOperatorSet& s, const Grid& g, double tol = 1e-8);

// superalgebra label from the symmetry counts (even, odd) and the dimension
std::string identify_structure(std::pair<int, int> counts, int dim);

struct ClosureResult {
    GradedOperatorSet set;
    StructureTable table;
    int even_symmetries = 0, odd_symmetries = 0;
    int accepted = 0, rejected = 0;  // candidates
    std::vector<int> history;        // size of the closed set after the seed and each acceptance
    int dimension = 0;
    std::string tag;
};

// Starting from {s0, s3, H_SS, Q1, Q2}, adds symmetries (odd first, by
// differential order, then even) whenever the iterated graded brackets stay
// inside the span of all symmetries of H_SS. Needs rational W with a
// rational linear part.
ClosureResult greedy_closure(const Expr& W, const Grid& g, double tol = 1e-8);

// span(small) inside span(big), both reduced with big.hamiltonian
bool span_contains(const GradedOperatorSet& big, const GradedOperatorSet& small, const Grid& g,
                   double tol = 1e-8);

}  // namespace ssqm

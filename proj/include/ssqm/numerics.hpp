#pragma once

#include "ssqm/cq.hpp"
#include "ssqm/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace ssqm {

template <class S>
struct RankReportT {
    long rows = 0, cols = 0;
    long rank = 0, nullity = 0;
    double threshold = 0;
    double smallest_kept = 0;    // 0 when rank = 0
    double largest_dropped = 0;  // 0 when nullity = 0
    double gap = 0;              // smallest_kept / largest_dropped, inf if either side empty
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> nullspace;  // cols x nullity, orthonormal
};
using RankReport = RankReportT<double>;
using RankReportC = RankReportT<std::complex<double>>;

// Rank by Householder QR with column pivoting. Pivots below
// rel_threshold * largest pivot count as zero. Throws RankUnstable when the
// gap between kept and dropped pivots is below min_gap, or when the rank
// changes under a tenfold change of the threshold.
RankReport numerical_rank(const Eigen::MatrixXd& M, double rel_threshold = 1e-6, double min_gap = 10.0);
RankReportC numerical_rank(const Eigen::MatrixXcd& M, double rel_threshold = 1e-6, double min_gap = 10.0);

// Scale columns to unit norm; columns below zero_rel * (largest column norm)
// are set to exactly zero.
Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& M, double zero_rel = 1e-12);
Eigen::MatrixXcd normalize_columns(const Eigen::MatrixXcd& M, double zero_rel = 1e-12);

// real embedding [Re -Im; Im Re] of a complex matrix; its rank is twice the
// complex rank
Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& M);

// Exact nullspace by reduced row echelon form: one basis vector per free
// column, with that column set to 1.
std::vector<std::vector<CQ>> exact_nullspace(std::vector<std::vector<CQ>> rows, size_t cols);
size_t exact_rank(std::vector<std::vector<CQ>> rows, size_t cols);

struct Trajectory {
    std::vector<double> xs;
    std::vector<std::vector<double>> ys;
    std::vector<std::vector<double>> dys;  // rhs at each node

    // cubic Hermite dense output of component k
    double eval(size_t k, double x) const;
};

using OdeRhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

// Classical fourth-order Runge-Kutta with fixed step h (> 0) from x0 to x1
// (either direction). Throws BlowUp if a component exceeds blowup_limit or
// becomes non-finite.
Trajectory rk4(const OdeRhs& rhs, std::vector<double> y0, double x0, double x1, double h,
               double blowup_limit = 1e6);

using Sampler = std::function<std::complex<long double>(long double x, long double t)>;
using RealFn = std::function<long double(long double)>;

// max over points of |i psi_t + psi_xx / 2 - V psi| with the 2-point centered
// stencil in t and the 5-point centered stencil in x
double fd_schrodinger_residual(const Sampler& psi, const RealFn& V,
                               const std::vector<std::pair<double, double>>& points, double h = 1e-3);

}  // namespace ssqm

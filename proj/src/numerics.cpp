#include "ssqm/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ssqm {

namespace {

long rank_at(const Eigen::VectorXd& piv, double thr) {
    long r = 0;
    while (r < piv.size() && piv(r) > thr) ++r;
    return r;
}

}  // namespace

template <class S>
static RankReportT<S> rank_impl(const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& M, double rel_threshold,
                                double min_gap) {
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    RankReportT<S> rep;
    rep.rows = M.rows();
    rep.cols = M.cols();
    if (!M.allFinite()) throw RankUnstable("matrix has non-finite entries");
    const long n = M.cols();
    if (n == 0) return rep;
    if (M.rows() == 0 || M.cwiseAbs().maxCoeff() == 0.0) {
        rep.nullity = n;
        rep.gap = std::numeric_limits<double>::infinity();
        rep.nullspace = Mat::Identity(n, n);
        return rep;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(M);
    const long k = std::min<long>(M.rows(), n);
    Eigen::VectorXd piv = Eigen::VectorXd::Zero(n);
    const Mat& R = qr.matrixQR();
    for (long i = 0; i < k; ++i) piv(i) = std::abs(R(i, i));
    // pivots are nonincreasing up to roundoff; enforce it for the count
    for (long i = 1; i < n; ++i) piv(i) = std::min(piv(i), piv(i - 1));
    const double top = piv(0);
    rep.threshold = rel_threshold * top;
    rep.rank = rank_at(piv, rep.threshold);
    rep.nullity = n - rep.rank;
    rep.smallest_kept = rep.rank > 0 ? piv(rep.rank - 1) : 0.0;
    rep.largest_dropped = rep.rank < n ? piv(rep.rank) : 0.0;
    if (rep.rank == 0 || rep.rank == n || rep.largest_dropped == 0.0)
        rep.gap = std::numeric_limits<double>::infinity();
    else
        rep.gap = rep.smallest_kept / rep.largest_dropped;
    if (rep.gap < min_gap)
        throw RankUnstable("rank gap " + std::to_string(rep.gap) + " below " + std::to_string(min_gap));
    if (rank_at(piv, 10 * rep.threshold) != rep.rank || rank_at(piv, 0.1 * rep.threshold) != rep.rank)
        throw RankUnstable("rank changes under a tenfold change of the threshold");

    // nullspace: M P = Q [R11 R12; 0 0]  =>  null = P [-R11^{-1} R12; I]
    const long r = rep.rank;
    Mat N = Mat::Zero(n, rep.nullity);
    if (rep.nullity > 0) {
        Mat Z(n, rep.nullity);
        if (r > 0) {
            Mat R11 = R.topLeftCorner(r, r).template triangularView<Eigen::Upper>();
            Mat R12 = R.block(0, r, r, n - r);
            Z.topRows(r) = -R11.template triangularView<Eigen::Upper>().solve(R12);
        }
        Z.bottomRows(n - r) = Mat::Identity(n - r, n - r);
        N = qr.colsPermutation() * Z;
        Eigen::HouseholderQR<Mat> oq(N);
        N = oq.householderQ() * Mat::Identity(n, rep.nullity);
    }
    rep.nullspace = N;
    return rep;
}

RankReport numerical_rank(const Eigen::MatrixXd& M, double rel_threshold, double min_gap) {
    return rank_impl<double>(M, rel_threshold, min_gap);
}

RankReportC numerical_rank(const Eigen::MatrixXcd& M, double rel_threshold, double min_gap) {
    return rank_impl<std::complex<double>>(M, rel_threshold, min_gap);
}

template <class Mat>
static Mat normalize_impl(const Mat& M, double zero_rel) {
    Mat out = M;
    if (M.cols() == 0) return out;
    Eigen::VectorXd nr = M.colwise().norm();
    double mx = nr.maxCoeff();
    for (long j = 0; j < M.cols(); ++j) {
        if (nr(j) <= zero_rel * mx || nr(j) == 0.0) out.col(j).setZero();
        else out.col(j) /= nr(j);
    }
    return out;
}

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& M, double zero_rel) { return normalize_impl(M, zero_rel); }
Eigen::MatrixXcd normalize_columns(const Eigen::MatrixXcd& M, double zero_rel) { return normalize_impl(M, zero_rel); }

static std::vector<long> rref(std::vector<std::vector<CQ>>& rows, size_t cols) {
    std::vector<long> pivcol;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows.size(); ++c) {
        size_t p = r;
        while (p < rows.size() && rows[p][c].is_zero()) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        CQ inv = rows[r][c].inv();
        for (size_t j = c; j < cols; ++j) rows[r][j] *= inv;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c].is_zero()) continue;
            CQ f = rows[i][c];
            for (size_t j = c; j < cols; ++j)
                if (!rows[r][j].is_zero()) rows[i][j] -= f * rows[r][j];
        }
        pivcol.push_back(long(c));
        ++r;
    }
    return pivcol;
}

std::vector<std::vector<CQ>> exact_nullspace(std::vector<std::vector<CQ>> rows, size_t cols) {
    std::vector<long> piv = rref(rows, cols);
    std::vector<bool> is_piv(cols, false);
    for (long c : piv) is_piv[c] = true;
    std::vector<std::vector<CQ>> basis;
    for (size_t f = 0; f < cols; ++f) {
        if (is_piv[f]) continue;
        std::vector<CQ> v(cols);
        v[f] = CQ(1);
        for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -rows[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

size_t exact_rank(std::vector<std::vector<CQ>> rows, size_t cols) { return rref(rows, cols).size(); }

Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& M) {
    const long r = M.rows(), c = M.cols();
    Eigen::MatrixXd E(2 * r, 2 * c);
    E.topLeftCorner(r, c) = M.real();
    E.topRightCorner(r, c) = -M.imag();
    E.bottomLeftCorner(r, c) = M.imag();
    E.bottomRightCorner(r, c) = M.real();
    return E;
}

double Trajectory::eval(size_t k, double x) const {
    const size_t n = xs.size();
    if (n == 0) throw DomainError("empty trajectory");
    if (n == 1) return ys[0][k];
    const bool up = xs.back() > xs.front();
    double lo = up ? xs.front() : xs.back(), hi = up ? xs.back() : xs.front();
    double tol = 1e-9 * std::max(1.0, hi - lo);
    if (x < lo - tol || x > hi + tol) throw DomainError("x outside trajectory range");
    double h = (xs.back() - xs.front()) / double(n - 1);
    double s = (x - xs.front()) / h;
    long i = std::clamp(long(std::floor(s)), 0L, long(n) - 2);
    double u = s - double(i);
    double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
    double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
    return h00 * ys[i][k] + h10 * h * dys[i][k] + h01 * ys[i + 1][k] + h11 * h * dys[i + 1][k];
}

Trajectory rk4(const OdeRhs& rhs, std::vector<double> y, double x0, double x1, double h, double blowup_limit) {
    if (!(h > 0)) throw DomainError("rk4 step must be positive");
    Trajectory tr;
    const double span = x1 - x0;
    long steps = std::max(1L, long(std::ceil(std::abs(span) / h - 1e-9)));
    const double dx = span / double(steps);
    auto add = [](const std::vector<double>& a, const std::vector<double>& b, double s) {
        std::vector<double> r(a.size());
        for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    auto check = [&](const std::vector<double>& v, double x) {
        for (double c : v)
            if (!std::isfinite(c) || std::abs(c) > blowup_limit)
                throw BlowUp("solution escaped at x = " + std::to_string(x), x);
    };
    double x = x0;
    check(y, x);
    std::vector<double> k1 = rhs(x, y);
    tr.xs.push_back(x);
    tr.ys.push_back(y);
    tr.dys.push_back(k1);
    for (long s = 0; s < steps; ++s) {
        auto k2 = rhs(x + dx / 2, add(y, k1, dx / 2));
        auto k3 = rhs(x + dx / 2, add(y, k2, dx / 2));
        auto k4 = rhs(x + dx, add(y, k3, dx));
        for (size_t i = 0; i < y.size(); ++i) y[i] += dx / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        x = x0 + dx * double(s + 1);
        check(y, x);
        k1 = rhs(x, y);
        tr.xs.push_back(x);
        tr.ys.push_back(y);
        tr.dys.push_back(k1);
    }
    return tr;
}

double fd_schrodinger_residual(const Sampler& psi, const RealFn& V,
                               const std::vector<std::pair<double, double>>& points, double h) {
    using cl = std::complex<long double>;
    const long double hh = h;
    double worst = 0;
    for (auto [x0, t0] : points) {
        long double x = x0, t = t0;
        cl f = psi(x, t);
        cl ft = (psi(x, t + hh) - psi(x, t - hh)) / (2 * hh);
        cl fxx = (-psi(x + 2 * hh, t) + 16.0L * psi(x + hh, t) - 30.0L * f + 16.0L * psi(x - hh, t) -
                  psi(x - 2 * hh, t)) /
                 (12 * hh * hh);
        cl r = cl(0, 1) * ft + 0.5L * fxx - V(x) * f;
        worst = std::max(worst, double(std::abs(r)));
    }
    return worst;
}

}  // namespace ssqm

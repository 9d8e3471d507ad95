#include "ssqm/superalg.hpp"

#include "ssqm/models.hpp"
#include "ssqm/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace ssqm {

namespace {

using cd = std::complex<double>;

// at most n evenly spread entries of v
std::vector<double> spread(const std::vector<double>& v, size_t n) {
    if (v.size() <= n) return v;
    std::vector<double> out;
    for (size_t i = 0; i < n; ++i) out.push_back(v[i * (v.size() - 1) / (n - 1)]);
    return out;
}

// coefficients of every (mu, j, k) slot sampled on a point set
class GridSampler {
public:
    explicit GridSampler(const Grid& g) {
        for (double x : spread(g.xs, 9))
            for (double t : spread(g.ts, 9)) pts_.push_back({x, t});
    }
    static constexpr int kSlots = 4 * (kMaxDt + 1) * (kMaxDx + 1);
    long length() const { return long(pts_.size()) * kSlots; }

    Eigen::VectorXcd operator()(const CliffOp& op) const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(length());
        for (const auto& [key, c] : op.terms()) {
            const int slot = (key[0] * (kMaxDt + 1) + key[1]) * (kMaxDx + 1) + key[2];
            CompiledExpr ce(c);
            for (size_t p = 0; p < pts_.size(); ++p)
                v(long(p) * kSlots + slot) = cd(ce(pts_[p].first, pts_[p].second));
        }
        return v;
    }

private:
    std::vector<std::pair<double, double>> pts_;
};

// least-squares expansion of vectors over the columns of a fixed matrix
class Span {
public:
    Span() = default;
    explicit Span(const Eigen::MatrixXcd& B) { reset(B); }
    void reset(const Eigen::MatrixXcd& B) {
        B_ = B;
        norms_ = B.colwise().norm();
        Eigen::MatrixXcd Bn = B;
        for (long j = 0; j < B.cols(); ++j)
            if (norms_(j) > 0) Bn.col(j) /= norms_(j);
        // columns are unit vectors, so the relative pivot floor is effectively absolute
        qr_.setThreshold(1e-10);
        qr_.compute(Bn);
        Bn_ = std::move(Bn);
    }
    long size() const { return B_.cols(); }
    long rank() const { return B_.cols() == 0 ? 0 : qr_.rank(); }
    const Eigen::MatrixXcd& matrix() const { return B_; }

    // coefficients and relative residual
    std::pair<Eigen::VectorXcd, double> expand(const Eigen::VectorXcd& v) const {
        const double nv = v.norm();
        if (B_.cols() == 0 || nv == 0) return {Eigen::VectorXcd::Zero(B_.cols()), nv == 0 ? 0.0 : 1.0};
        Eigen::VectorXcd c = qr_.solve(v);
        double res = (Bn_ * c - v).norm() / nv;
        for (long j = 0; j < c.size(); ++j) c(j) = norms_(j) > 0 ? c(j) / norms_(j) : cd(0);
        return {c, res};
    }
    bool contains(const Eigen::VectorXcd& v, double tol) const { return expand(v).second < tol; }

private:
    Eigen::MatrixXcd B_, Bn_;
    Eigen::VectorXd norms_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
};

Eigen::MatrixXcd columns(const std::vector<Eigen::VectorXcd>& vs, long len) {
    Eigen::MatrixXcd M(len, long(vs.size()));
    for (size_t j = 0; j < vs.size(); ++j) M.col(long(j)) = vs[j];
    return M;
}

std::string first_term(const CliffOp& op) {
    if (op.is_zero()) return {};
    std::string s = op.str();
    size_t cut = s.find(" + ");
    return cut == std::string::npos ? s : s.substr(0, cut);
}

}  // namespace

// ------------------------------------------------------------ sqm(2)

Sqm2Report verify_sqm2(const Expr& W, const Grid& g, double tol) {
    auto [q1, q2] = witten_pair(W);
    const CliffOp H = hamiltonian_ss(W);
    Sqm2Report rep;
    rep.exact = !W.has_samples();
    const CliffOp four_h = Expr(4) * H;
    const std::vector<std::pair<std::string, CliffOp>> diffs = {
        {"{Q1,Q1} = 4 H_SS", anticommutator(q1, q1) - four_h},
        {"{Q2,Q2} = 4 H_SS", anticommutator(q2, q2) - four_h},
        {"{Q1,Q2} = 0", anticommutator(q1, q2)},
        {"[Q1,H_SS] = 0", commutator(q1, H)},
        {"[Q2,H_SS] = 0", commutator(q2, H)},
    };
    rep.ok = true;
    for (const auto& [name, d] : diffs) {
        Sqm2Check c;
        c.identity = name;
        c.residual = max_abs_on_grid(d, g);
        c.ok = rep.exact ? d.is_zero() : c.residual < tol;
        if (!c.ok) c.offending = first_term(d);
        rep.ok = rep.ok && c.ok;
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

// ------------------------------------------------------------ structure table

std::string GradedOperatorSet::label(size_t i) const {
    const auto& labels = i < even.size() ? even_labels : odd_labels;
    const size_t k = i < even.size() ? i : i - even.size();
    if (k < labels.size()) return labels[k];
    return (i < even.size() ? "E" : "O") + std::to_string(k + 1);
}

std::complex<double> StructureTable::coeff(int i, int j, int k) const {
    const int n = dimension;
    if (i > j) {
        const double sign = (odd[size_t(i)] && odd[size_t(j)]) ? 1.0 : -1.0;
        return sign * coeff(j, i, k);
    }
    // entries are stored row by row over i <= j
    const int idx = i * n - i * (i - 1) / 2 + (j - i);
    return entries[size_t(idx)].coeffs[size_t(k)];
}

StructureTable bracket_closure(const GradedOperatorSet& s, const Grid& g, double tol) {
    const size_t n = s.size();
    StructureTable tab;
    tab.n_even = int(s.even.size());
    tab.n_odd = int(s.odd.size());
    tab.dimension = int(n);
    std::vector<CliffOp> red;
    for (size_t i = 0; i < n; ++i) {
        tab.labels.push_back(s.label(i));
        tab.odd.push_back(s.is_odd(i));
        const CliffOp& op = s.at(i);
        if (!is_zero_operator(schrodinger_derivative(op, s.hamiltonian), g, 1e-8))
            throw NotSymmetric("set member " + s.label(i) + " is not a symmetry");
        red.push_back(canonical_reduce(op, s.hamiltonian));
    }
    GridSampler sample(g);
    std::vector<Eigen::VectorXcd> vs;
    for (const auto& r : red) vs.push_back(sample(r));
    Span span(columns(vs, sample.length()));
    if (span.rank() < long(n)) throw IllConditioned("operator set is linearly dependent on the grid");

    tab.closed = true;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            BracketEntry e;
            e.i = int(i);
            e.j = int(j);
            e.anticommutator = tab.odd[i] && tab.odd[j];
            CliffOp br = canonical_reduce(graded_bracket(red[i], red[j]), s.hamiltonian);
            auto [c, res] = span.expand(sample(br));
            e.coeffs.assign(c.data(), c.data() + c.size());
            e.residual = res;
            tab.max_residual = std::max(tab.max_residual, res);
            if (!(res < tol)) tab.closed = false;
            tab.entries.push_back(std::move(e));
        }

    // graded Jacobi:
    // [X_i,[X_j,X_k]] = [[X_i,X_j],X_k] + (-1)^{|i||j|} [X_j,[X_i,X_k]]
    double scale = 0;
    for (const auto& e : tab.entries)
        for (const auto& c : e.coeffs) scale = std::max(scale, std::abs(c));
    const int N = int(n);
    double worst = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const double sij = (tab.odd[size_t(i)] && tab.odd[size_t(j)]) ? -1.0 : 1.0;
                for (int m = 0; m < N; ++m) {
                    cd lhs = 0, rhs = 0;
                    for (int l = 0; l < N; ++l) {
                        lhs += tab.coeff(j, k, l) * tab.coeff(i, l, m);
                        rhs += tab.coeff(i, j, l) * tab.coeff(l, k, m) + sij * tab.coeff(i, k, l) * tab.coeff(j, l, m);
                    }
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
    tab.jacobi_residual = scale > 0 ? worst / (scale * scale) : 0;
    tab.tag = identify_structure({-1, -1}, tab.dimension);
    return tab;
}

std::string identify_structure(std::pair<int, int> counts, int dim) {
    if (dim == 13 && (counts.first < 0 || (counts.first == 12 && counts.second == 12))) return "osp(2/2)⊞sh(2/2)";
    if (dim == 7 && (counts.first < 0 || (counts.first == 10 && counts.second == 10)))
        return "[osp(2/1)⊞so(2)]⊕gl(1)";
    if (dim == 5) return "[sqm(2)⊞so(2)]⊕gl(1)";
    return "unknown";
}

// ------------------------------------------------------------ greedy closure

namespace {

struct Candidate {
    CliffOp op;
    bool odd;
    int order;
    std::string label;
};

struct Closure {
    std::vector<CliffOp> ops;
    std::vector<Eigen::VectorXcd> vecs;
    Span span;
};

// adds the given operators and all iterated brackets; false if something
// leaves the span of all symmetries or overflows the derivative order
bool close_over(Closure& cl, std::vector<CliffOp> queue, const CliffOp& H, const GridSampler& sample, const Span& all,
                double tol) {
    while (!queue.empty()) {
        CliffOp op = canonical_reduce(queue.back(), H);
        queue.pop_back();
        Eigen::VectorXcd v = sample(op);
        if (v.norm() == 0) continue;
        if (cl.span.size() > 0 && cl.span.contains(v, tol)) continue;
        if (!all.contains(v, tol)) return false;
        cl.ops.push_back(op);
        cl.vecs.push_back(v);
        cl.span.reset(columns(cl.vecs, sample.length()));
        try {
            for (const auto& e : cl.ops) queue.push_back(graded_bracket(op, e));
        } catch (const OrderOverflow&) {
            return false;
        }
    }
    return true;
}

}  // namespace

ClosureResult greedy_closure(const Expr& W, const Grid& g, double tol) {
    auto lp = linear_part(W);
    if (!lp) throw DomainError("closure needs a rational superpotential");
    const CQ a = lp->higher_degree ? CQ(0) : lp->a;
    const CliffOp H = hamiltonian_ss(W);
    auto [v1, v2] = superpartners(W);

    std::vector<Candidate> cands;
    const auto odd = odd_solutions_exact(W, a, g);
    if (!odd) throw DomainError("closure needs exact odd solutions");
    // odd candidates split into their E12 and E21 parts, the eigenvectors
    // of [s3, .], so that the result does not depend on the nullspace basis
    const CliffOp e12 = Expr::frac(1, 2) * (CliffOp::sigma(1) + Expr::I() * CliffOp::sigma(2));
    const CliffOp e21 = Expr::frac(1, 2) * (CliffOp::sigma(1) - Expr::I() * CliffOp::sigma(2));
    for (const auto& s : *odd) {
        const CliffOp op = odd_operator(W, s);
        for (int sign : {1, -1}) {
            CliffOp part;
            for (int k = 0; k <= kMaxDx; ++k) {
                Expr z = op.coeff(1, 0, k) - Expr(sign) * Expr::I() * op.coeff(2, 0, k);
                if (!z.is_zero()) part += z * ((sign > 0 ? e12 : e21) * CliffOp::dx(k));
            }
            if (!part.is_zero()) cands.push_back({part, true, part.max_dx(), sign > 0 ? "odd+" : "odd-"});
        }
    }
    int ne = 0;
    for (int block : {1, -1})
        for (const auto& s : even_solutions(block > 0 ? v1 : v2)) {
            CliffOp op = even_operator(block > 0 ? v1 : v2, s, block);
            cands.push_back({op, false, op.max_dx(), block > 0 ? "even+" : "even-"});
            ++ne;
        }
    ClosureResult res;
    res.even_symmetries = ne;
    res.odd_symmetries = int(odd->size());
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        if (x.odd != y.odd) return x.odd;
        return x.order < y.order;
    });

    GridSampler sample(g);
    std::vector<Eigen::VectorXcd> allv;
    for (const auto& c : cands) allv.push_back(sample(canonical_reduce(c.op, H)));
    const Span all(columns(allv, sample.length()));

    auto [q1, q2] = witten_pair(W);
    Closure cl;
    if (!close_over(cl, {CliffOp::sigma(0), CliffOp::sigma(3), H, q1, q2}, H, sample, all, tol))
        throw IllConditioned("the sqm(2) seed does not close inside the symmetry span");
    res.history.push_back(int(cl.ops.size()));
    for (const auto& c : cands) {
        Eigen::VectorXcd v = sample(canonical_reduce(c.op, H));
        if (cl.span.contains(v, tol)) continue;
        Closure trial = cl;
        if (close_over(trial, {c.op}, H, sample, all, tol)) {
            cl = std::move(trial);
            ++res.accepted;
            res.history.push_back(int(cl.ops.size()));
        } else {
            ++res.rejected;
        }
    }

    res.set.hamiltonian = H;
    int ie = 0, io = 0;
    for (const auto& op : cl.ops) {
        const Parity p = op.parity();
        if (p == Parity::Odd) {
            res.set.odd.push_back(op);
            res.set.odd_labels.push_back("O" + std::to_string(++io));
        } else if (p == Parity::Even) {
            res.set.even.push_back(op);
            res.set.even_labels.push_back("E" + std::to_string(++ie));
        } else {
            throw IllConditioned("closure produced an operator of mixed parity");
        }
    }
    res.table = bracket_closure(res.set, g, tol);
    res.dimension = int(Span(columns(cl.vecs, sample.length())).rank());
    res.tag = identify_structure({res.even_symmetries, res.odd_symmetries}, res.dimension);
    res.table.tag = res.tag;
    return res;
}

bool span_contains(const GradedOperatorSet& big, const GradedOperatorSet& small, const Grid& g, double tol) {
    GridSampler sample(g);
    std::vector<Eigen::VectorXcd> vs;
    for (size_t i = 0; i < big.size(); ++i) vs.push_back(sample(canonical_reduce(big.at(i), big.hamiltonian)));
    Span span(columns(vs, sample.length()));
    for (size_t i = 0; i < small.size(); ++i)
        if (!span.contains(sample(canonical_reduce(small.at(i), big.hamiltonian)), tol)) return false;
    return true;
}

}  // namespace ssqm

#ifndef DUALVOL_LP_HPP
#define DUALVOL_LP_HPP

// Dense two-phase tableau simplex. The problems solved here are tiny (a handful
// of rows, at most a few hundred columns), so there is no sparse machinery and
// no presolve. Pivot order is fully deterministic.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dualvol/errors.hpp"

namespace dualvol::lp {

enum class Status { Optimal, Infeasible, Unbounded };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    }
    return "?";
}

/// maximize c'x subject to A x = b, x_j >= 0 unless free[j].
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<bool> free; // empty means every variable is nonnegative
};

struct LpSolution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    Eigen::VectorXd x;
    double residual = 0.0; // relative primal residual ||Ax-b|| / (1 + ||b||)
    int pivots = 0;
};

struct SolverOptions {
    double pivot_tol = 1e-11;
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-11;
    int stall_threshold = 30; // consecutive degenerate pivots before Bland's rule
    int max_pivots = 0;       // 0 means 50*(m+n)
};

namespace detail {

class Tableau {
public:
    Tableau(int rows, int cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double& at(int r, int c) { return data_[r * (cols_ + 1) + c]; }
    double at(int r, int c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(int r) { return at(r, cols_); }
    double rhs(int r) const { return at(r, cols_); }
    // Objective row stores z_j - c_j; its rhs slot holds the objective value.
    double& obj(int c) { return at(rows_, c); }
    double obj(int c) const { return at(rows_, c); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void pivot(int pr, int pc) {
        const int w = cols_ + 1;
        double* prow = &data_[pr * w];
        const double inv = 1.0 / prow[pc];
        for (int c = 0; c < w; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        for (int r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            double* row = &data_[r * w];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (int c = 0; c < w; ++c) row[c] -= f * prow[c];
            row[pc] = 0.0;
        }
    }

private:
    int rows_;
    int cols_;
    std::vector<double> data_;
};

struct SimplexState {
    Tableau tab;
    std::vector<int> basis;
    int pivots = 0;
    int max_pivots = 0;
};

// Runs simplex iterations on the current objective row over columns [0, active_cols).
// Returns false when unbounded.
inline bool iterate(SimplexState& s, int active_cols, const SolverOptions& opt) {
    Tableau& t = s.tab;
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
        int enter = -1;
        double best = -opt.optimality_tol;
        for (int c = 0; c < active_cols; ++c) {
            const double rc = t.obj(c);
            if (bland) {
                if (rc < -opt.optimality_tol) { enter = c; break; }
            } else if (rc < best) {
                best = rc;
                enter = c;
            }
        }
        if (enter < 0) return true;

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, enter);
            if (a <= opt.pivot_tol) continue;
            const double ratio = std::max(0.0, t.rhs(r)) / a;
            if (ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 && leave >= 0 && s.basis[r] < s.basis[leave])) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave < 0) return false;

        if (++s.pivots > s.max_pivots)
            fail(ErrorKind::IterationLimit,
                 "simplex exceeded " + std::to_string(s.max_pivots) + " pivots");
        degenerate_run = (best_ratio == 0.0) ? degenerate_run + 1 : 0;
        if (degenerate_run > opt.stall_threshold) bland = true;
        t.pivot(leave, enter);
        s.basis[leave] = enter;
    }
}

inline void load_objective(SimplexState& s, std::span<const double> cost) {
    Tableau& t = s.tab;
    for (int c = 0; c <= t.cols(); ++c) t.obj(c) = 0.0;
    for (int c = 0; c < static_cast<int>(cost.size()); ++c) t.obj(c) = -cost[c];
    for (int r = 0; r < t.rows(); ++r) {
        const int bc = s.basis[r];
        const double cb = bc < static_cast<int>(cost.size()) ? cost[bc] : 0.0;
        if (cb == 0.0) continue;
        for (int c = 0; c <= t.cols(); ++c) t.obj(c) += cb * t.at(r, c);
    }
}

} // namespace detail

/// Two-phase simplex with Dantzig pricing, switching to Bland's rule once the
/// run of degenerate pivots exceeds the stall threshold. Ratio-test ties go to
/// the lowest basic-variable index.
inline LpSolution solve(const LpProblem& prob, const SolverOptions& opt = {}) {
    const int m = static_cast<int>(prob.A.rows());
    const int n_orig = static_cast<int>(prob.A.cols());
    if (prob.objective.size() != n_orig || prob.b.size() != m ||
        (!prob.free.empty() && static_cast<int>(prob.free.size()) != n_orig))
        fail(ErrorKind::MalformedBody, "LP dimensions are inconsistent");
    for (int r = 0; r < m; ++r)
        if (!std::isfinite(prob.b[r])) fail(ErrorKind::MalformedBody, "LP rhs is not finite");

    // Split free variables into positive and negative parts.
    std::vector<int> neg_part(n_orig, -1);
    int n = n_orig;
    for (int j = 0; j < n_orig; ++j)
        if (!prob.free.empty() && prob.free[j]) neg_part[j] = n++;

    // Rows with an existing unit column (and nonnegative rhs) start with it basic.
    std::vector<int> basis(m, -1);
    std::vector<double> sign(m, 1.0);
    for (int r = 0; r < m; ++r)
        if (prob.b[r] < 0) sign[r] = -1.0;
    for (int j = 0; j < n_orig; ++j) {
        if (neg_part[j] >= 0) continue;
        int hit = -1;
        bool unit = true;
        for (int r = 0; r < m && unit; ++r) {
            const double a = prob.A(r, j) * sign[r];
            if (a == 0.0) continue;
            if (a == 1.0 && hit < 0) hit = r;
            else unit = false;
        }
        if (unit && hit >= 0 && basis[hit] < 0) basis[hit] = j;
    }
    int n_art = 0;
    for (int r = 0; r < m; ++r)
        if (basis[r] < 0) basis[r] = n + n_art++;
    const int total = n + n_art;

    detail::SimplexState s{detail::Tableau(m, total), basis, 0,
                           opt.max_pivots > 0 ? opt.max_pivots : 50 * (m + n_orig)};
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < n_orig; ++j) {
            const double a = prob.A(r, j) * sign[r];
            s.tab.at(r, j) = a;
            if (neg_part[j] >= 0) s.tab.at(r, neg_part[j]) = -a;
        }
        if (s.basis[r] >= n) s.tab.at(r, s.basis[r]) = 1.0;
        s.tab.rhs(r) = prob.b[r] * sign[r];
    }

    LpSolution sol;
    if (n_art > 0) {
        std::vector<double> phase1(total, 0.0);
        for (int j = n; j < total; ++j) phase1[j] = -1.0;
        detail::load_objective(s, phase1);
        if (s.tab.obj(total) < -opt.feasibility_tol) detail::iterate(s, total, opt);
        const double infeas = -s.tab.obj(total);
        const double scale = 1.0 + prob.b.cwiseAbs().maxCoeff();
        if (infeas > opt.feasibility_tol * scale) {
            sol.status = Status::Infeasible;
            sol.pivots = s.pivots;
            return sol;
        }
        // Drive remaining (zero-level) artificials out of the basis.
        for (int r = 0; r < m; ++r) {
            if (s.basis[r] < n) continue;
            int best_c = -1;
            double best_a = opt.pivot_tol;
            for (int c = 0; c < n; ++c) {
                const double a = std::abs(s.tab.at(r, c));
                if (a > best_a) { best_a = a; best_c = c; }
            }
            if (best_c >= 0) {
                s.tab.pivot(r, best_c);
                s.basis[r] = best_c;
                ++s.pivots;
            }
            // Otherwise the row is redundant; its artificial stays basic at zero
            // and is never allowed to re-enter below.
        }
    }

    std::vector<double> cost(total, 0.0);
    for (int j = 0; j < n_orig; ++j) {
        cost[j] = prob.objective[j];
        if (neg_part[j] >= 0) cost[neg_part[j]] = -prob.objective[j];
    }
    detail::load_objective(s, cost);
    if (!detail::iterate(s, n, opt)) {
        sol.status = Status::Unbounded;
        sol.pivots = s.pivots;
        return sol;
    }

    Eigen::VectorXd xs = Eigen::VectorXd::Zero(total);
    for (int r = 0; r < m; ++r) xs[s.basis[r]] = s.tab.rhs(r);
    sol.x.resize(n_orig);
    for (int j = 0; j < n_orig; ++j) sol.x[j] = xs[j] - (neg_part[j] >= 0 ? xs[neg_part[j]] : 0.0);
    sol.status = Status::Optimal;
    sol.objective = prob.objective.dot(sol.x);
    sol.residual = (prob.A * sol.x - prob.b).norm() / (1.0 + prob.b.norm());
    sol.pivots = s.pivots;
    return sol;
}

/// One generator set of a polytope: columns are points. A symmetric leaf
/// stands for conv(±points); otherwise for conv(points).
struct PointLeaf {
    const Eigen::MatrixXd* points = nullptr;
    bool symmetric = true;
};

/// Largest t with t*u in L_1 + ... + L_k (Minkowski sum of the leaves).
/// Each leaf contributes its own convex-combination block, so the LP grows
/// additively in the leaf sizes rather than multiplicatively.
inline double radial_leaves(std::span<const PointLeaf> leaves, const Eigen::VectorXd& u,
                            const SolverOptions& opt = {}) {
    const int n = static_cast<int>(u.size());
    const int L = static_cast<int>(leaves.size());
    int cols = 1;
    for (const auto& leaf : leaves) cols += static_cast<int>(leaf.points->cols()) * (leaf.symmetric ? 2 : 1);
    cols += L; // slack per leaf row

    LpProblem prob;
    prob.objective = Eigen::VectorXd::Zero(cols);
    prob.objective[0] = 1.0;
    prob.A = Eigen::MatrixXd::Zero(n + L, cols);
    prob.b = Eigen::VectorXd::Zero(n + L);
    prob.A.block(0, 0, n, 1) = u;
    int c = 1;
    for (int l = 0; l < L; ++l) {
        const Eigen::MatrixXd& P = *leaves[l].points;
        if (P.rows() != n) fail(ErrorKind::MalformedBody, "leaf dimension mismatch");
        for (int j = 0; j < P.cols(); ++j) {
            prob.A.block(0, c, n, 1) = -P.col(j);
            prob.A(n + l, c) = 1.0;
            ++c;
            if (leaves[l].symmetric) {
                prob.A.block(0, c, n, 1) = P.col(j);
                prob.A(n + l, c) = 1.0;
                ++c;
            }
        }
    }
    for (int l = 0; l < L; ++l) {
        prob.A(n + l, c++) = 1.0;
        prob.b[n + l] = 1.0;
    }
    const LpSolution sol = solve(prob, opt);
    if (sol.status != Status::Optimal)
        fail(ErrorKind::MalformedBody,
             std::string("radial LP did not reach optimum: ") + to_string(sol.status));
    return sol.objective;
}

/// max t s.t. t*u in conv(±points).
inline double radial_vpolytope(const Eigen::MatrixXd& points, const Eigen::VectorXd& u,
                               bool symmetric = true) {
    const PointLeaf leaf{&points, symmetric};
    return radial_leaves(std::span<const PointLeaf>(&leaf, 1), u);
}

} // namespace dualvol::lp

#endif

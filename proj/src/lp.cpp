#include "cavc/lp.hpp"

#include <cmath>
#include <vector>

#include "cavc/errors.hpp"

namespace cavc {

namespace {

constexpr double kReducedCostTol = 1e-10;
constexpr double kPivotTol = 1e-11;

struct Tableau {
    Eigen::MatrixXd t;        // (m+1) x (n_total+1); last row objective, last col rhs
    std::vector<int> basis;   // basic variable per row
    int m;
    int n_total;

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int i = 0; i <= m; ++i) {
            if (i == row) continue;
            const double factor = t(i, col);
            if (std::abs(factor) > 0.0) t.row(i) -= factor * t.row(row);
        }
        basis[static_cast<std::size_t>(row)] = col;
    }

    // Bland's rule: smallest-index eligible entering column.
    int entering(int limit, const std::vector<bool>& banned) const {
        for (int j = 0; j < limit; ++j) {
            if (!banned[static_cast<std::size_t>(j)] && t(m, j) < -kReducedCostTol) return j;
        }
        return -1;
    }

    // Ratio test with smallest basic-index tie break.
    int leaving(int col) const {
        int row = -1;
        double best = 0.0;
        for (int i = 0; i < m; ++i) {
            const double a = t(i, col);
            if (a <= kPivotTol) continue;
            const double ratio = t(i, n_total) / a;
            if (row == -1 || ratio < best - 1e-15 ||
                (std::abs(ratio - best) <= 1e-15 &&
                 basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(row)])) {
                row = i;
                best = ratio;
            }
        }
        return row;
    }
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  int max_iterations) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != m || c.size() != n) throw ModelError("solve_lp: dimension mismatch");

    Tableau tab;
    tab.m = m;
    tab.n_total = n + m;  // artificials appended
    tab.t = Eigen::MatrixXd::Zero(m + 1, tab.n_total + 1);
    tab.basis.resize(static_cast<std::size_t>(m));

    for (int i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        tab.t.block(i, 0, 1, n) = sign * a.row(i);
        tab.t(i, n + i) = 1.0;
        tab.t(i, tab.n_total) = sign * b(i);
        tab.basis[static_cast<std::size_t>(i)] = n + i;
    }

    LpResult result;
    std::vector<bool> banned(static_cast<std::size_t>(tab.n_total), false);
    for (int j = n; j < tab.n_total; ++j) banned[static_cast<std::size_t>(j)] = true;

    // Phase 1: minimize the sum of artificials. With the artificial basis the
    // reduced-cost row is the negated column sums of the constraint rows.
    for (int j = 0; j < n; ++j) tab.t(m, j) = -tab.t.block(0, j, m, 1).sum();
    tab.t(m, tab.n_total) = -tab.t.block(0, tab.n_total, m, 1).sum();

    while (true) {
        if (result.iterations >= max_iterations) return result;
        const int col = tab.entering(n, banned);
        if (col == -1) break;
        const int row = tab.leaving(col);
        if (row == -1) break;  // phase-1 objective bounded below by 0; treat as done
        tab.pivot(row, col);
        ++result.iterations;
    }

    const double phase1 = -tab.t(m, tab.n_total);
    if (phase1 > 1e-7) {
        result.status = LpStatus::Infeasible;
        return result;
    }

    // Drive basic artificials out where possible; leftover ones sit at zero
    // in redundant rows and stay banned from entering.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[static_cast<std::size_t>(i)] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tab.t(i, j)) > 1e-9) {
                col = j;
                break;
            }
        }
        if (col != -1) tab.pivot(i, col);
    }

    // Phase 2 objective row.
    tab.t.row(m).setZero();
    tab.t.block(m, 0, 1, n) = c.transpose();
    for (int i = 0; i < m; ++i) {
        const int jb = tab.basis[static_cast<std::size_t>(i)];
        const double cb = jb < n ? c(jb) : 0.0;
        if (cb != 0.0) tab.t.row(m) -= cb * tab.t.row(i);
    }

    while (true) {
        if (result.iterations >= max_iterations) return result;
        const int col = tab.entering(n, banned);
        if (col == -1) break;
        const int row = tab.leaving(col);
        if (row == -1) {
            result.status = LpStatus::Unbounded;
            return result;
        }
        tab.pivot(row, col);
        ++result.iterations;
    }

    result.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
        const int jb = tab.basis[static_cast<std::size_t>(i)];
        if (jb < n) result.x(jb) = std::max(0.0, tab.t(i, tab.n_total));
    }
    result.objective = c.dot(result.x);
    result.status = LpStatus::Optimal;
    return result;
}

}  // namespace cavc

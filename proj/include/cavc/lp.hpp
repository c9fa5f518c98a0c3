#pragma once

#include <Eigen/Core>

namespace cavc {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    double objective = 0.0;
    Eigen::VectorXd x;
    int iterations = 0;
};

// Minimize c'x subject to A x = b, x >= 0.
// Dense two-phase simplex with Bland's rule; intended for the small, well
// scaled programs this project produces (tens of variables).
LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  int max_iterations = 200000);

}  // namespace cavc

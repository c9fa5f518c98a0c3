#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "cavc/channel.hpp"
#include "cavc/extended_real.hpp"
#include "cavc/symmetry.hpp"
#include "cavc/task.hpp"

namespace cavc {

struct FwOptions {
    double gap_tol = 1e-8;
    int max_iterations = 10000;
};

struct OuterOptions {
    double cut_tol = 1e-6;        // stop when LP upper bound - incumbent <= cut_tol
    int max_cuts = 200;
    double warm_grid_res = 0.02;  // input-simplex warm start, |X| <= max_x_for_grid
    int max_x_for_grid = 4;
    double boundary_clip = 1e-6;  // evaluation points pulled this far inside the simplex
    double tol = 1e-9;            // shared with hull_separation
};

// Minimizer of I(p, sum_j lambda_j A_j) over the weight simplex, via
// pairwise Frank-Wolfe with a derivative-bisection line search.
struct MatrixHullMin {
    double value = 0.0;
    Eigen::VectorXd lambda;
    double gap = 0.0;
    int iterations = 0;
};
MatrixHullMin min_mi_over_matrix_hull(const Eigen::Ref<const Eigen::VectorXd>& p,
                                      const std::vector<Eigen::MatrixXd>& vertices,
                                      const FwOptions& opts = {});

struct HullMin {
    double value = 0.0;
    Eigen::VectorXd q;  // family-local mixture weights
    double gap = 0.0;
    int iterations = 0;
};
HullMin min_mi_over_hull(const Eigen::Ref<const Eigen::VectorXd>& p, const CavcModel& model,
                         int family, const FwOptions& opts = {});

struct IntersectionMin {
    ExtendedReal value;  // +inf marker when the hulls do not intersect
    Eigen::VectorXd q1, q2;
    double gap = 0.0;
    int iterations = 0;
};
// Minimize I(p, W_{q1}) subject to |W_{q1} - W_{q2}|_inf <= tol over the two
// family simplices (fully corrective Frank-Wolfe with an LP oracle).
IntersectionMin min_mi_over_intersection(const Eigen::Ref<const Eigen::VectorXd>& p,
                                         const CavcModel& model, double tol = 1e-9,
                                         const FwOptions& opts = {});

struct SolverTrace {
    int outer_iterations = 0;
    int inner_iterations = 0;
    double final_gap = 0.0;       // cutting-plane upper bound minus incumbent
    double grid_best = 0.0;       // warm-start grid incumbent (when computed)
    bool grid_certified = false;  // value within 1e-3 of the warm-start grid best
};

struct CapacityResult {
    ExtendedReal value;
    Eigen::VectorXd optimal_input;
    Eigen::VectorXd worst_q1, worst_q2;  // family-local minimizing mixtures
    SolverTrace trace;
};

CapacityResult capacity_com(const CavcModel& model, const OuterOptions& opts = {});
CapacityResult capacity_and(const CavcModel& model, const OuterOptions& opts = {});
CapacityResult capacity_or(const CavcModel& model, const OuterOptions& opts = {});

// Exhaustive max-min over input and mixture simplex grids, with bounds
// inflated by the discretization modulus. Independent of the solvers above
// except for the and-task zero rule, which reuses hull_separation.
struct GridBracket {
    ExtendedReal lower, upper;
    ExtendedReal grid_value;  // raw grid max-min
};
GridBracket capacity_grid_oracle(const CavcModel& model, Task task, double input_res,
                                 double mixture_res, std::uint64_t max_points = 100'000'000ULL);

}  // namespace cavc

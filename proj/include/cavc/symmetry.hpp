#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "cavc/channel.hpp"

namespace cavc {

// Witness produced by a symmetrizability feasibility solve. For cis kinds,
// u holds the row-stochastic U(s|x) over the family; trans additionally
// carries V(s|x) over family two. The residual is the max-norm violation of
// the defining equations at the witness.
struct SymmetryWitness {
    enum class Kind { Cis1, Cis2, Trans };
    Kind kind = Kind::Cis1;
    Eigen::MatrixXd u;  // |X| x |S_k| (cis) or |X| x |S_1| (trans)
    Eigen::MatrixXd v;  // |X| x |S_2|, trans only
    double residual = 0.0;
    int lp_iterations = 0;

    bool feasible(double tol) const { return residual <= tol; }
};

struct SeparationReport {
    double distance = 0.0;       // min over (q1,q2) of max-norm channel difference
    Eigen::VectorXd witness_q1;  // family-local weights achieving the distance
    Eigen::VectorXd witness_q2;
    double eta = 0.0;            // distance / |X| (uniform-input separation gap)
    double tol = 0.0;

    bool intersection_empty() const { return distance > tol; }
};

// Table-style verdict sheet: which symmetrizations are feasible and which
// tasks admit positive deterministic capacity.
struct ClassificationReport {
    SymmetryWitness cis1, cis2, trans;
    SeparationReport separation;
    double tol = 0.0;
    bool cis1_feasible = false;
    bool cis2_feasible = false;
    bool trans_feasible = false;
    bool any_symmetrizable = false;
    bool intersection_empty = false;
    bool com_positive = false;
    bool and_positive = false;
    bool or_positive = false;
};

// Minimize the max-norm violation of the cis-symmetrizability equations over
// row-stochastic U via a linear program; feasible iff residual <= tol.
SymmetryWitness check_cis(const CavcModel& model, int family, double tol);

// Same with the pair (U over S1, V over S2) and the trans equations.
SymmetryWitness check_trans(const CavcModel& model, double tol);

// Closest pair of mixture channels from the two family hulls.
SeparationReport hull_separation(const CavcModel& model, double tol);

ClassificationReport classify(const CavcModel& model, double tol = 1e-9);

// Recomputes the max-norm violation of a witness from the defining
// equations (independent of the solver path).
double symmetry_residual(const CavcModel& model, const SymmetryWitness& witness);

// Exhaustive residual minimum over simplex grids of U (and V) rows. Upper
// bounds the LP optimum by construction.
double grid_oracle_symmetrizable(const CavcModel& model, SymmetryWitness::Kind kind,
                                 double resolution, std::uint64_t max_points = 100'000'000ULL);

}  // namespace cavc

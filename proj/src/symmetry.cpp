#include "cavc/symmetry.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cavc/errors.hpp"
#include "cavc/lp.hpp"
#include "cavc/simplex.hpp"

namespace cavc {

namespace {

// Rows of W(.|x, s_j) for the family's states, one |X| x |Y| matrix per state.
std::vector<Eigen::MatrixXd> family_matrices(const CavcModel& model, int k) {
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(model.family(k).size());
    for (int s : model.family(k)) mats.push_back(model.kernel.state_matrix(s));
    return mats;
}

LpResult run_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                const std::string& where) {
    LpResult r = solve_lp(a, b, c);
    if (r.status == LpStatus::IterationLimit)
        throw SolverError(where + ": simplex iteration limit after " +
                          std::to_string(r.iterations) + " pivots");
    if (r.status != LpStatus::Optimal)
        throw SolverError(where + ": unexpected LP status");
    return r;
}

double cis_residual(const CavcModel& model, int k, const Eigen::MatrixXd& u) {
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const auto& fam = model.family(k);
    double worst = 0.0;
    for (int x = 0; x < nx; ++x) {
        for (int xp = x + 1; xp < nx; ++xp) {
            for (int y = 0; y < ny; ++y) {
                double lhs = 0.0, rhs = 0.0;
                for (std::size_t j = 0; j < fam.size(); ++j) {
                    lhs += u(xp, static_cast<int>(j)) * model.kernel.prob(x, fam[j], y);
                    rhs += u(x, static_cast<int>(j)) * model.kernel.prob(xp, fam[j], y);
                }
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    }
    return worst;
}

double trans_residual(const CavcModel& model, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const auto& f1 = model.family(1);
    const auto& f2 = model.family(2);
    double worst = 0.0;
    for (int x = 0; x < nx; ++x) {
        for (int xp = 0; xp < nx; ++xp) {
            for (int y = 0; y < ny; ++y) {
                double lhs = 0.0, rhs = 0.0;
                for (std::size_t j = 0; j < f1.size(); ++j)
                    lhs += u(xp, static_cast<int>(j)) * model.kernel.prob(x, f1[j], y);
                for (std::size_t j = 0; j < f2.size(); ++j)
                    rhs += v(x, static_cast<int>(j)) * model.kernel.prob(xp, f2[j], y);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    }
    return worst;
}

}  // namespace

SymmetryWitness check_cis(const CavcModel& model, int family, double tol) {
    if (tol <= 0.0) throw ModelError("check_cis: tol must be positive");
    if (family != 1 && family != 2) throw ModelError("check_cis: family must be 1 or 2");
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const int nf = model.family_size(family);

    // Variables: U entries (x-major), then t, then two slacks per constraint.
    const int n_u = nx * nf;
    const int t_idx = n_u;
    const int n_pairs = nx * (nx - 1) / 2;
    const int n_ineq = 2 * n_pairs * ny;
    const int n_vars = n_u + 1 + n_ineq;
    const int n_rows = n_ineq + nx;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_rows, n_vars);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_vars);
    c(t_idx) = 1.0;

    const auto& fam = model.family(family);
    int row = 0;
    int slack = n_u + 1;
    for (int x = 0; x < nx; ++x) {
        for (int xp = x + 1; xp < nx; ++xp) {
            for (int y = 0; y < ny; ++y) {
                // g = sum_j u(xp,j) W(y|x,s_j) - sum_j u(x,j) W(y|xp,s_j)
                for (int sign : {+1, -1}) {
                    for (int j = 0; j < nf; ++j) {
                        a(row, xp * nf + j) += sign * model.kernel.prob(x, fam[static_cast<std::size_t>(j)], y);
                        a(row, x * nf + j) -= sign * model.kernel.prob(xp, fam[static_cast<std::size_t>(j)], y);
                    }
                    a(row, t_idx) = -1.0;
                    a(row, slack++) = 1.0;
                    b(row) = 0.0;
                    ++row;
                }
            }
        }
    }
    for (int x = 0; x < nx; ++x) {
        for (int j = 0; j < nf; ++j) a(row, x * nf + j) = 1.0;
        b(row) = 1.0;
        ++row;
    }

    const LpResult lp = run_lp(a, b, c, "check_cis");
    SymmetryWitness w;
    w.kind = family == 1 ? SymmetryWitness::Kind::Cis1 : SymmetryWitness::Kind::Cis2;
    w.u = Eigen::MatrixXd(nx, nf);
    for (int x = 0; x < nx; ++x)
        for (int j = 0; j < nf; ++j) w.u(x, j) = lp.x(x * nf + j);
    w.lp_iterations = lp.iterations;
    w.residual = cis_residual(model, family, w.u);
    return w;
}

SymmetryWitness check_trans(const CavcModel& model, double tol) {
    if (tol <= 0.0) throw ModelError("check_trans: tol must be positive");
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const int f1 = model.family_size(1);
    const int f2 = model.family_size(2);

    const int n_u = nx * f1;
    const int n_v = nx * f2;
    const int t_idx = n_u + n_v;
    const int n_ineq = 2 * nx * nx * ny;
    const int n_vars = n_u + n_v + 1 + n_ineq;
    const int n_rows = n_ineq + 2 * nx;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_rows, n_vars);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_vars);
    c(t_idx) = 1.0;

    const auto& fam1 = model.family(1);
    const auto& fam2 = model.family(2);
    int row = 0;
    int slack = t_idx + 1;
    for (int x = 0; x < nx; ++x) {
        for (int xp = 0; xp < nx; ++xp) {
            for (int y = 0; y < ny; ++y) {
                // g = sum_j u(xp,j) W(y|x,s1_j) - sum_j v(x,j) W(y|xp,s2_j)
                for (int sign : {+1, -1}) {
                    for (int j = 0; j < f1; ++j)
                        a(row, xp * f1 + j) += sign * model.kernel.prob(x, fam1[static_cast<std::size_t>(j)], y);
                    for (int j = 0; j < f2; ++j)
                        a(row, n_u + x * f2 + j) -= sign * model.kernel.prob(xp, fam2[static_cast<std::size_t>(j)], y);
                    a(row, t_idx) = -1.0;
                    a(row, slack++) = 1.0;
                    ++row;
                }
            }
        }
    }
    for (int x = 0; x < nx; ++x) {
        for (int j = 0; j < f1; ++j) a(row, x * f1 + j) = 1.0;
        b(row) = 1.0;
        ++row;
    }
    for (int x = 0; x < nx; ++x) {
        for (int j = 0; j < f2; ++j) a(row, n_u + x * f2 + j) = 1.0;
        b(row) = 1.0;
        ++row;
    }

    const LpResult lp = run_lp(a, b, c, "check_trans");
    SymmetryWitness w;
    w.kind = SymmetryWitness::Kind::Trans;
    w.u = Eigen::MatrixXd(nx, f1);
    w.v = Eigen::MatrixXd(nx, f2);
    for (int x = 0; x < nx; ++x) {
        for (int j = 0; j < f1; ++j) w.u(x, j) = lp.x(x * f1 + j);
        for (int j = 0; j < f2; ++j) w.v(x, j) = lp.x(n_u + x * f2 + j);
    }
    w.lp_iterations = lp.iterations;
    w.residual = trans_residual(model, w.u, w.v);
    return w;
}

SeparationReport hull_separation(const CavcModel& model, double tol) {
    if (tol <= 0.0) throw ModelError("hull_separation: tol must be positive");
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const int f1 = model.family_size(1);
    const int f2 = model.family_size(2);

    const int t_idx = f1 + f2;
    const int n_ineq = 2 * nx * ny;
    const int n_vars = f1 + f2 + 1 + n_ineq;
    const int n_rows = n_ineq + 2;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_rows, n_vars);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_vars);
    c(t_idx) = 1.0;

    const auto& fam1 = model.family(1);
    const auto& fam2 = model.family(2);
    int row = 0;
    int slack = t_idx + 1;
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            for (int sign : {+1, -1}) {
                for (int j = 0; j < f1; ++j)
                    a(row, j) += sign * model.kernel.prob(x, fam1[static_cast<std::size_t>(j)], y);
                for (int j = 0; j < f2; ++j)
                    a(row, f1 + j) -= sign * model.kernel.prob(x, fam2[static_cast<std::size_t>(j)], y);
                a(row, t_idx) = -1.0;
                a(row, slack++) = 1.0;
                ++row;
            }
        }
    }
    a.block(row, 0, 1, f1).setOnes();
    b(row++) = 1.0;
    a.block(row, f1, 1, f2).setOnes();
    b(row) = 1.0;

    const LpResult lp = run_lp(a, b, c, "hull_separation");
    SeparationReport rep;
    rep.witness_q1 = lp.x.segment(0, f1);
    rep.witness_q2 = lp.x.segment(f1, f2);
    rep.tol = tol;
    // Recompute the distance from the witnesses.
    const Eigen::MatrixXd w1 = family_mixture(model, 1, rep.witness_q1);
    const Eigen::MatrixXd w2 = family_mixture(model, 2, rep.witness_q2);
    rep.distance = (w1 - w2).cwiseAbs().maxCoeff();
    rep.eta = rep.distance > tol ? rep.distance / nx : 0.0;
    return rep;
}

ClassificationReport classify(const CavcModel& model, double tol) {
    ClassificationReport rep;
    rep.tol = tol;
    rep.cis1 = check_cis(model, 1, tol);
    rep.cis2 = check_cis(model, 2, tol);
    rep.trans = check_trans(model, tol);
    rep.separation = hull_separation(model, tol);
    rep.cis1_feasible = rep.cis1.feasible(tol);
    rep.cis2_feasible = rep.cis2.feasible(tol);
    rep.trans_feasible = rep.trans.feasible(tol);
    rep.any_symmetrizable = rep.cis1_feasible || rep.cis2_feasible || rep.trans_feasible;
    rep.intersection_empty = rep.separation.intersection_empty();
    rep.com_positive = !rep.any_symmetrizable;
    rep.and_positive = !rep.any_symmetrizable && rep.intersection_empty;
    rep.or_positive = !rep.trans_feasible;
    return rep;
}

double symmetry_residual(const CavcModel& model, const SymmetryWitness& witness) {
    switch (witness.kind) {
        case SymmetryWitness::Kind::Cis1: return cis_residual(model, 1, witness.u);
        case SymmetryWitness::Kind::Cis2: return cis_residual(model, 2, witness.u);
        case SymmetryWitness::Kind::Trans: return trans_residual(model, witness.u, witness.v);
    }
    throw ModelError("symmetry_residual: unknown witness kind");
}

double grid_oracle_symmetrizable(const CavcModel& model, SymmetryWitness::Kind kind,
                                 double resolution, std::uint64_t max_points) {
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const bool trans = kind == SymmetryWitness::Kind::Trans;
    const int k_u = trans ? 1 : (kind == SymmetryWitness::Kind::Cis1 ? 1 : 2);
    const int f_u = model.family_size(k_u);
    const int f_v = trans ? model.family_size(2) : 0;

    const std::uint64_t pts_u = simplex_grid_size(f_u, resolution);
    const std::uint64_t pts_v = trans ? simplex_grid_size(f_v, resolution) : 0;
    double total = std::pow(static_cast<double>(pts_u), nx);
    if (trans) total *= std::pow(static_cast<double>(pts_v), nx);
    if (total > static_cast<double>(max_points))
        throw BudgetError("grid_oracle_symmetrizable: " + std::to_string(total) +
                          " grid combinations exceed the budget");

    // Precompute mixture rows A_u(x, y) for every grid point of each simplex.
    const auto mats_u = family_matrices(model, k_u);
    std::vector<Eigen::MatrixXd> a_u;
    for_each_simplex_grid_point(f_u, resolution, [&](const Eigen::VectorXd& q) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nx, ny);
        for (int j = 0; j < f_u; ++j) m += q(j) * mats_u[static_cast<std::size_t>(j)];
        a_u.push_back(std::move(m));
    });
    std::vector<Eigen::MatrixXd> a_v;
    if (trans) {
        const auto mats_v = family_matrices(model, 2);
        for_each_simplex_grid_point(f_v, resolution, [&](const Eigen::VectorXd& q) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nx, ny);
            for (int j = 0; j < f_v; ++j) m += q(j) * mats_v[static_cast<std::size_t>(j)];
            a_v.push_back(std::move(m));
        });
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> row_u(static_cast<std::size_t>(nx), 0);
    std::vector<std::size_t> row_v(static_cast<std::size_t>(nx), 0);

    auto eval = [&]() {
        double worst = 0.0;
        for (int x = 0; x < nx && worst < best; ++x) {
            const int xp_start = trans ? 0 : x + 1;
            for (int xp = xp_start; xp < nx; ++xp) {
                if (!trans && xp == x) continue;
                const Eigen::MatrixXd& lhs = a_u[row_u[static_cast<std::size_t>(xp)]];
                const Eigen::MatrixXd& rhs =
                    trans ? a_v[row_v[static_cast<std::size_t>(x)]] : a_u[row_u[static_cast<std::size_t>(x)]];
                for (int y = 0; y < ny; ++y)
                    worst = std::max(worst, std::abs(lhs(x, y) - rhs(xp, y)));
            }
        }
        best = std::min(best, worst);
    };

    std::function<void(int)> rec_v = [&](int x) {
        if (x == nx) {
            eval();
            return;
        }
        for (std::size_t i = 0; i < a_v.size(); ++i) {
            row_v[static_cast<std::size_t>(x)] = i;
            rec_v(x + 1);
        }
    };
    std::function<void(int)> rec_u = [&](int x) {
        if (x == nx) {
            if (trans)
                rec_v(0);
            else
                eval();
            return;
        }
        for (std::size_t i = 0; i < a_u.size(); ++i) {
            row_u[static_cast<std::size_t>(x)] = i;
            rec_u(x + 1);
        }
    };
    rec_u(0);
    return best;
}

}  // namespace cavc

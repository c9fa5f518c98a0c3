#include "cavc/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cavc/errors.hpp"
#include "cavc/info.hpp"
#include "cavc/lp.hpp"
#include "cavc/simplex.hpp"

namespace cavc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd output_marginal(const Eigen::Ref<const Eigen::VectorXd>& p,
                                const Eigen::MatrixXd& w) {
    return w.transpose() * p;
}

// Exact one-sided directional derivative of I(p, .) at w toward vertex a,
// including the corner cases on cells where w vanishes.
double directional_derivative(const Eigen::Ref<const Eigen::VectorXd>& p,
                              const Eigen::MatrixXd& w, const Eigen::VectorXd& r,
                              const Eigen::MatrixXd& a, const Eigen::VectorXd& ra) {
    double d = 0.0;
    for (Eigen::Index x = 0; x < w.rows(); ++x) {
        if (p(x) <= 0.0) continue;
        for (Eigen::Index y = 0; y < w.cols(); ++y) {
            const double wxy = w(x, y);
            const double axy = a(x, y);
            if (wxy > 0.0) {
                d += p(x) * (axy - wxy) * std::log2(wxy / r(y));
            } else if (axy > 0.0) {
                if (r(y) > 0.0) return -kInf;  // mass enters a zero cell of a live column
                d += p(x) * axy * std::log2(axy / ra(y));
            }
        }
    }
    return d;
}

// phi(gamma) = I(p, w + gamma * (target - w)) minimized over [0, 1].
// phi is convex; bisection on the sign of phi' localizes the argmin to
// machine precision, which value-based search cannot.
double line_search(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::MatrixXd& w,
                   const Eigen::MatrixXd& target, double /*unused*/ = 1.0) {
    const Eigen::MatrixXd d = target - w;
    auto slope = [&](double g) {
        const Eigen::MatrixXd wg = w + g * d;
        const Eigen::VectorXd rg = wg.transpose() * p;
        double acc = 0.0;
        for (Eigen::Index x = 0; x < w.rows(); ++x) {
            if (p(x) <= 0.0) continue;
            for (Eigen::Index y = 0; y < w.cols(); ++y) {
                if (d(x, y) == 0.0) continue;
                if (wg(x, y) <= 0.0) return d(x, y) > 0.0 ? -kInf : kInf;
                acc += p(x) * d(x, y) * std::log2(wg(x, y) / rg(y));
            }
        }
        return acc;
    };
    auto eval = [&](double g) {
        return mutual_information(p, Eigen::MatrixXd(w + g * d));
    };
    const double edge = 1e-12;
    if (slope(edge) >= 0.0) return eval(0.0) <= eval(edge) ? 0.0 : edge;
    if (slope(1.0 - edge) <= 0.0) return eval(1.0) <= eval(1.0 - edge) ? 1.0 : 1.0 - edge;
    double lo = edge, hi = 1.0 - edge;
    for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

MatrixHullMin min_mi_over_matrix_hull(const Eigen::Ref<const Eigen::VectorXd>& p,
                                      const std::vector<Eigen::MatrixXd>& vertices,
                                      const FwOptions& opts) {
    const int k = static_cast<int>(vertices.size());
    if (k == 0) throw ModelError("min_mi_over_matrix_hull: no vertices");

    std::vector<Eigen::VectorXd> vertex_marginals;
    vertex_marginals.reserve(vertices.size());
    for (const auto& a : vertices) vertex_marginals.push_back(output_marginal(p, a));

    MatrixHullMin best;
    Eigen::VectorXd lambda = Eigen::VectorXd::Constant(k, 1.0 / k);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(vertices[0].rows(), vertices[0].cols());
    for (int j = 0; j < k; ++j) w += lambda(j) * vertices[static_cast<std::size_t>(j)];

    int it = 0;
    double gap = kInf;
    for (; it < opts.max_iterations; ++it) {
        const Eigen::VectorXd r = output_marginal(p, w);
        double d_min = kInf, d_max_support = -kInf;
        int j_fw = 0, j_aw = -1;
        for (int j = 0; j < k; ++j) {
            const double d = directional_derivative(p, w, r, vertices[static_cast<std::size_t>(j)],
                                                    vertex_marginals[static_cast<std::size_t>(j)]);
            if (d < d_min) {
                d_min = d;
                j_fw = j;
            }
            if (lambda(j) > 1e-14 && d > d_max_support) {
                d_max_support = d;
                j_aw = j;
            }
        }
        gap = -d_min;  // Frank-Wolfe gap of the min problem
        if (gap <= opts.gap_tol) break;

        if (j_aw < 0 || j_aw == j_fw) {
            // plain step toward the best vertex
            const double g = line_search(p, w, vertices[static_cast<std::size_t>(j_fw)], 1.0);
            lambda *= (1.0 - g);
            lambda(j_fw) += g;
        } else {
            // pairwise step: shift mass from the worst support vertex to the
            // best vertex; converges linearly on these tiny problems
            const double gamma_max = lambda(j_aw);
            const Eigen::MatrixXd target =
                w + gamma_max * (vertices[static_cast<std::size_t>(j_fw)] -
                                 vertices[static_cast<std::size_t>(j_aw)]);
            const double g = line_search(p, w, target, 1.0) * gamma_max;
            lambda(j_fw) += g;
            lambda(j_aw) -= g;
            if (lambda(j_aw) < 1e-15) lambda(j_aw) = 0.0;
        }
        w.setZero();
        for (int j = 0; j < k; ++j)
            if (lambda(j) > 0.0) w += lambda(j) * vertices[static_cast<std::size_t>(j)];
    }

    if (gap > opts.gap_tol && it >= opts.max_iterations)
        throw SolverError("min_mi_over_matrix_hull: gap " + std::to_string(gap) + " after " +
                          std::to_string(it) + " iterations (best value " +
                          std::to_string(mutual_information(p, w)) + ")");

    best.value = mutual_information(p, w);
    best.lambda = lambda;
    best.gap = gap;
    best.iterations = it;
    return best;
}

HullMin min_mi_over_hull(const Eigen::Ref<const Eigen::VectorXd>& p, const CavcModel& model,
                         int family, const FwOptions& opts) {
    std::vector<Eigen::MatrixXd> vertices;
    for (int s : model.family(family)) vertices.push_back(model.kernel.state_matrix(s));
    MatrixHullMin m = min_mi_over_matrix_hull(p, vertices, opts);
    return HullMin{m.value, m.lambda, m.gap, m.iterations};
}

IntersectionMin min_mi_over_intersection(const Eigen::Ref<const Eigen::VectorXd>& p,
                                         const CavcModel& model, double tol,
                                         const FwOptions& opts) {
    IntersectionMin out;
    if (model.family_one == model.family_two) {
        // intersection equals the (single) hull
        HullMin h = min_mi_over_hull(p, model, 1, opts);
        out.value = h.value;
        out.q1 = h.q;
        out.q2 = h.q;
        out.gap = h.gap;
        out.iterations = h.iterations;
        return out;
    }

    const SeparationReport sep = hull_separation(model, tol);
    if (sep.intersection_empty()) {
        out.value = ExtendedReal::infinity();
        return out;
    }

    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const int f1 = model.family_size(1);
    const int f2 = model.family_size(2);

    // LP oracle over {(u1,u2) in simplex^2 : |W_{u1} - W_{u2}|_inf <= tol}.
    const int t_rows = 2 * nx * ny;
    const int n_vars = f1 + f2 + t_rows;  // slacks appended
    const int n_rows = t_rows + 2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_rows, n_vars);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);
    {
        int row = 0;
        int slack = f1 + f2;
        for (int x = 0; x < nx; ++x) {
            for (int y = 0; y < ny; ++y) {
                for (int sign : {+1, -1}) {
                    for (int j = 0; j < f1; ++j)
                        a(row, j) += sign * model.kernel.prob(x, model.family_one[static_cast<std::size_t>(j)], y);
                    for (int j = 0; j < f2; ++j)
                        a(row, f1 + j) -= sign * model.kernel.prob(x, model.family_two[static_cast<std::size_t>(j)], y);
                    a(row, slack++) = 1.0;
                    b(row) = tol;
                    ++row;
                }
            }
        }
        a.block(row, 0, 1, f1).setOnes();
        b(row++) = 1.0;
        a.block(row, f1, 1, f2).setOnes();
        b(row) = 1.0;
    }

    struct Vertex {
        Eigen::VectorXd q1, q2;
        Eigen::MatrixXd w;
    };
    std::vector<Vertex> verts;
    verts.push_back({sep.witness_q1, sep.witness_q2, family_mixture(model, 1, sep.witness_q1)});

    Eigen::VectorXd lambda = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd w = verts[0].w;
    double gap = kInf;
    int outer = 0;
    const int max_outer = 400;
    for (; outer < max_outer; ++outer) {
        // fully corrective step over the vertices found so far
        std::vector<Eigen::MatrixXd> mats;
        mats.reserve(verts.size());
        for (const auto& v : verts) mats.push_back(v.w);
        MatrixHullMin corr = min_mi_over_matrix_hull(p, mats, opts);
        lambda = corr.lambda;
        w.setZero();
        for (std::size_t j = 0; j < verts.size(); ++j) w += lambda(static_cast<Eigen::Index>(j)) * verts[j].w;
        out.iterations += corr.iterations;

        // gradient with respect to the q1 block, clamped on vanishing cells
        const Eigen::VectorXd r = output_marginal(p, w);
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(f1 + f2 + t_rows);
        for (int j = 0; j < f1; ++j) {
            const Eigen::MatrixXd& ws = model.kernel.state_matrix(model.family_one[static_cast<std::size_t>(j)]);
            double g = 0.0;
            for (int x = 0; x < nx; ++x) {
                if (p(x) <= 0.0) continue;
                for (int y = 0; y < ny; ++y) {
                    if (ws(x, y) <= 0.0) continue;
                    if (w(x, y) > 0.0 && r(y) > 0.0)
                        g += p(x) * ws(x, y) * std::log2(w(x, y) / r(y));
                    else
                        g += p(x) * ws(x, y) * -60.0;  // pull toward uncovered cells
                }
            }
            grad(j) = g;
        }

        LpResult lp = solve_lp(a, b, grad);
        if (lp.status != LpStatus::Optimal)
            throw SolverError("min_mi_over_intersection: oracle LP failed (declared-nonempty intersection)");
        Eigen::VectorXd q1_cur = Eigen::VectorXd::Zero(f1);
        for (std::size_t j = 0; j < verts.size(); ++j) q1_cur += lambda(static_cast<Eigen::Index>(j)) * verts[j].q1;
        gap = grad.segment(0, f1).dot(q1_cur - lp.x.segment(0, f1));
        if (gap <= opts.gap_tol) break;

        Vertex v{lp.x.segment(0, f1), lp.x.segment(f1, f2), family_mixture(model, 1, lp.x.segment(0, f1))};
        // stop if the oracle keeps returning an already-known vertex
        bool known = false;
        for (const auto& u : verts)
            if ((u.q1 - v.q1).cwiseAbs().maxCoeff() < 1e-12 &&
                (u.q2 - v.q2).cwiseAbs().maxCoeff() < 1e-12)
                known = true;
        if (known) break;
        verts.push_back(std::move(v));
    }

    out.value = mutual_information(p, w);
    out.gap = gap;
    out.q1 = Eigen::VectorXd::Zero(f1);
    out.q2 = Eigen::VectorXd::Zero(f2);
    for (std::size_t j = 0; j < verts.size(); ++j) {
        out.q1 += lambda(static_cast<Eigen::Index>(j)) * verts[j].q1;
        out.q2 += lambda(static_cast<Eigen::Index>(j)) * verts[j].q2;
    }
    return out;
}

namespace {

struct Evaluation {
    double value = 0.0;
    Eigen::VectorXd supergradient;
    Eigen::VectorXd q1, q2;
};

// Concave objective F(p) plus a supergradient, for the outer maximization.
template <typename F>
CapacityResult maximize_over_inputs(const CavcModel& model, const OuterOptions& opts, F&& eval) {
    const int nx = model.kernel.num_inputs();
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(nx, 1.0 / nx);

    auto clip = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
        return (1.0 - opts.boundary_clip) * p + opts.boundary_clip * uniform;
    };

    CapacityResult result;
    std::vector<Evaluation> cuts;
    std::vector<Eigen::VectorXd> cut_points;

    double best_value = -1.0;
    Eigen::VectorXd best_p;
    Evaluation best_eval;

    auto consider = [&](const Eigen::VectorXd& p_raw) {
        const Eigen::VectorXd p = clip(p_raw);
        Evaluation e = eval(p);
        cuts.push_back(e);
        cut_points.push_back(p);
        if (e.value > best_value) {
            best_value = e.value;
            best_p = p;
            best_eval = e;
        }
        result.trace.outer_iterations += 1;
        return e.value;
    };

    // warm start: uniform plus an input-simplex grid
    consider(uniform);
    const bool grid_ran = nx <= opts.max_x_for_grid;
    double grid_best = best_value;
    if (grid_ran) {
        for_each_simplex_grid_point(nx, opts.warm_grid_res, [&](const Eigen::VectorXd& p) {
            const Eigen::VectorXd pc = clip(p);
            Evaluation e = eval(pc);
            if (e.value > grid_best) grid_best = e.value;
            if (e.value > best_value) {
                best_value = e.value;
                best_p = pc;
                best_eval = e;
                cuts.push_back(e);
                cut_points.push_back(pc);
            }
        });
    }

    // Kelley cutting plane: max t s.t. t <= F_i + g_i . (p - p_i), p in simplex
    double upper = kInf;
    for (int round = 0; round < opts.max_cuts; ++round) {
        const int n_cuts = static_cast<int>(cuts.size());
        const int n_vars = nx + 1 + n_cuts;  // p, t, one slack per cut
        const int n_rows = n_cuts + 1;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_rows, n_vars);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n_vars);
        c(nx) = -1.0;  // maximize t
        for (int i = 0; i < n_cuts; ++i) {
            a(i, nx) = 1.0;
            a.block(i, 0, 1, nx) = -cuts[static_cast<std::size_t>(i)].supergradient.transpose();
            a(i, nx + 1 + i) = 1.0;
            b(i) = cuts[static_cast<std::size_t>(i)].value -
                   cuts[static_cast<std::size_t>(i)].supergradient.dot(cut_points[static_cast<std::size_t>(i)]);
        }
        a.block(n_cuts, 0, 1, nx).setOnes();
        b(n_cuts) = 1.0;

        LpResult lp = solve_lp(a, b, c);
        if (lp.status != LpStatus::Optimal)
            throw SolverError("capacity outer loop: cutting-plane LP failed");
        upper = lp.x(nx);
        if (upper - best_value <= opts.cut_tol) break;
        consider(lp.x.segment(0, nx));
    }

    result.value = best_value;
    result.optimal_input = best_p;
    result.worst_q1 = best_eval.q1;
    result.worst_q2 = best_eval.q2;
    result.trace.final_gap = upper == kInf ? 0.0 : std::max(0.0, upper - best_value);
    result.trace.grid_best = grid_ran ? grid_best : 0.0;
    result.trace.grid_certified = !grid_ran || best_value - grid_best <= 1e-3;
    return result;
}

Eigen::VectorXd info_supergradient(const Eigen::Ref<const Eigen::VectorXd>& p,
                                   const Eigen::MatrixXd& w) {
    // d i / d p(x) = D(W(.|x) || r_p) up to an additive constant
    const Eigen::VectorXd r = w.transpose() * p;
    Eigen::VectorXd g(p.size());
    for (Eigen::Index x = 0; x < p.size(); ++x) {
        double d = 0.0;
        for (Eigen::Index y = 0; y < w.cols(); ++y)
            if (w(x, y) > 0.0) d += w(x, y) * std::log2(w(x, y) / r(y));
        g(x) = d;
    }
    return g;
}

}  // namespace

CapacityResult capacity_com(const CavcModel& model, const OuterOptions& opts) {
    FwOptions fw;
    auto eval = [&](const Eigen::VectorXd& p) {
        Evaluation e;
        HullMin h1 = min_mi_over_hull(p, model, 1, fw);
        HullMin h2 = min_mi_over_hull(p, model, 2, fw);
        // ties break toward family one
        const bool first = h1.value <= h2.value;
        e.value = first ? h1.value : h2.value;
        e.q1 = h1.q;
        e.q2 = h2.q;
        const Eigen::MatrixXd w = family_mixture(model, first ? 1 : 2, first ? h1.q : h2.q);
        e.supergradient = info_supergradient(p, w);
        return e;
    };
    return maximize_over_inputs(model, opts, eval);
}

CapacityResult capacity_and(const CavcModel& model, const OuterOptions& opts) {
    const SeparationReport sep = hull_separation(model, opts.tol);
    if (!sep.intersection_empty()) {
        CapacityResult r;
        r.value = 0.0;
        r.optimal_input = Eigen::VectorXd::Constant(model.kernel.num_inputs(),
                                                    1.0 / model.kernel.num_inputs());
        r.worst_q1 = sep.witness_q1;
        r.worst_q2 = sep.witness_q2;
        r.trace.grid_certified = true;
        return r;
    }
    return capacity_com(model, opts);
}

CapacityResult capacity_or(const CavcModel& model, const OuterOptions& opts) {
    const SeparationReport sep = hull_separation(model, opts.tol);
    if (sep.intersection_empty()) {
        CapacityResult r;
        r.value = ExtendedReal::infinity();
        r.trace.grid_certified = true;
        return r;
    }
    FwOptions fw;
    auto eval = [&](const Eigen::VectorXd& p) {
        Evaluation e;
        IntersectionMin m = min_mi_over_intersection(p, model, opts.tol, fw);
        if (m.value.is_infinite())
            throw SolverError("capacity_or: intersection became infeasible mid-solve");
        e.value = m.value.value();
        e.q1 = m.q1;
        e.q2 = m.q2;
        const Eigen::MatrixXd w = family_mixture(model, 1, m.q1);
        e.supergradient = info_supergradient(p, w);
        return e;
    };
    return maximize_over_inputs(model, opts, eval);
}

namespace {

// Entropy-continuity modulus: |H(P) - H(Q)| <= h2(tv) + tv log2(d-1).
double entropy_modulus(double tv, int d) {
    tv = std::min(std::max(tv, 0.0), 0.5);
    double m = binary_entropy(tv);
    if (d > 2) m += tv * std::log2(static_cast<double>(d - 1));
    return m;
}

}  // namespace

GridBracket capacity_grid_oracle(const CavcModel& model, Task task, double input_res,
                                 double mixture_res, std::uint64_t max_points) {
    if (task == Task::Identify) throw ModelError("capacity_grid_oracle: identify has no capacity");
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const int f1 = model.family_size(1);
    const int f2 = model.family_size(2);

    if (task == Task::And) {
        const SeparationReport sep = hull_separation(model, 1e-9);
        if (!sep.intersection_empty()) return GridBracket{0.0, 0.0, 0.0};
        task = Task::Com;  // and-capacity equals com-capacity when hulls are disjoint
    }

    const std::uint64_t p_points = simplex_grid_size(nx, input_res);
    const std::uint64_t q1_points = simplex_grid_size(f1, mixture_res);
    const std::uint64_t q2_points = simplex_grid_size(f2, mixture_res);

    // candidate channel list
    std::vector<Eigen::MatrixXd> channels;
    if (task == Task::Com) {
        if (p_points > max_points || q1_points + q2_points > max_points ||
            static_cast<double>(p_points) * (static_cast<double>(q1_points) + static_cast<double>(q2_points)) >
                static_cast<double>(max_points))
            throw BudgetError("capacity_grid_oracle: grid too large");
        for (int k : {1, 2}) {
            const int f = model.family_size(k);
            for_each_simplex_grid_point(f, mixture_res, [&](const Eigen::VectorXd& q) {
                channels.push_back(family_mixture(model, k, q));
            });
        }
    } else {  // Task::Or
        const double pair_count = static_cast<double>(q1_points) * static_cast<double>(q2_points);
        if (p_points > max_points || pair_count > static_cast<double>(max_points))
            throw BudgetError("capacity_grid_oracle: pair grid too large");
        const double kappa = (f1 + f2) * mixture_res;  // covers every true intersection point
        std::vector<Eigen::MatrixXd> w1s, w2s;
        for_each_simplex_grid_point(f1, mixture_res, [&](const Eigen::VectorXd& q) {
            w1s.push_back(family_mixture(model, 1, q));
        });
        for_each_simplex_grid_point(f2, mixture_res, [&](const Eigen::VectorXd& q) {
            w2s.push_back(family_mixture(model, 2, q));
        });
        for (const auto& w1 : w1s)
            for (const auto& w2 : w2s)
                if ((w1 - w2).cwiseAbs().maxCoeff() <= kappa)
                    channels.push_back(0.5 * (w1 + w2));
        if (channels.empty()) return GridBracket{ExtendedReal::infinity(), ExtendedReal::infinity(),
                                                 ExtendedReal::infinity()};
    }

    double best = -1.0;
    for_each_simplex_grid_point(nx, input_res, [&](const Eigen::VectorXd& p) {
        double worst = kInf;
        for (const auto& w : channels) {
            const double v = mutual_information(p, w);
            if (v < worst) worst = v;
            if (worst <= best) break;  // cannot beat the incumbent max
        }
        if (worst > best) best = worst;
    });

    // discretization slack
    const int f_max = std::max(f1, f2);
    double tv_q = f_max * mixture_res / 2.0;
    if (task == Task::Or) tv_q += ny * ((f1 + f2) * mixture_res) / 4.0;
    const double c_q = 2.0 * entropy_modulus(tv_q, ny);
    const double tv_p = nx * input_res / 2.0;
    const double c_p = entropy_modulus(tv_p, ny) + 2.0 * tv_p * std::log2(std::max(2, ny));

    GridBracket out{std::max(0.0, best - c_q), best + c_p + (task == Task::Or ? c_q : 0.0), best};
    return out;
}

}  // namespace cavc

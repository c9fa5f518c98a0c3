#include "cavc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "cavc/errors.hpp"
#include "cavc/info.hpp"
#include "cavc/lp.hpp"
#include "cavc/rng.hpp"

namespace cavc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Codebook generate_codebook(const Eigen::VectorXd& composition, int n, int num_messages,
                           std::uint64_t seed) {
    if (n < 1 || num_messages < 1) throw ModelError("generate_codebook: need n >= 1 and M >= 1");
    if (std::abs(composition.sum() - 1.0) > kStochasticTol || composition.minCoeff() < 0.0)
        throw ModelError("generate_codebook: composition is not a distribution");

    std::vector<int> base;
    base.reserve(static_cast<std::size_t>(n));
    for (int x = 0; x < composition.size(); ++x) {
        const double exact = composition(x) * n;
        const long long cnt = std::llround(exact);
        if (std::abs(exact - static_cast<double>(cnt)) > 1e-9) {
            // name the closest realizable type in the message
            Eigen::VectorXd rounded = (composition * n).array().round() / n;
            std::string hint = "[";
            for (int i = 0; i < rounded.size(); ++i)
                hint += (i ? ", " : "") + std::to_string(rounded(i));
            hint += "]";
            throw ModelError("generate_codebook: composition not realizable at n = " +
                             std::to_string(n) + "; closest realizable type " + hint);
        }
        for (long long i = 0; i < cnt; ++i) base.push_back(x);
    }
    if (static_cast<int>(base.size()) != n)
        throw ModelError("generate_codebook: composition counts do not sum to n");

    Codebook cb;
    cb.n = n;
    cb.num_messages = num_messages;
    cb.composition = composition;
    cb.seed = seed;
    cb.codewords.reserve(static_cast<std::size_t>(num_messages));
    for (int m = 0; m < num_messages; ++m) {
        std::vector<int> w = base;
        CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
        rng.shuffle(w);
        cb.codewords.push_back(std::move(w));
    }
    std::set<std::vector<int>> distinct(cb.codewords.begin(), cb.codewords.end());
    cb.has_duplicates = static_cast<int>(distinct.size()) != num_messages;
    return cb;
}

bool is_error(const Verdict& v, Task task, int true_message, int true_state) {
    switch (task) {
        case Task::Com: return v.message != true_message;
        case Task::And: return v.message != true_message || v.state != true_state;
        case Task::Or: return !(v.message == true_message && v.message != 0) &&
                              !(v.state == true_state && v.state != 0);
        case Task::Identify: return v.state != true_state;
    }
    return true;
}

Verdict mmi_decode(const Codebook& cb, const std::vector<int>& y, int num_outputs, double rate,
                   double delta) {
    if (static_cast<int>(y.size()) != cb.n) throw ModelError("mmi_decode: length mismatch");
    const int nx = static_cast<int>(cb.composition.size());
    int winner = -1;
    int cleared = 0;
    for (int i = 0; i < cb.num_messages; ++i) {
        const JointType t = joint_type({cb.codewords[static_cast<std::size_t>(i)], y}, {nx, num_outputs});
        const double mi = conditional_mutual_information(t, {0}, {1}, {});
        if (mi >= rate + delta) {
            ++cleared;
            if (winner == -1) winner = i;
        }
    }
    Verdict v;
    v.task = Task::Com;
    if (cleared == 1) {
        v.message = winner + 1;
    } else {
        v.message = 1;
        v.fallback = true;
        v.ambiguous = cleared > 1;
    }
    return v;
}

std::vector<int> training_sequence(int alphabet_size, int n) {
    if (n < 2) throw ModelError("training_sequence: n must be >= 2");
    int reps = 1;
    while ((1LL << reps) < n) ++reps;  // ceil(log2 n)
    std::vector<int> t;
    t.reserve(static_cast<std::size_t>(alphabet_size * reps));
    for (int x = 0; x < alphabet_size; ++x)
        for (int r = 0; r < reps; ++r) t.push_back(x);
    return t;
}

int default_training_length(int alphabet_size, int n) {
    return static_cast<int>(training_sequence(alphabet_size, n).size());
}

std::pair<TransmissionFrame, std::vector<int>> frame_encode(const std::vector<int>& codeword,
                                                            const std::vector<int>& training,
                                                            std::uint64_t seed) {
    TransmissionFrame frame;
    frame.payload_length = static_cast<int>(codeword.size());
    frame.training_length = static_cast<int>(training.size());
    const int len = frame.payload_length + frame.training_length;
    frame.permutation.resize(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) frame.permutation[static_cast<std::size_t>(i)] = i;
    CounterRng rng(seed);
    rng.shuffle(frame.permutation);

    std::vector<int> combined = codeword;
    combined.insert(combined.end(), training.begin(), training.end());
    std::vector<int> transmitted(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
        transmitted[static_cast<std::size_t>(i)] = combined[static_cast<std::size_t>(frame.permutation[static_cast<std::size_t>(i)])];
    return {std::move(frame), std::move(transmitted)};
}

std::pair<std::vector<int>, std::vector<int>> frame_decode(const std::vector<int>& received,
                                                           const TransmissionFrame& frame) {
    const int len = frame.payload_length + frame.training_length;
    if (static_cast<int>(received.size()) != len)
        throw ModelError("frame_decode: received length does not match the frame");
    std::vector<int> combined(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
        combined[static_cast<std::size_t>(frame.permutation[static_cast<std::size_t>(i)])] = received[static_cast<std::size_t>(i)];
    std::vector<int> payload(combined.begin(), combined.begin() + frame.payload_length);
    std::vector<int> training(combined.begin() + frame.payload_length, combined.end());
    return {std::move(payload), std::move(training)};
}

double hull_fit_distance(const JointType& pair_type, const CavcModel& model, int family) {
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();
    const int nf = model.family_size(family);
    const auto& fam = model.family(family);
    const Eigen::VectorXd t_flat = pair_type.normalized();
    const Eigen::VectorXd px = pair_type.marginal({0}).normalized();

    // variables: q (nf), t, slacks (2 per cell); rows: 2 nx ny + 1
    const int t_idx = nf;
    const int n_ineq = 2 * nx * ny;
    const int n_vars = nf + 1 + n_ineq;
    const int n_rows = n_ineq + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_rows, n_vars);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_vars);
    c(t_idx) = 1.0;

    int row = 0;
    int slack = t_idx + 1;
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            const double t_cell = t_flat(x * ny + y);
            for (int sign : {+1, -1}) {
                // sign * (px(x) W_q(y|x) - T(x,y)) <= t
                for (int j = 0; j < nf; ++j)
                    a(row, j) = sign * px(x) * model.kernel.prob(x, fam[static_cast<std::size_t>(j)], y);
                a(row, t_idx) = -1.0;
                a(row, slack++) = 1.0;
                b(row) = sign * t_cell;
                ++row;
            }
        }
    }
    for (int j = 0; j < nf; ++j) a(row, j) = 1.0;
    b(row) = 1.0;

    const LpResult lp = solve_lp(a, b, c);
    if (lp.status != LpStatus::Optimal) throw SolverError("hull_fit_distance: LP failed");
    return lp.objective;
}

Verdict identify_state(const std::vector<int>& training_sent,
                       const std::vector<int>& training_received, const CavcModel& model,
                       double eps) {
    if (eps <= 0.0) throw ModelError("identify_state: eps must be positive");
    if (training_sent.size() != training_received.size())
        throw ModelError("identify_state: length mismatch");
    const JointType t = joint_type({training_sent, training_received},
                                   {model.kernel.num_inputs(), model.kernel.num_outputs()});
    const double fit1 = hull_fit_distance(t, model, 1);
    const double fit2 = hull_fit_distance(t, model, 2);
    Verdict v;
    v.task = Task::Identify;
    const bool in1 = fit1 <= eps;
    const bool in2 = fit2 <= eps;
    if (in1 != in2) {
        v.state = in1 ? 1 : 2;
    } else {
        v.state = 1;  // arbitrary default
        v.fallback = true;
        v.ambiguous = true;
    }
    return v;
}

namespace {

// Per-cell scaffolding for the explanation search: positions grouped by the
// (x, y) pair they carry.
struct CellTable {
    int nx, ny, nf;
    std::vector<int> fam;                     // global state index per local j
    std::vector<std::int64_t> cell_count;     // nx*ny
    std::vector<std::vector<int>> allowed;    // per cell: local state indices with W > 0
    std::vector<double> log_w;                // log2 W(y|x,s_j) per (cell, j), -inf marks zero
    Eigen::VectorXd px;
    std::int64_t n = 0;

    int cell(int x, int y) const { return x * ny + y; }
};

CellTable build_cells(const std::vector<int>& x, const std::vector<int>& y,
                      const CavcModel& model, int family) {
    CellTable ct;
    ct.nx = model.kernel.num_inputs();
    ct.ny = model.kernel.num_outputs();
    const auto& fam = model.family(family);
    ct.nf = static_cast<int>(fam.size());
    ct.fam = fam;
    ct.n = static_cast<std::int64_t>(x.size());
    ct.cell_count.assign(static_cast<std::size_t>(ct.nx * ct.ny), 0);
    const JointType t = joint_type({x, y}, {ct.nx, ct.ny});
    for (int a = 0; a < ct.nx; ++a)
        for (int c = 0; c < ct.ny; ++c)
            ct.cell_count[static_cast<std::size_t>(ct.cell(a, c))] = t.count_at({a, c});
    ct.px = t.marginal({0}).normalized();

    ct.allowed.resize(static_cast<std::size_t>(ct.nx * ct.ny));
    ct.log_w.assign(static_cast<std::size_t>(ct.nx * ct.ny * ct.nf), -kInf);
    for (int a = 0; a < ct.nx; ++a) {
        for (int c = 0; c < ct.ny; ++c) {
            const int cell = ct.cell(a, c);
            for (int j = 0; j < ct.nf; ++j) {
                const double w = model.kernel.prob(a, fam[static_cast<std::size_t>(j)], c);
                if (w > 0.0) {
                    ct.allowed[static_cast<std::size_t>(cell)].push_back(j);
                    ct.log_w[static_cast<std::size_t>(cell * ct.nf + j)] = std::log2(w);
                }
            }
        }
    }
    return ct;
}

// Materialize a concrete state sequence from per-cell state counts: within
// each cell, positions in increasing order receive states in increasing
// local-state order.
std::vector<int> materialize(const std::vector<int>& x, const std::vector<int>& y,
                             const CellTable& ct,
                             const std::vector<std::vector<std::int64_t>>& cell_states) {
    std::vector<std::vector<std::int64_t>> remaining = cell_states;
    std::vector<int> cursor(remaining.size(), 0);
    std::vector<int> s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int cell = ct.cell(x[i], y[i]);
        auto& rem = remaining[static_cast<std::size_t>(cell)];
        int& cur = cursor[static_cast<std::size_t>(cell)];
        while (cur < ct.nf && rem[static_cast<std::size_t>(cur)] == 0) ++cur;
        s[i] = ct.fam[static_cast<std::size_t>(cur)];
        --rem[static_cast<std::size_t>(cur)];
    }
    return s;
}

double assignment_divergence(const CellTable& ct,
                             const std::vector<std::vector<std::int64_t>>& cell_states) {
    const double n = static_cast<double>(ct.n);
    std::vector<double> state_mass(static_cast<std::size_t>(ct.nf), 0.0);
    double acc = 0.0;
    for (int a = 0; a < ct.nx; ++a) {
        for (int c = 0; c < ct.ny; ++c) {
            const int cell = ct.cell(a, c);
            for (int j = 0; j < ct.nf; ++j) {
                const std::int64_t m = cell_states[static_cast<std::size_t>(cell)][static_cast<std::size_t>(j)];
                if (m == 0) continue;
                const double p = static_cast<double>(m) / n;
                state_mass[static_cast<std::size_t>(j)] += p;
                const double lw = ct.log_w[static_cast<std::size_t>(cell * ct.nf + j)];
                if (lw == -kInf) return kInf;
                acc += p * (std::log2(p) - std::log2(ct.px(a)) - lw);
            }
        }
    }
    for (double ps : state_mass)
        if (ps > 0.0) acc -= ps * std::log2(ps);
    return std::max(0.0, acc);
}

// Exhaustive search over per-cell conditional types.
bool exact_search(const CellTable& ct, std::uint64_t budget,
                  std::vector<std::vector<std::int64_t>>& best, double& best_div) {
    std::vector<int> cells;  // nonempty cells
    for (int cell = 0; cell < ct.nx * ct.ny; ++cell)
        if (ct.cell_count[static_cast<std::size_t>(cell)] > 0) cells.push_back(cell);
    // feasibility and budget
    double combos = 1.0;
    for (int cell : cells) {
        const auto& allowed = ct.allowed[static_cast<std::size_t>(cell)];
        if (allowed.empty()) {
            best_div = kInf;
            return true;  // unreachable observation; exact answer is +inf
        }
        const double cnt = static_cast<double>(ct.cell_count[static_cast<std::size_t>(cell)]);
        double cell_combos = 1.0;  // C(cnt + k - 1, k - 1)
        for (std::size_t i = 1; i < allowed.size(); ++i)
            cell_combos = cell_combos * (cnt + static_cast<double>(i)) / static_cast<double>(i);
        combos *= cell_combos;
        if (combos > static_cast<double>(budget)) return false;
    }

    std::vector<std::vector<std::int64_t>> current(
        static_cast<std::size_t>(ct.nx * ct.ny),
        std::vector<std::int64_t>(static_cast<std::size_t>(ct.nf), 0));
    best = current;
    best_div = kInf;

    std::function<void(std::size_t)> rec_cell = [&](std::size_t ci) {
        if (ci == cells.size()) {
            const double d = assignment_divergence(ct, current);
            if (d < best_div) {
                best_div = d;
                best = current;
            }
            return;
        }
        const int cell = cells[ci];
        const auto& allowed = ct.allowed[static_cast<std::size_t>(cell)];
        const std::int64_t total = ct.cell_count[static_cast<std::size_t>(cell)];
        std::function<void(std::size_t, std::int64_t)> rec_state = [&](std::size_t ai,
                                                                       std::int64_t remaining) {
            if (ai + 1 == allowed.size()) {
                current[static_cast<std::size_t>(cell)][static_cast<std::size_t>(allowed[ai])] = remaining;
                rec_cell(ci + 1);
                current[static_cast<std::size_t>(cell)][static_cast<std::size_t>(allowed[ai])] = 0;
                return;
            }
            for (std::int64_t c = 0; c <= remaining; ++c) {
                current[static_cast<std::size_t>(cell)][static_cast<std::size_t>(allowed[ai])] = c;
                rec_state(ai + 1, remaining - c);
            }
            current[static_cast<std::size_t>(cell)][static_cast<std::size_t>(allowed[ai])] = 0;
        };
        rec_state(0, total);
    };
    rec_cell(0);
    return true;
}

// Frank-Wolfe relaxation over per-cell conditional distributions.
void relaxed_search(const CellTable& ct, int iterations,
                    std::vector<std::vector<std::int64_t>>& rounded, double& rounded_div,
                    double& continuous_div) {
    const double n = static_cast<double>(ct.n);
    const int cells_total = ct.nx * ct.ny;
    // theta(j | cell), only allowed entries used
    std::vector<Eigen::VectorXd> theta(static_cast<std::size_t>(cells_total));
    bool feasible = true;
    for (int cell = 0; cell < cells_total; ++cell) {
        const auto& allowed = ct.allowed[static_cast<std::size_t>(cell)];
        theta[static_cast<std::size_t>(cell)] = Eigen::VectorXd::Zero(ct.nf);
        if (ct.cell_count[static_cast<std::size_t>(cell)] == 0) continue;
        if (allowed.empty()) {
            feasible = false;
            continue;
        }
        for (int j : allowed)
            theta[static_cast<std::size_t>(cell)](j) = 1.0 / static_cast<double>(allowed.size());
    }
    if (!feasible) {
        rounded_div = kInf;
        continuous_div = kInf;
        return;
    }

    auto objective = [&](const std::vector<Eigen::VectorXd>& th) {
        std::vector<double> state_mass(static_cast<std::size_t>(ct.nf), 0.0);
        double acc = 0.0;
        for (int cell = 0; cell < cells_total; ++cell) {
            const std::int64_t cnt = ct.cell_count[static_cast<std::size_t>(cell)];
            if (cnt == 0) continue;
            const double t_cell = static_cast<double>(cnt) / n;
            const int a = cell / ct.ny;
            for (int j : ct.allowed[static_cast<std::size_t>(cell)]) {
                const double p = t_cell * th[static_cast<std::size_t>(cell)](j);
                if (p <= 0.0) continue;
                state_mass[static_cast<std::size_t>(j)] += p;
                acc += p * (std::log2(p) - std::log2(ct.px(a)) -
                            ct.log_w[static_cast<std::size_t>(cell * ct.nf + j)]);
            }
        }
        for (double ps : state_mass)
            if (ps > 0.0) acc -= ps * std::log2(ps);
        return std::max(0.0, acc);
    };

    std::vector<Eigen::VectorXd> direction = theta;
    for (int it = 0; it < iterations; ++it) {
        // gradient wrt theta(j|cell) = T(cell) log2(P/(px ps w)); clamp zeros
        std::vector<double> state_mass(static_cast<std::size_t>(ct.nf), 0.0);
        for (int cell = 0; cell < cells_total; ++cell) {
            const std::int64_t cnt = ct.cell_count[static_cast<std::size_t>(cell)];
            if (cnt == 0) continue;
            for (int j : ct.allowed[static_cast<std::size_t>(cell)])
                state_mass[static_cast<std::size_t>(j)] +=
                    (static_cast<double>(cnt) / n) * theta[static_cast<std::size_t>(cell)](j);
        }
        // linear minimization: per cell pick the allowed state with the
        // smallest gradient entry
        double gap = 0.0;
        for (int cell = 0; cell < cells_total; ++cell) {
            const std::int64_t cnt = ct.cell_count[static_cast<std::size_t>(cell)];
            direction[static_cast<std::size_t>(cell)].setZero();
            if (cnt == 0) continue;
            const double t_cell = static_cast<double>(cnt) / n;
            const int a = cell / ct.ny;
            double g_best = kInf;
            int j_best = ct.allowed[static_cast<std::size_t>(cell)].front();
            double g_dot_theta = 0.0;
            for (int j : ct.allowed[static_cast<std::size_t>(cell)]) {
                const double p = std::max(t_cell * theta[static_cast<std::size_t>(cell)](j), 1e-300);
                const double ps = std::max(state_mass[static_cast<std::size_t>(j)], 1e-300);
                const double g = t_cell * (std::log2(p) - std::log2(ct.px(a)) -
                                           ct.log_w[static_cast<std::size_t>(cell * ct.nf + j)] -
                                           std::log2(ps));
                g_dot_theta += g * theta[static_cast<std::size_t>(cell)](j);
                if (g < g_best) {
                    g_best = g;
                    j_best = j;
                }
            }
            direction[static_cast<std::size_t>(cell)](j_best) = 1.0;
            gap += g_dot_theta - g_best;
        }
        if (gap <= 1e-9) break;
        // golden-section line search toward the direction
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        auto blend = [&](double g) {
            std::vector<Eigen::VectorXd> mixed = theta;
            for (int cell = 0; cell < cells_total; ++cell)
                if (ct.cell_count[static_cast<std::size_t>(cell)] > 0)
                    mixed[static_cast<std::size_t>(cell)] =
                        (1.0 - g) * theta[static_cast<std::size_t>(cell)] +
                        g * direction[static_cast<std::size_t>(cell)];
            return mixed;
        };
        double lo = 0.0, hi = 1.0;
        double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
        double f1 = objective(blend(x1)), f2 = objective(blend(x2));
        for (int ls = 0; ls < 40; ++ls) {
            if (f1 <= f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = objective(blend(x1));
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = objective(blend(x2));
            }
        }
        theta = blend(0.5 * (lo + hi));
    }
    continuous_div = objective(theta);

    // largest-remainder rounding to a realizable conditional type
    rounded.assign(static_cast<std::size_t>(cells_total),
                   std::vector<std::int64_t>(static_cast<std::size_t>(ct.nf), 0));
    for (int cell = 0; cell < cells_total; ++cell) {
        const std::int64_t cnt = ct.cell_count[static_cast<std::size_t>(cell)];
        if (cnt == 0) continue;
        const auto& allowed = ct.allowed[static_cast<std::size_t>(cell)];
        std::vector<std::pair<double, int>> remainders;
        std::int64_t assigned = 0;
        for (int j : allowed) {
            const double exact = theta[static_cast<std::size_t>(cell)](j) * static_cast<double>(cnt);
            const std::int64_t fl = static_cast<std::int64_t>(std::floor(exact));
            rounded[static_cast<std::size_t>(cell)][static_cast<std::size_t>(j)] = fl;
            assigned += fl;
            remainders.push_back({exact - static_cast<double>(fl), j});
        }
        std::sort(remainders.begin(), remainders.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; assigned < cnt; ++i, ++assigned)
            ++rounded[static_cast<std::size_t>(cell)][static_cast<std::size_t>(remainders[i % remainders.size()].second)];
    }
    rounded_div = assignment_divergence(ct, rounded);
}

Explanation search_one_family(const std::vector<int>& x, const std::vector<int>& y,
                              const CavcModel& model, int family,
                              const ExplanationOptions& opts) {
    const CellTable ct = build_cells(x, y, model, family);
    Explanation e;
    e.family = family;

    std::vector<std::vector<std::int64_t>> assignment;
    double div = kInf;
    bool used_exact = false;
    if (opts.mode != ExplanationMode::ConvexRelaxation) {
        used_exact = exact_search(ct, opts.enumeration_budget, assignment, div);
        if (!used_exact && opts.mode == ExplanationMode::ExactTypes)
            throw BudgetError("state_explanation_search: enumeration budget exceeded (exact mode)");
    }
    if (!used_exact) {
        double continuous = kInf;
        relaxed_search(ct, opts.fw_iterations, assignment, div, continuous);
        e.exact = false;
        e.relaxed_divergence = continuous;
    } else {
        e.exact = true;
        e.relaxed_divergence = div;
    }

    if (div == kInf) {
        e.divergence = ExtendedReal::infinity();
        return e;
    }
    e.divergence = div;
    e.state_sequence = materialize(x, y, ct, assignment);
    return e;
}

}  // namespace

Explanation state_explanation_search(const std::vector<int>& x, const std::vector<int>& y,
                                     const CavcModel& model, int family,
                                     const ExplanationOptions& opts) {
    if (x.size() != y.size() || x.empty())
        throw ModelError("state_explanation_search: bad sequence lengths");
    if (family == 1 || family == 2) return search_one_family(x, y, model, family, opts);
    if (family != 0) throw ModelError("state_explanation_search: family must be 0, 1 or 2");
    Explanation e1 = search_one_family(x, y, model, 1, opts);
    if (model.family_one == model.family_two) return e1;
    Explanation e2 = search_one_family(x, y, model, 2, opts);
    return e2.divergence < e1.divergence ? e2 : e1;
}

namespace {

// Shared candidate scan for the three joint-type decoders.
struct CandidateData {
    Explanation per_family[2];  // index k-1
    Explanation best_union;     // better of the two
};

std::vector<CandidateData> scan_candidates(const Codebook& cb, const std::vector<int>& y,
                                           const CavcModel& model, const DecodeOptions& opts) {
    std::vector<CandidateData> out(static_cast<std::size_t>(cb.num_messages));
    for (int i = 0; i < cb.num_messages; ++i) {
        auto& cd = out[static_cast<std::size_t>(i)];
        cd.per_family[0] = state_explanation_search(cb.codewords[static_cast<std::size_t>(i)], y,
                                                    model, 1, opts.explanation);
        if (model.family_one == model.family_two) {
            cd.per_family[1] = cd.per_family[0];
            cd.per_family[1].family = 2;
        } else {
            cd.per_family[1] = state_explanation_search(cb.codewords[static_cast<std::size_t>(i)],
                                                        y, model, 2, opts.explanation);
        }
        cd.best_union = cd.per_family[1].divergence < cd.per_family[0].divergence
                            ? cd.per_family[1]
                            : cd.per_family[0];
    }
    return out;
}

double rival_cmi(const Codebook& cb, const std::vector<int>& y, const CavcModel& model,
                 int candidate, int rival, const std::vector<int>& s_candidate) {
    const int nx = model.kernel.num_inputs();
    const int ns = model.kernel.num_states();
    const int ny = model.kernel.num_outputs();
    const JointType t = joint_type({cb.codewords[static_cast<std::size_t>(candidate)],
                                    cb.codewords[static_cast<std::size_t>(rival)], s_candidate, y},
                                   {nx, nx, ns, ny});
    // I(XY; X' | S)
    return conditional_mutual_information(t, {0, 3}, {1}, {2});
}

}  // namespace

Verdict decode_and(const Codebook& cb, const std::vector<int>& y, const CavcModel& model,
                   const DecodeOptions& opts, DecodeDiagnostics* diag) {
    if (opts.eta <= 0.0) throw ModelError("decode_and: eta must be positive");
    const auto cand = scan_candidates(cb, y, model, opts);

    std::vector<int> rivals;  // messages with an explanation in either family
    for (int j = 0; j < cb.num_messages; ++j)
        if (cand[static_cast<std::size_t>(j)].best_union.divergence <= ExtendedReal(opts.eta))
            rivals.push_back(j);

    std::vector<DecodeDiagnostics::Candidate> satisfying;
    for (int i = 0; i < cb.num_messages; ++i) {
        for (int k = 1; k <= 2; ++k) {
            const Explanation& e = cand[static_cast<std::size_t>(i)].per_family[k - 1];
            if (!(e.divergence <= ExtendedReal(opts.eta))) continue;
            bool ok = true;
            for (int j : rivals) {
                if (j == i) continue;
                if (rival_cmi(cb, y, model, i, j, e.state_sequence) > opts.eta) {
                    ok = false;
                    break;
                }
            }
            if (ok) satisfying.push_back({i + 1, k, e.divergence.value()});
        }
    }

    if (diag) {
        diag->satisfying = satisfying;
        diag->num_satisfying = static_cast<int>(satisfying.size());
    }
    Verdict v;
    v.task = Task::And;
    if (satisfying.size() == 1) {
        v.message = satisfying[0].message;
        v.state = satisfying[0].state;
    } else {
        v.message = 1;
        v.state = 1;
        v.fallback = true;
        v.ambiguous = satisfying.size() > 1;
    }
    return v;
}

Verdict decode_com(const Codebook& cb, const std::vector<int>& y, const CavcModel& model,
                   const DecodeOptions& opts, DecodeDiagnostics* diag) {
    if (opts.eta <= 0.0) throw ModelError("decode_com: eta must be positive");
    const auto cand = scan_candidates(cb, y, model, opts);

    std::vector<int> rivals;
    for (int j = 0; j < cb.num_messages; ++j)
        if (cand[static_cast<std::size_t>(j)].best_union.divergence <= ExtendedReal(opts.eta))
            rivals.push_back(j);

    std::vector<DecodeDiagnostics::Candidate> satisfying;
    for (int i = 0; i < cb.num_messages; ++i) {
        const Explanation& e = cand[static_cast<std::size_t>(i)].best_union;
        if (!(e.divergence <= ExtendedReal(opts.eta))) continue;
        bool ok = true;
        for (int j : rivals) {
            if (j == i) continue;
            if (rival_cmi(cb, y, model, i, j, e.state_sequence) > opts.eta) {
                ok = false;
                break;
            }
        }
        if (ok) satisfying.push_back({i + 1, 0, e.divergence.value()});
    }

    if (diag) {
        diag->satisfying = satisfying;
        diag->num_satisfying = static_cast<int>(satisfying.size());
    }
    Verdict v;
    v.task = Task::Com;
    if (satisfying.size() == 1) {
        v.message = satisfying[0].message;
    } else {
        v.message = 1;
        v.fallback = true;
        v.ambiguous = satisfying.size() > 1;
    }
    return v;
}

Verdict decode_or(const Codebook& cb, const std::vector<int>& y, const CavcModel& model,
                  const DecodeOptions& opts, DecodeDiagnostics* diag) {
    if (opts.eta <= 0.0) throw ModelError("decode_or: eta must be positive");
    const auto cand = scan_candidates(cb, y, model, opts);

    // rivals_k: messages with an explanation inside family k
    std::vector<int> rivals_of[2];
    for (int j = 0; j < cb.num_messages; ++j)
        for (int k = 1; k <= 2; ++k)
            if (cand[static_cast<std::size_t>(j)].per_family[k - 1].divergence <= ExtendedReal(opts.eta))
                rivals_of[k - 1].push_back(j);

    std::set<int> b_sets[2];
    std::vector<DecodeDiagnostics::Candidate> satisfying;
    for (int k = 1; k <= 2; ++k) {
        for (int m = 0; m < cb.num_messages; ++m) {
            const Explanation& e = cand[static_cast<std::size_t>(m)].per_family[k - 1];
            if (!(e.divergence <= ExtendedReal(opts.eta))) continue;
            bool ok = true;
            // rivals restricted to the opposite family's explanations
            for (int j : rivals_of[2 - k]) {
                if (j == m) continue;
                if (rival_cmi(cb, y, model, m, j, e.state_sequence) > opts.eta) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                b_sets[k - 1].insert(m);
                satisfying.push_back({m + 1, k, e.divergence.value()});
            }
        }
    }

    if (diag) {
        diag->satisfying = satisfying;
        diag->num_satisfying = static_cast<int>(b_sets[0].size() + b_sets[1].size());
    }
    Verdict v;
    v.task = Task::Or;
    if (b_sets[0].size() == 1 && b_sets[1] == b_sets[0]) {
        v.message = *b_sets[0].begin() + 1;
    } else if (b_sets[0].empty() && !b_sets[1].empty()) {
        v.state = 2;
    } else if (b_sets[1].empty() && !b_sets[0].empty()) {
        v.state = 1;
    } else {
        // configuration outside the decoder's case split; fall back flagged
        v.state = 1;
        v.fallback = true;
        v.ambiguous = true;
    }
    return v;
}

NiceCodeReport verify_nice_code(const Codebook& cb, const CavcModel& model, double eps,
                                std::uint64_t probe_budget) {
    const int nx = model.kernel.num_inputs();
    const int ns = model.kernel.num_states();
    const int n = cb.n;
    const int big_m = cb.num_messages;
    NiceCodeReport rep;
    rep.eps = eps;
    rep.rate = cb.rate();

    // candidate probe spaces
    const double x_space = std::pow(static_cast<double>(nx), n);
    const double s_space = std::pow(static_cast<double>(model.family_size(1)), n) +
                           std::pow(static_cast<double>(model.family_size(2)), n);
    rep.exhaustive = x_space * s_space <= static_cast<double>(probe_budget);

    auto x_type_key = [&](const JointType& t) {
        return t.counts();  // counts vector as map key
    };

    auto probe = [&](const std::vector<int>& x, const std::vector<int>& s) {
        ++rep.probes;
        // bound 1: group codewords by joint type of (x, x_j, s)
        std::map<std::vector<std::int64_t>, std::pair<std::int64_t, double>> groups1;
        for (int j = 0; j < big_m; ++j) {
            const JointType t = joint_type({x, cb.codewords[static_cast<std::size_t>(j)], s},
                                           {nx, nx, ns});
            auto [it, inserted] = groups1.try_emplace(x_type_key(t), std::make_pair(0, 0.0));
            if (inserted) {
                // I(X'; X S) from the type, axes 0=X,1=X',2=S
                it->second.second = conditional_mutual_information(t, {1}, {0, 2}, {});
            }
            ++it->second.first;
        }
        for (const auto& [key, val] : groups1) {
            const double threshold = n * (std::max(0.0, rep.rate - val.second) + eps);
            const double slack = std::log2(static_cast<double>(val.first)) - threshold;
            ++rep.bound1.gated;
            rep.bound1.worst_slack_log2 = std::max(rep.bound1.worst_slack_log2, slack);
            if (slack > 1e-9) ++rep.bound1.violations;
        }
        // bound 2: group codewords by joint type of (x_i, s)
        std::map<std::vector<std::int64_t>, std::pair<std::int64_t, double>> groups2;
        for (int i = 0; i < big_m; ++i) {
            const JointType t = joint_type({cb.codewords[static_cast<std::size_t>(i)], s}, {nx, ns});
            auto [it, inserted] = groups2.try_emplace(x_type_key(t), std::make_pair(0, 0.0));
            if (inserted) it->second.second = conditional_mutual_information(t, {0}, {1}, {});
            ++it->second.first;
        }
        for (const auto& [key, val] : groups2) {
            if (val.second <= eps) continue;  // gate I(X;S) > eps
            ++rep.bound2.gated;
            const double slack = std::log2(static_cast<double>(val.first) / big_m) + n * eps / 2.0;
            rep.bound2.worst_slack_log2 = std::max(rep.bound2.worst_slack_log2, slack);
            if (slack > 1e-9) ++rep.bound2.violations;
        }
        // bound 3: per pair type of (x_i, x_j, s), count i's having such a j
        std::map<std::vector<std::int64_t>, std::set<int>> groups3;
        std::map<std::vector<std::int64_t>, std::pair<double, double>> info3;  // I(X;X'S), I(X';S)
        for (int i = 0; i < big_m; ++i) {
            for (int j = 0; j < big_m; ++j) {
                if (i == j) continue;
                const JointType t = joint_type({cb.codewords[static_cast<std::size_t>(i)],
                                                cb.codewords[static_cast<std::size_t>(j)], s},
                                               {nx, nx, ns});
                auto key = x_type_key(t);
                auto [it, inserted] = info3.try_emplace(key, std::make_pair(0.0, 0.0));
                if (inserted) {
                    it->second.first = conditional_mutual_information(t, {0}, {1, 2}, {});
                    it->second.second = conditional_mutual_information(t, {1}, {2}, {});
                }
                groups3[key].insert(i);
            }
        }
        for (const auto& [key, iset] : groups3) {
            const auto& info = info3[key];
            if (info.first - std::max(0.0, rep.rate - info.second) <= eps) continue;
            ++rep.bound3.gated;
            const double slack =
                std::log2(static_cast<double>(iset.size()) / big_m) + n * eps / 2.0;
            rep.bound3.worst_slack_log2 = std::max(rep.bound3.worst_slack_log2, slack);
            if (slack > 1e-9) ++rep.bound3.violations;
        }
    };

    if (rep.exhaustive) {
        std::vector<int> x(static_cast<std::size_t>(n), 0);
        std::vector<int> s(static_cast<std::size_t>(n), 0);
        std::function<void(int)> rec_s = [&](int fam_k) {
            const auto& fam = model.family(fam_k);
            std::function<void(int)> rec = [&](int pos) {
                if (pos == n) {
                    probe(x, s);
                    return;
                }
                for (int j : fam) {
                    s[static_cast<std::size_t>(pos)] = j;
                    rec(pos + 1);
                }
            };
            rec(0);
        };
        std::function<void(int)> rec_x = [&](int pos) {
            if (pos == n) {
                rec_s(1);
                if (model.family_one != model.family_two) rec_s(2);
                return;
            }
            for (int a = 0; a < nx; ++a) {
                x[static_cast<std::size_t>(pos)] = a;
                rec_x(pos + 1);
            }
        };
        rec_x(0);
    } else {
        CounterRng rng(derive_seed(cb.seed, 0x91CE11ULL));
        const std::int64_t samples = static_cast<std::int64_t>(probe_budget);
        for (std::int64_t i = 0; i < samples; ++i) {
            std::vector<int> x(static_cast<std::size_t>(n));
            std::vector<int> s(static_cast<std::size_t>(n));
            for (int p = 0; p < n; ++p) x[static_cast<std::size_t>(p)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(nx)));
            const int fam_k = rng.next_below(2) == 0 ? 1 : 2;
            const auto& fam = model.family(fam_k);
            for (int p = 0; p < n; ++p)
                s[static_cast<std::size_t>(p)] = fam[rng.next_below(fam.size())];
            probe(x, s);
        }
    }
    return rep;
}

}  // namespace cavc

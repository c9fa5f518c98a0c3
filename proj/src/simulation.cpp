#include "cavc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cavc/errors.hpp"
#include "cavc/info.hpp"
#include "cavc/rng.hpp"

namespace cavc {

namespace {

constexpr std::uint64_t kCodebookStream = 0xC0DEB00CULL;
constexpr std::uint64_t kMessageStream = 2;
constexpr std::uint64_t kAttackStream = 3;
constexpr std::uint64_t kChannelStream = 4;
constexpr std::uint64_t kFrameStream = 5;

Eigen::VectorXd resolved_composition(const ExperimentConfig& cfg, int nx, int n) {
    if (cfg.composition.size() > 0) return cfg.composition;
    // uniform composition; requires n divisible by |X| for exactness
    if (n % nx != 0)
        throw ModelError("simulation: blocklength " + std::to_string(n) +
                         " is not a multiple of the input alphabet size");
    return Eigen::VectorXd::Constant(nx, 1.0 / nx);
}

bool attack_applicable(const AttackStrategy& a, const CavcModel& model, int k) {
    switch (a.kind) {
        case AttackStrategy::Kind::Iid:
        case AttackStrategy::Kind::Emulation:
            return (k == 1 ? a.q1.size() : a.q2.size()) ==
                   static_cast<Eigen::Index>(model.family(k).size());
        case AttackStrategy::Kind::Cis:
            return a.cis_family == k;
        case AttackStrategy::Kind::Trans:
        case AttackStrategy::Kind::WorstCase:
            return true;
    }
    return false;
}

}  // namespace

int derive_num_messages(const ExperimentConfig& cfg) {
    if (cfg.num_messages > 0) return cfg.num_messages;
    if (cfg.rate <= 0.0 || cfg.n <= 0)
        throw ModelError("simulation: need num_messages or a positive rate");
    const double m = std::ceil(std::exp2(cfg.n * cfg.rate));
    if (m > 4e6) throw BudgetError("simulation: derived message count exceeds 4e6");
    return std::max(1, static_cast<int>(m));
}

int resolved_training_length(const ExperimentConfig& cfg, int alphabet_size) {
    if (cfg.training_length >= 0) return cfg.training_length;
    return default_training_length(alphabet_size, std::max(2, cfg.n));
}

std::pair<double, double> wilson_interval(int successes, int trials) {
    if (trials == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

struct TrialPipeline {
    const CavcModel& model;
    const ExperimentConfig& cfg;
    int num_messages;
    int training_length;
    Codebook fixed_codebook;  // used when !fresh_codebook

    TrialPipeline(const CavcModel& m, const ExperimentConfig& c)
        : model(m), cfg(c), num_messages(derive_num_messages_or_identify(c)) {
        training_length = resolved_training_length(cfg, model.kernel.num_inputs());
        if (!cfg.fresh_codebook && cfg.task != Task::Identify) {
            const Eigen::VectorXd comp = resolved_composition(cfg, model.kernel.num_inputs(), cfg.n);
            fixed_codebook = generate_codebook(comp, cfg.n, num_messages,
                                               derive_seed(cfg.master_seed, kCodebookStream));
        }
    }

    static int derive_num_messages_or_identify(const ExperimentConfig& c) {
        if (c.task == Task::Identify) return 1;
        return derive_num_messages(c);
    }

    // Training block of exactly training_length symbols: equal runs of each
    // input symbol, remainder filled cyclically.
    std::vector<int> training_block() const {
        std::vector<int> train(static_cast<std::size_t>(training_length));
        const int nx = model.kernel.num_inputs();
        const int reps = training_length / nx;
        int pos = 0;
        for (int x = 0; x < nx; ++x)
            for (int r = 0; r < reps && pos < training_length; ++r)
                train[static_cast<std::size_t>(pos++)] = x;
        while (pos < training_length) {
            train[static_cast<std::size_t>(pos)] = pos % nx;
            ++pos;
        }
        return train;
    }

    // One Monte Carlo trial; returns the error indicator.
    bool run_one(int k, std::uint64_t trial_seed) const {
        CounterRng pick(derive_seed(trial_seed, kMessageStream));
        const std::vector<int> train = training_length > 0 ? training_block() : std::vector<int>{};

        if (cfg.task == Task::Identify) {
            const std::vector<int> s = sample_attack_states(
                cfg.attack, model, fixed_codebook, k, -1, training_length,
                derive_seed(trial_seed, kAttackStream));
            const std::vector<int> y = channel_sample(model.kernel, train, s,
                                                      derive_seed(trial_seed, kChannelStream));
            const Verdict v = identify_state(train, y, model, cfg.decoder.eps);
            return is_error(v, Task::Identify, 0, k);
        }

        Codebook cb;
        const Codebook* cbp;
        if (cfg.fresh_codebook) {
            const Eigen::VectorXd comp = resolved_composition(cfg, model.kernel.num_inputs(), cfg.n);
            cb = generate_codebook(comp, cfg.n, num_messages,
                                   derive_seed(trial_seed, kCodebookStream));
            cbp = &cb;
        } else {
            cbp = &fixed_codebook;
        }
        const int m = static_cast<int>(pick.next_below(static_cast<std::uint64_t>(num_messages)));

        std::vector<int> transmitted;
        TransmissionFrame frame;
        if (cfg.use_frame) {
            auto [f, tx] = frame_encode(cbp->codewords[static_cast<std::size_t>(m)], train,
                                        derive_seed(trial_seed, kFrameStream));
            frame = std::move(f);
            transmitted = std::move(tx);
        } else {
            transmitted = cbp->codewords[static_cast<std::size_t>(m)];
        }

        const std::vector<int> s =
            sample_attack_states(cfg.attack, model, *cbp, k, m,
                                 static_cast<int>(transmitted.size()),
                                 derive_seed(trial_seed, kAttackStream));
        const std::vector<int> y = channel_sample(model.kernel, transmitted, s,
                                                  derive_seed(trial_seed, kChannelStream));

        Verdict v;
        const int ny = model.kernel.num_outputs();
        const double rate = cbp->rate();
        if (cfg.use_frame) {
            auto [payload, tail] = frame_decode(y, frame);
            switch (cfg.decoder.kind) {
                case DecoderKind::Mmi:
                case DecoderKind::MmiIdentify: {
                    const Verdict pv = mmi_decode(*cbp, payload, ny, rate, cfg.decoder.delta);
                    if (cfg.task == Task::And) {
                        const Verdict iv = identify_state(train, tail, model, cfg.decoder.eps);
                        v.task = Task::And;
                        v.message = pv.message;
                        v.state = iv.state;
                    } else if (cfg.task == Task::Or) {
                        v.task = Task::Or;
                        if (!pv.fallback) {
                            v.message = pv.message;
                        } else {
                            const Verdict iv = identify_state(train, tail, model, cfg.decoder.eps);
                            v.state = iv.state;
                        }
                    } else {
                        v = pv;
                    }
                    break;
                }
                case DecoderKind::Joint: {
                    DecodeOptions o;
                    o.eta = cfg.decoder.eta;
                    v = cfg.task == Task::And   ? decode_and(*cbp, payload, model, o)
                        : cfg.task == Task::Or  ? decode_or(*cbp, payload, model, o)
                                                : decode_com(*cbp, payload, model, o);
                    break;
                }
            }
        } else {
            switch (cfg.decoder.kind) {
                case DecoderKind::Mmi:
                case DecoderKind::MmiIdentify:
                    v = mmi_decode(*cbp, y, ny, rate, cfg.decoder.delta);
                    break;
                case DecoderKind::Joint: {
                    DecodeOptions o;
                    o.eta = cfg.decoder.eta;
                    v = cfg.task == Task::And   ? decode_and(*cbp, y, model, o)
                        : cfg.task == Task::Or  ? decode_or(*cbp, y, model, o)
                                                : decode_com(*cbp, y, model, o);
                    break;
                }
            }
        }
        return is_error(v, cfg.task, m + 1, k);
    }
};

}  // namespace

ErrorEstimate run_trials(const CavcModel& model, const ExperimentConfig& cfg) {
    if (cfg.mode == EvalMode::Exact) return exact_error(model, cfg);
    if (cfg.trials < 1) throw ModelError("run_trials: trials must be >= 1");
    TrialPipeline pipe(model, cfg);

    ErrorEstimate est;
    for (int k = 1; k <= 2; ++k) {
        ArmEstimate& arm = est.per_state[static_cast<std::size_t>(k - 1)];
        if (!attack_applicable(cfg.attack, model, k)) {
            arm.applicable = false;
            continue;
        }
        const std::uint64_t arm_key = derive_seed(cfg.master_seed, 1000 + static_cast<std::uint64_t>(k));
        int errors = 0;
        for (int t = 0; t < cfg.trials; ++t)
            errors += pipe.run_one(k, derive_seed(arm_key, static_cast<std::uint64_t>(t))) ? 1 : 0;
        arm.trials = cfg.trials;
        arm.estimate = static_cast<double>(errors) / cfg.trials;
        std::tie(arm.ci_low, arm.ci_high) = wilson_interval(errors, cfg.trials);
        est.total_trials += cfg.trials;
    }
    const auto& a1 = est.per_state[0];
    const auto& a2 = est.per_state[1];
    const ArmEstimate& head = (!a2.applicable || (a1.applicable && a1.estimate >= a2.estimate)) ? a1 : a2;
    est.estimate = head.estimate;
    est.ci_low = head.ci_low;
    est.ci_high = head.ci_high;
    est.exact = false;
    return est;
}

ErrorEstimate exact_error(const CavcModel& model, const ExperimentConfig& cfg) {
    if (cfg.use_frame)
        throw ModelError("exact_error: frame permutations cannot be enumerated exactly");
    if (cfg.task == Task::Identify)
        throw ModelError("exact_error: identify runs are Monte Carlo only");
    const int n = cfg.n;
    const int ny = model.kernel.num_outputs();
    const double y_space = std::pow(static_cast<double>(ny), n);
    if (y_space > 1e7) throw BudgetError("exact_error: |Y|^n exceeds the enumeration budget");

    const int num_messages = derive_num_messages(cfg);
    const Eigen::VectorXd comp = resolved_composition(cfg, model.kernel.num_inputs(), n);
    const Codebook cb = generate_codebook(comp, n, num_messages,
                                          derive_seed(cfg.master_seed, kCodebookStream));

    const double rate = cb.rate();
    DecoderFn decoder;
    switch (cfg.decoder.kind) {
        case DecoderKind::Mmi:
        case DecoderKind::MmiIdentify:
            decoder = [&](const std::vector<int>& y) {
                return mmi_decode(cb, y, ny, rate, cfg.decoder.delta);
            };
            break;
        case DecoderKind::Joint:
            decoder = [&](const std::vector<int>& y) {
                DecodeOptions o;
                o.eta = cfg.decoder.eta;
                switch (cfg.task) {
                    case Task::And: return decode_and(cb, y, model, o);
                    case Task::Or: return decode_or(cb, y, model, o);
                    default: return decode_com(cb, y, model, o);
                }
            };
            break;
    }

    ErrorEstimate est;
    est.exact = true;

    if (cfg.attack.kind == AttackStrategy::Kind::WorstCase) {
        for (int k = 1; k <= 2; ++k) {
            const WorstCaseReport wc = exhaustive_worst_case(model, cb, decoder, cfg.task, k);
            ArmEstimate& arm = est.per_state[static_cast<std::size_t>(k - 1)];
            arm.estimate = wc.error;
            arm.ci_low = arm.ci_high = wc.error;
        }
    } else if (cfg.attack.kind == AttackStrategy::Kind::Cis ||
               cfg.attack.kind == AttackStrategy::Kind::Trans) {
        const AveragingAttackReport rep =
            averaging_attack_error_bound(model, cb, cfg.attack.witness, cfg.task, decoder);
        est.per_state[0].applicable = rep.error_family1 >= 0.0;
        est.per_state[1].applicable = rep.error_family2 >= 0.0;
        if (est.per_state[0].applicable) {
            est.per_state[0].estimate = rep.error_family1;
            est.per_state[0].ci_low = est.per_state[0].ci_high = rep.error_family1;
        }
        if (est.per_state[1].applicable) {
            est.per_state[1].estimate = rep.error_family2;
            est.per_state[1].ci_low = est.per_state[1].ci_high = rep.error_family2;
        }
    } else {
        const std::vector<Verdict> verdicts = decode_all_outputs(ny, n, decoder);
        for (int k = 1; k <= 2; ++k) {
            ArmEstimate& arm = est.per_state[static_cast<std::size_t>(k - 1)];
            if (!attack_applicable(cfg.attack, model, k)) {
                arm.applicable = false;
                continue;
            }
            const Eigen::VectorXd& q = k == 1 ? cfg.attack.q1 : cfg.attack.q2;
            const Eigen::MatrixXd w_eff = family_mixture(model, k, q);
            double total = 0.0;
            for (int m = 0; m < num_messages; ++m) {
                // product-channel mass of the error set
                std::vector<int> y(static_cast<std::size_t>(n), 0);
                std::size_t index = 0;
                while (true) {
                    double p = 1.0;
                    for (int i = 0; i < n && p > 0.0; ++i)
                        p *= w_eff(cb.codewords[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)],
                                   y[static_cast<std::size_t>(i)]);
                    if (p > 0.0 && is_error(verdicts[index], cfg.task, m + 1, k)) total += p;
                    int pos = n - 1;
                    while (pos >= 0) {
                        if (++y[static_cast<std::size_t>(pos)] < ny) break;
                        y[static_cast<std::size_t>(pos)] = 0;
                        --pos;
                    }
                    if (pos < 0) break;
                    index = 0;
                    for (int i = 0; i < n; ++i)
                        index = index * static_cast<std::size_t>(ny) + static_cast<std::size_t>(y[static_cast<std::size_t>(i)]);
                }
            }
            arm.estimate = total / num_messages;
            arm.ci_low = arm.ci_high = arm.estimate;
        }
    }

    const auto& a1 = est.per_state[0];
    const auto& a2 = est.per_state[1];
    const ArmEstimate& head = (!a2.applicable || (a1.applicable && a1.estimate >= a2.estimate)) ? a1 : a2;
    est.estimate = head.estimate;
    est.ci_low = head.ci_low;
    est.ci_high = head.ci_high;
    return est;
}

std::vector<TrendRow> error_vs_n(const CavcModel& model, const ExperimentConfig& cfg,
                                 const std::vector<int>& n_list) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw ModelError("error_vs_n: n list must increase");
    std::vector<TrendRow> rows;
    for (int n : n_list) {
        ExperimentConfig c = cfg;
        c.n = n;
        TrendRow row;
        row.n = n;
        row.num_messages = derive_num_messages(c);
        c.num_messages = row.num_messages;
        row.rate = std::log2(static_cast<double>(row.num_messages)) / n;
        row.estimate = run_trials(model, c);
        rows.push_back(std::move(row));
    }
    return rows;
}

UrnCheckResult urn_concentration_check(int population, int whites, int draws, double t, int trials,
                                       std::uint64_t seed) {
    if (draws > population || whites > population || trials < 1)
        throw ModelError("urn_concentration_check: bad parameters");
    UrnCheckResult res;
    res.bound = 2.0 * std::exp(-2.0 * t * t * draws);
    res.degenerate = t <= 0.0 || draws == population;
    const double mean = static_cast<double>(draws) * whites / population;

    std::vector<int> urn(static_cast<std::size_t>(population), 0);
    for (int i = 0; i < whites; ++i) urn[static_cast<std::size_t>(i)] = 1;
    int tail = 0;
    for (int trial = 0; trial < trials; ++trial) {
        CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
        // partial Fisher-Yates: first `draws` entries form the sample
        std::vector<int> u = urn;
        int count = 0;
        for (int i = 0; i < draws; ++i) {
            const std::size_t j = static_cast<std::size_t>(i) +
                                  static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(population - i)));
            std::swap(u[static_cast<std::size_t>(i)], u[j]);
            count += u[static_cast<std::size_t>(i)];
        }
        if (std::abs(count - mean) >= t * draws) ++tail;
    }
    res.empirical_tail = static_cast<double>(tail) / trials;
    const double b = std::min(1.0, res.bound);
    const double var = std::max(b * (1.0 - b), res.empirical_tail * (1.0 - res.empirical_tail));
    res.slack = 3.0 * std::sqrt(var / trials) + 2.0 / trials;
    res.pass = res.degenerate || res.empirical_tail <= res.bound + res.slack;
    return res;
}

SplitCheckResult permutation_split_check(const CavcModel& model, int payload_length,
                                         int training_length, const std::vector<int>& s_full,
                                         double eta, int trials, std::uint64_t seed) {
    const int len = payload_length + training_length;
    if (static_cast<int>(s_full.size()) != len)
        throw ModelError("permutation_split_check: state sequence length mismatch");
    // the full-sequence type, over the global state alphabet
    const int ns = model.kernel.num_states();
    std::vector<double> full_type(static_cast<std::size_t>(ns), 0.0);
    for (int s : s_full) full_type[static_cast<std::size_t>(s)] += 1.0 / len;

    const int max_family = std::max(model.family_size(1), model.family_size(2));
    SplitCheckResult res;
    res.payload_bound = std::min(1.0, 2.0 * max_family * std::exp(-2.0 * eta * eta * payload_length));
    res.training_bound = std::min(1.0, 2.0 * max_family *
                                            std::pow(static_cast<double>(payload_length),
                                                     -2.0 * eta * eta * model.kernel.num_inputs()));

    auto deviates = [&](const std::vector<int>& part) {
        std::vector<double> type(static_cast<std::size_t>(ns), 0.0);
        for (int s : part) type[static_cast<std::size_t>(s)] += 1.0 / static_cast<double>(part.size());
        for (int s = 0; s < ns; ++s)
            if (std::abs(type[static_cast<std::size_t>(s)] - full_type[static_cast<std::size_t>(s)]) > eta)
                return true;
        return false;
    };

    int payload_tail = 0, training_tail = 0;
    std::vector<int> dummy_codeword(static_cast<std::size_t>(payload_length), 0);
    std::vector<int> dummy_training(static_cast<std::size_t>(training_length), 0);
    for (int trial = 0; trial < trials; ++trial) {
        auto [frame, tx] = frame_encode(dummy_codeword, dummy_training,
                                        derive_seed(seed, static_cast<std::uint64_t>(trial)));
        auto [s_payload, s_training] = frame_decode(s_full, frame);
        if (deviates(s_payload)) ++payload_tail;
        if (training_length > 0 && deviates(s_training)) ++training_tail;
    }
    res.payload_tail = static_cast<double>(payload_tail) / trials;
    res.training_tail = static_cast<double>(training_tail) / trials;
    auto slack = [&](double bound, double emp) {
        const double var = std::max(bound * (1.0 - bound), emp * (1.0 - emp));
        return 3.0 * std::sqrt(var / trials) + 2.0 / trials;
    };
    res.pass = res.payload_tail <= res.payload_bound + slack(res.payload_bound, res.payload_tail) &&
               res.training_tail <= res.training_bound + slack(res.training_bound, res.training_tail);
    return res;
}

Lb1CheckResult lb1_empirical_check(const CavcModel& model, const Eigen::VectorXd& composition,
                                   const std::vector<int>& s, double eps, int trials,
                                   double max_failure_rate, std::uint64_t seed) {
    const int n = static_cast<int>(s.size());
    const int nx = model.kernel.num_inputs();
    const int ny = model.kernel.num_outputs();

    // occurrence-weighted mixture of the state channels
    Eigen::MatrixXd z_tilde = Eigen::MatrixXd::Zero(nx, ny);
    for (int i = 0; i < n; ++i) z_tilde += model.kernel.state_matrix(s[static_cast<std::size_t>(i)]);
    z_tilde /= n;

    // base multiset for uniform type-class sampling
    std::vector<int> base;
    for (int x = 0; x < nx; ++x) {
        const long long cnt = std::llround(composition(x) * n);
        for (long long i = 0; i < cnt; ++i) base.push_back(x);
    }
    if (static_cast<int>(base.size()) != n)
        throw ModelError("lb1_empirical_check: composition not realizable at this n");

    Eigen::VectorXd target(static_cast<Eigen::Index>(nx * ny));
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) target(x * ny + y) = composition(x) * z_tilde(x, y);

    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(trial));
        std::vector<int> x = base;
        CounterRng rng(derive_seed(ts, 1));
        rng.shuffle(x);
        const std::vector<int> y = channel_sample(model.kernel, x, s, derive_seed(ts, 2));
        const JointType t = joint_type({x, y}, {nx, ny});
        if (!is_typical(t, target, eps)) ++failures;
    }
    Lb1CheckResult res;
    res.trials = trials;
    res.failure_rate = static_cast<double>(failures) / trials;
    res.threshold = max_failure_rate;
    res.pass = res.failure_rate <= max_failure_rate;
    return res;
}

}  // namespace cavc

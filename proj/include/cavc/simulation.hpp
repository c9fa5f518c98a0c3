#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cavc/adversary.hpp"
#include "cavc/channel.hpp"
#include "cavc/codec.hpp"
#include "cavc/task.hpp"

namespace cavc {

enum class EvalMode { MonteCarlo, Exact };

// Which decoding pipeline a scenario runs. Joint is the joint-type decoder
// on the bare codeword; Mmi is the threshold decoder; MmiIdentify is
// the framed scheme (threshold decoding of the payload, training-based
// compound-state identification).
enum class DecoderKind { Mmi, Joint, MmiIdentify };

struct DecoderSpec {
    DecoderKind kind = DecoderKind::Mmi;
    double delta = 0.01;  // mmi threshold offset over the code rate
    double eta = 0.05;    // joint-type decoder
    double eps = 0.07;    // identification typicality radius
};

struct ExperimentConfig {
    std::string scenario_id = "scenario";
    Task task = Task::Com;
    int n = 0;              // payload blocklength (0 for identify-only runs)
    int num_messages = 0;   // 0 derives M = ceil(2^{ n * rate })
    double rate = 0.0;
    Eigen::VectorXd composition;  // empty selects the uniform composition
    AttackStrategy attack;
    DecoderSpec decoder;
    int training_length = -1;  // -1 uses |X| ceil(log2 n); 0 disables training
    bool use_frame = false;    // permute (codeword || training) before transmission
    int trials = 1000;
    std::uint64_t master_seed = 1;
    bool fresh_codebook = true;  // new codebook per trial (random-coding view)
    EvalMode mode = EvalMode::MonteCarlo;
};

struct ArmEstimate {
    double estimate = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    int trials = 0;
    bool applicable = true;  // false when the attack has no rule for this family
};

struct ErrorEstimate {
    std::array<ArmEstimate, 2> per_state;
    double estimate = 0.0;  // max over the per-state estimates
    double ci_low = 0.0, ci_high = 0.0;
    bool exact = false;
    int total_trials = 0;
};

int derive_num_messages(const ExperimentConfig& cfg);
int resolved_training_length(const ExperimentConfig& cfg, int alphabet_size);

ErrorEstimate run_trials(const CavcModel& model, const ExperimentConfig& cfg);
ErrorEstimate exact_error(const CavcModel& model, const ExperimentConfig& cfg);

struct TrendRow {
    int n = 0;
    int num_messages = 0;
    double rate = 0.0;
    ErrorEstimate estimate;
};
std::vector<TrendRow> error_vs_n(const CavcModel& model, const ExperimentConfig& cfg,
                                 const std::vector<int>& n_list);

// 95% Wilson interval.
std::pair<double, double> wilson_interval(int successes, int trials);

struct UrnCheckResult {
    double empirical_tail = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool degenerate = false;  // t = 0 or draws = population
    bool pass = false;
};
UrnCheckResult urn_concentration_check(int population, int whites, int draws, double t, int trials,
                                       std::uint64_t seed);

struct SplitCheckResult {
    double payload_tail = 0.0, payload_bound = 0.0;
    double training_tail = 0.0, training_bound = 0.0;
    bool pass = false;
};
// Tail rates of the frame-split sub-sequence types deviating from the full
// type by more than eta, against the exponential (payload) and polynomial
// (training) bounds.
SplitCheckResult permutation_split_check(const CavcModel& model, int payload_length,
                                         int training_length, const std::vector<int>& s_full,
                                         double eta, int trials, std::uint64_t seed);

struct Lb1CheckResult {
    double failure_rate = 0.0;
    int trials = 0;
    double threshold = 0.0;
    bool pass = false;
};
// Empirical joint type of (X, Y) under a fixed state sequence stays
// entrywise within eps of P_X x Z_tilde, Z_tilde the occurrence-weighted
// state mixture.
Lb1CheckResult lb1_empirical_check(const CavcModel& model, const Eigen::VectorXd& composition,
                                   const std::vector<int>& s, double eps, int trials,
                                   double max_failure_rate, std::uint64_t seed);

}  // namespace cavc

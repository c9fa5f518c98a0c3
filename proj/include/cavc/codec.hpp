#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cavc/channel.hpp"
#include "cavc/extended_real.hpp"
#include "cavc/joint_type.hpp"
#include "cavc/task.hpp"

namespace cavc {

// Constant-composition codebook: every codeword has exactly the same
// empirical type. Duplicates are allowed but flagged.
struct Codebook {
    int n = 0;
    int num_messages = 0;
    Eigen::VectorXd composition;
    std::vector<std::vector<int>> codewords;
    std::uint64_t seed = 0;
    bool has_duplicates = false;

    double rate() const { return std::log2(static_cast<double>(num_messages)) / n; }
};

// M independent uniform draws from the type class of `composition`.
Codebook generate_codebook(const Eigen::VectorXd& composition, int n, int num_messages,
                           std::uint64_t seed);

struct Verdict {
    Task task = Task::Com;
    int message = 0;  // 1-based; 0 when the verdict carries no message
    int state = 0;    // compound-state 1|2; 0 when the verdict carries no state
    bool fallback = false;
    bool ambiguous = false;
};

// Does the verdict land in the error set E_{m,k} of the task?
bool is_error(const Verdict& v, Task task, int true_message, int true_state);

// Threshold decoder: the unique i with empirical I(X;Y) >= rate + delta wins;
// none or several fall back to message 1.
Verdict mmi_decode(const Codebook& cb, const std::vector<int>& y, int num_outputs, double rate,
                   double delta);

// ceil(log2 n) repetitions of each input symbol.
std::vector<int> training_sequence(int alphabet_size, int n);
int default_training_length(int alphabet_size, int n);

struct TransmissionFrame {
    std::vector<int> permutation;  // transmitted[i] = combined[permutation[i]]
    int payload_length = 0;
    int training_length = 0;
};

// Permute (codeword || training) with a seeded uniform shuffle.
std::pair<TransmissionFrame, std::vector<int>> frame_encode(const std::vector<int>& codeword,
                                                            const std::vector<int>& training,
                                                            std::uint64_t seed);
// Undo the permutation and split into (payload part, training part). Also
// used to split state sequences along the same frame.
std::pair<std::vector<int>, std::vector<int>> frame_decode(const std::vector<int>& received,
                                                           const TransmissionFrame& frame);

// Min over family mixtures q of the max-norm misfit between the pair type
// and P_X x W_q (a linear program).
double hull_fit_distance(const JointType& pair_type, const CavcModel& model, int family);

// Family whose hull explains the training observation within eps but whose
// rival does not; ambiguous or empty cases return sigma_1 flagged.
Verdict identify_state(const std::vector<int>& training_sent,
                       const std::vector<int>& training_received, const CavcModel& model,
                       double eps);

enum class ExplanationMode { Auto, ExactTypes, ConvexRelaxation };

struct ExplanationOptions {
    ExplanationMode mode = ExplanationMode::Auto;
    std::uint64_t enumeration_budget = 2'000'000;  // exact-mode assignments
    int fw_iterations = 300;
};

// Best conditional state assignment explaining (x, y) within one family.
struct Explanation {
    ExtendedReal divergence;          // min D(P_XSY || P_X x P_S x W)
    std::vector<int> state_sequence;  // deterministic materialization
    int family = 0;
    bool exact = true;                 // exact-types search vs rounded relaxation
    double relaxed_divergence = 0.0;   // continuous optimum when relaxing
};

// family 1 or 2 searches S_k^n; family 0 returns the better of the two.
Explanation state_explanation_search(const std::vector<int>& x, const std::vector<int>& y,
                                     const CavcModel& model, int family,
                                     const ExplanationOptions& opts = {});

struct DecodeOptions {
    double eta = 0.05;
    ExplanationOptions explanation;
};

struct DecodeDiagnostics {
    struct Candidate {
        int message = 0;  // 1-based
        int state = 0;
        double divergence = 0.0;
    };
    std::vector<Candidate> satisfying;
    int num_satisfying = 0;
};

Verdict decode_and(const Codebook& cb, const std::vector<int>& y, const CavcModel& model,
                   const DecodeOptions& opts, DecodeDiagnostics* diag = nullptr);
Verdict decode_com(const Codebook& cb, const std::vector<int>& y, const CavcModel& model,
                   const DecodeOptions& opts, DecodeDiagnostics* diag = nullptr);
Verdict decode_or(const Codebook& cb, const std::vector<int>& y, const CavcModel& model,
                  const DecodeOptions& opts, DecodeDiagnostics* diag = nullptr);

// Empirical verification of the three counting bounds a capacity-achieving
// codebook must satisfy, at rate R = log2(M)/n.
struct NiceCodeBound {
    double worst_slack_log2 = -1e300;  // log2(count) - log2(threshold); <= 0 passes
    std::int64_t gated = 0;            // probes where the bound's side condition held
    std::int64_t violations = 0;
};
struct NiceCodeReport {
    bool exhaustive = false;
    std::int64_t probes = 0;
    double eps = 0.0;
    double rate = 0.0;
    NiceCodeBound bound1, bound2, bound3;
    bool all_pass() const {
        return bound1.violations == 0 && bound2.violations == 0 && bound3.violations == 0;
    }
};
NiceCodeReport verify_nice_code(const Codebook& cb, const CavcModel& model, double eps,
                                std::uint64_t probe_budget);

}  // namespace cavc

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "cavc/channel.hpp"
#include "cavc/codec.hpp"
#include "cavc/symmetry.hpp"
#include "cavc/task.hpp"

namespace cavc {

// Adversary policy. The sampler receives the active compound-state and (for
// the codeword-directed kinds) the codebook plus the index to exclude from
// spurious-message sampling; it emits a state sequence inside the active
// family's alphabet.
struct AttackStrategy {
    enum class Kind { Iid, Cis, Trans, Emulation, WorstCase };
    Kind kind = Kind::Iid;
    // family-local iid distributions; size 0 marks "no rule under this family"
    Eigen::VectorXd q1, q2;
    SymmetryWitness witness;  // cis / trans kinds
    int cis_family = 0;
};

// i.i.d. state attack from a distribution whose support lies in one family
// (or in both when the families overlap on its support).
AttackStrategy iid_attack(const CavcModel& model, const SimplexVector& p_s);

// Per-family iid pair: the adversary knows the compound-state.
AttackStrategy iid_attack_pair(const Eigen::VectorXd& q1_local, const Eigen::VectorXd& q2_local);

// Emulation attack from the closest-pair witnesses: under either
// compound-state the induced channel sits (near) the hull intersection.
AttackStrategy emulation_attack(const SeparationReport& separation);

// Codeword-directed attacks; the witness must be feasible at tol.
AttackStrategy cis_attack(const SymmetryWitness& witness, double tol);
AttackStrategy trans_attack(const SymmetryWitness& witness, double tol);

std::vector<int> sample_attack_states(const AttackStrategy& attack, const CavcModel& model,
                                      const Codebook& cb, int active_family, int exclude_message,
                                      int length, std::uint64_t seed);

// Deterministic decoder hook used by the exact evaluators.
using DecoderFn = std::function<Verdict(const std::vector<int>&)>;

// Exact averaged error under the averaging attack R(s) built from a
// symmetrizing witness, for both compound-states where the witness applies.
struct AveragingAttackReport {
    double error_family1 = 0.0;  // exact averaged error, -1 when not applicable
    double error_family2 = 0.0;
    double max_error = 0.0;
    double bound = 0.0;  // (M-1)/(2M)
    bool bound_met = false;
};
AveragingAttackReport averaging_attack_error_bound(const CavcModel& model, const Codebook& cb,
                                                   const SymmetryWitness& witness, Task task,
                                                   const DecoderFn& decoder);

// Exact maximization of the average error over all state sequences of one
// family (lexicographically first maximizer).
struct WorstCaseReport {
    std::vector<int> states;
    double error = 0.0;
};
WorstCaseReport exhaustive_worst_case(const CavcModel& model, const Codebook& cb,
                                      const DecoderFn& decoder, Task task, int family,
                                      std::uint64_t budget = 100'000'000ULL);

// All y sequences in lexicographic order with their decoded verdicts.
std::vector<Verdict> decode_all_outputs(int num_outputs, int n, const DecoderFn& decoder);

}  // namespace cavc

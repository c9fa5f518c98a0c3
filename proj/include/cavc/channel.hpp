#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "cavc/alphabet.hpp"
#include "cavc/simplex.hpp"

namespace cavc {

// Discrete memoryless channel W(y|x): rows indexed by input symbol.
class Dmc {
  public:
    Dmc(Alphabet input, Alphabet output, Eigen::MatrixXd probs);

    const Alphabet& input_alphabet() const { return input_; }
    const Alphabet& output_alphabet() const { return output_; }
    const Eigen::MatrixXd& probs() const { return probs_; }
    double prob(int x, int y) const { return probs_(x, y); }

  private:
    Alphabet input_;
    Alphabet output_;
    Eigen::MatrixXd probs_;
};

// State-parameterized kernel W(y|x,s), stored as one |X| x |Y| row-stochastic
// matrix per state. Construction rejects rows off by more than 1e-12; inputs
// are never renormalized.
class ChannelKernel {
  public:
    ChannelKernel(Alphabet input, Alphabet state, Alphabet output,
                  std::vector<Eigen::MatrixXd> per_state);

    const Alphabet& input_alphabet() const { return input_; }
    const Alphabet& state_alphabet() const { return state_; }
    const Alphabet& output_alphabet() const { return output_; }
    int num_inputs() const { return input_.size; }
    int num_states() const { return state_.size; }
    int num_outputs() const { return output_.size; }

    const Eigen::MatrixXd& state_matrix(int s) const { return per_state_[static_cast<std::size_t>(s)]; }
    double prob(int x, int s, int y) const { return per_state_[static_cast<std::size_t>(s)](x, y); }

  private:
    Alphabet input_;
    Alphabet state_;
    Alphabet output_;
    std::vector<Eigen::MatrixXd> per_state_;
};

// A kernel plus the partition of its state alphabet into the two compound
// families. Families may overlap; an AVC is the special case S1 == S2.
struct CavcModel {
    ChannelKernel kernel;
    std::vector<int> family_one;
    std::vector<int> family_two;

    const std::vector<int>& family(int k) const { return k == 1 ? family_one : family_two; }
    int family_size(int k) const { return static_cast<int>(family(k).size()); }
};

CavcModel make_model(ChannelKernel kernel, std::vector<int> family_one,
                     std::vector<int> family_two);

// W_q(y|x) = sum_s q(s) W(y|x,s). The support of q selects kernel states.
Dmc mixture_channel(const ChannelKernel& kernel, const SimplexVector& q);

// Mixture matrix for family-local weights q over model.family(k).
Eigen::MatrixXd family_mixture(const CavcModel& model, int k,
                               const Eigen::Ref<const Eigen::VectorXd>& q);

// Per-position sampling of y_i ~ W(.|x_i, s_i). Same seed, same output.
std::vector<int> channel_sample(const ChannelKernel& kernel, const std::vector<int>& x_seq,
                                const std::vector<int>& s_seq, std::uint64_t seed);

}  // namespace cavc

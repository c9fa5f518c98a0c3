#include "cavc/channel.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "cavc/errors.hpp"
#include "cavc/rng.hpp"

namespace cavc {

namespace {

void check_row_stochastic(const Eigen::MatrixXd& m, int rows, int cols, const std::string& where) {
    if (m.rows() != rows || m.cols() != cols)
        throw ModelError(where + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    for (int x = 0; x < rows; ++x) {
        double sum = 0.0;
        for (int y = 0; y < cols; ++y) {
            const double p = m(x, y);
            if (p < 0.0 || p > 1.0 + kStochasticTol)
                throw ModelError(where + ": entry (" + std::to_string(x) + "," + std::to_string(y) +
                                 ") = " + std::to_string(p) + " outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kStochasticTol)
            throw ModelError(where + ": row " + std::to_string(x) + " sums to " +
                             std::to_string(sum) + ", expected 1");
    }
}

}  // namespace

Dmc::Dmc(Alphabet input, Alphabet output, Eigen::MatrixXd probs)
    : input_(std::move(input)), output_(std::move(output)), probs_(std::move(probs)) {
    validate(input_);
    validate(output_);
    check_row_stochastic(probs_, input_.size, output_.size, "Dmc");
}

ChannelKernel::ChannelKernel(Alphabet input, Alphabet state, Alphabet output,
                             std::vector<Eigen::MatrixXd> per_state)
    : input_(std::move(input)),
      state_(std::move(state)),
      output_(std::move(output)),
      per_state_(std::move(per_state)) {
    validate(input_);
    validate(state_);
    validate(output_);
    if (static_cast<int>(per_state_.size()) != state_.size)
        throw ModelError("kernel: state matrix count does not match state alphabet size");
    for (int s = 0; s < state_.size; ++s)
        check_row_stochastic(per_state_[static_cast<std::size_t>(s)], input_.size, output_.size,
                             "kernel state " + std::to_string(s));
}

CavcModel make_model(ChannelKernel kernel, std::vector<int> family_one,
                     std::vector<int> family_two) {
    const int num_states = kernel.num_states();
    if (family_one.empty() || family_two.empty())
        throw ModelError("both compound families must be nonempty");
    std::set<int> covered;
    for (const auto* fam : {&family_one, &family_two}) {
        std::set<int> seen;
        for (int s : *fam) {
            if (s < 0 || s >= num_states)
                throw ModelError("family state index " + std::to_string(s) + " out of range");
            if (!seen.insert(s).second)
                throw ModelError("family repeats state index " + std::to_string(s));
            covered.insert(s);
        }
    }
    if (static_cast<int>(covered.size()) != num_states)
        throw ModelError("families do not cover the state alphabet");
    return CavcModel{std::move(kernel), std::move(family_one), std::move(family_two)};
}

Dmc mixture_channel(const ChannelKernel& kernel, const SimplexVector& q) {
    Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(kernel.num_inputs(), kernel.num_outputs());
    for (int i = 0; i < q.dim(); ++i) {
        const int s = q.global_index(i);
        if (s < 0 || s >= kernel.num_states())
            throw ModelError("mixture support index " + std::to_string(s) +
                             " outside the kernel's state alphabet");
        mix += q.weights()(i) * kernel.state_matrix(s);
    }
    return Dmc(kernel.input_alphabet(), kernel.output_alphabet(), std::move(mix));
}

Eigen::MatrixXd family_mixture(const CavcModel& model, int k,
                               const Eigen::Ref<const Eigen::VectorXd>& q) {
    const auto& fam = model.family(k);
    if (q.size() != static_cast<Eigen::Index>(fam.size()))
        throw ModelError("family mixture weight count does not match family size");
    Eigen::MatrixXd mix =
        Eigen::MatrixXd::Zero(model.kernel.num_inputs(), model.kernel.num_outputs());
    for (std::size_t i = 0; i < fam.size(); ++i)
        mix += q(static_cast<Eigen::Index>(i)) * model.kernel.state_matrix(fam[i]);
    return mix;
}

std::vector<int> channel_sample(const ChannelKernel& kernel, const std::vector<int>& x_seq,
                                const std::vector<int>& s_seq, std::uint64_t seed) {
    if (x_seq.size() != s_seq.size())
        throw ModelError("channel_sample: input and state sequences differ in length");
    CounterRng rng(seed);
    std::vector<int> y(x_seq.size());
    for (std::size_t i = 0; i < x_seq.size(); ++i) {
        const int x = x_seq[i];
        const int s = s_seq[i];
        if (x < 0 || x >= kernel.num_inputs()) throw ModelError("channel_sample: bad input symbol");
        if (s < 0 || s >= kernel.num_states()) throw ModelError("channel_sample: bad state symbol");
        y[i] = rng.next_categorical(kernel.state_matrix(s).row(x));
    }
    return y;
}

}  // namespace cavc

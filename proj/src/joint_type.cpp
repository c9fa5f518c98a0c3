#include "cavc/joint_type.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "cavc/errors.hpp"

namespace cavc {

namespace {

std::size_t table_size(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int d : dims) {
        if (d < 1) throw ModelError("joint type axis size must be >= 1");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

}  // namespace

JointType::JointType(std::vector<int> dims, std::vector<std::int64_t> counts)
    : dims_(std::move(dims)), counts_(std::move(counts)) {
    if (dims_.empty()) throw ModelError("joint type needs at least one axis");
    if (counts_.size() != table_size(dims_)) throw ModelError("joint type count table size mismatch");
    for (std::int64_t c : counts_) {
        if (c < 0) throw ModelError("joint type counts must be nonnegative");
        length_ += c;
    }
    if (length_ < 1) throw ModelError("joint type must contain at least one observation");
}

std::size_t JointType::flat_index(const std::vector<int>& symbols) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        const int s = symbols[a];
        if (s < 0 || s >= dims_[a]) throw ModelError("joint type symbol out of alphabet");
        idx = idx * static_cast<std::size_t>(dims_[a]) + static_cast<std::size_t>(s);
    }
    return idx;
}

std::int64_t JointType::count_at(const std::vector<int>& symbols) const {
    if (symbols.size() != dims_.size()) throw ModelError("joint type index arity mismatch");
    return counts_[flat_index(symbols)];
}

JointType JointType::marginal(const std::vector<int>& axes) const {
    for (int a : axes)
        if (a < 0 || a >= num_axes()) throw ModelError("marginal axis out of range");
    std::vector<int> mdims;
    mdims.reserve(axes.size());
    for (int a : axes) mdims.push_back(dims_[static_cast<std::size_t>(a)]);
    std::vector<std::int64_t> mcounts(table_size(mdims), 0);

    std::vector<int> symbols(dims_.size(), 0);
    for (std::size_t flat = 0; flat < counts_.size(); ++flat) {
        if (counts_[flat] != 0) {
            std::size_t idx = 0;
            for (std::size_t j = 0; j < axes.size(); ++j) {
                const int a = axes[j];
                idx = idx * static_cast<std::size_t>(mdims[j]) +
                      static_cast<std::size_t>(symbols[static_cast<std::size_t>(a)]);
            }
            mcounts[idx] += counts_[flat];
        }
        // advance the mixed-radix counter
        for (int a = num_axes() - 1; a >= 0; --a) {
            auto& s = symbols[static_cast<std::size_t>(a)];
            if (++s < dims_[static_cast<std::size_t>(a)]) break;
            s = 0;
        }
    }
    return JointType(std::move(mdims), std::move(mcounts));
}

Eigen::VectorXd JointType::normalized() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(counts_.size()));
    for (std::size_t i = 0; i < counts_.size(); ++i)
        p(static_cast<Eigen::Index>(i)) = static_cast<double>(counts_[i]) / static_cast<double>(length_);
    return p;
}

double JointType::entropy_bits_of(const std::vector<int>& axes) const {
    if (axes.empty()) return 0.0;
    const JointType m = marginal(axes);
    double h = 0.0;
    const double n = static_cast<double>(length_);
    for (std::int64_t c : m.counts()) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log2(p);
        }
    }
    return h;
}

JointType joint_type(const std::vector<std::vector<int>>& sequences,
                     const std::vector<int>& dims) {
    if (sequences.empty()) throw ModelError("joint_type: no sequences");
    if (sequences.size() != dims.size()) throw ModelError("joint_type: one axis size per sequence");
    const std::size_t n = sequences.front().size();
    if (n == 0) throw ModelError("joint_type: sequences must be nonempty");
    for (const auto& s : sequences)
        if (s.size() != n) throw ModelError("joint_type: sequence lengths differ");

    std::vector<std::int64_t> counts(table_size(dims), 0);
    std::vector<int> symbols(sequences.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < sequences.size(); ++a) {
            const int s = sequences[a][i];
            if (s < 0 || s >= dims[a]) throw ModelError("joint_type: symbol outside alphabet");
            idx = idx * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(s);
        }
        ++counts[idx];
    }
    return JointType(dims, std::move(counts));
}

double conditional_mutual_information(const JointType& t, const std::vector<int>& group_a,
                                      const std::vector<int>& group_b,
                                      const std::vector<int>& group_cond) {
    std::set<int> seen;
    for (const auto* g : {&group_a, &group_b, &group_cond})
        for (int a : *g)
            if (!seen.insert(a).second)
                throw ModelError("conditional_mutual_information: overlapping axis groups");

    auto concat = [](const std::vector<int>& u, const std::vector<int>& v) {
        std::vector<int> r = u;
        r.insert(r.end(), v.begin(), v.end());
        return r;
    };
    // I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C)
    const double h_ac = t.entropy_bits_of(concat(group_a, group_cond));
    const double h_bc = t.entropy_bits_of(concat(group_b, group_cond));
    const double h_abc = t.entropy_bits_of(concat(concat(group_a, group_b), group_cond));
    const double h_c = t.entropy_bits_of(group_cond);
    const double mi = h_ac + h_bc - h_abc - h_c;
    return mi < 0.0 ? 0.0 : mi;
}

bool is_typical(const JointType& t, const Eigen::Ref<const Eigen::VectorXd>& target, double eps) {
    if (eps < 0.0) throw ModelError("is_typical: eps must be nonnegative");
    const Eigen::VectorXd p = t.normalized();
    if (p.size() != target.size()) throw ModelError("is_typical: dimension mismatch");
    return ((p - target).cwiseAbs().maxCoeff()) <= eps;
}

}  // namespace cavc

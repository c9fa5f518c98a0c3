#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace cavc {

// Empirical joint distribution of aligned sequences, kept as integer counts
// over the product of axis alphabets (row-major flat layout, first axis
// slowest). The currency of every decoder in this project.
class JointType {
  public:
    JointType(std::vector<int> dims, std::vector<std::int64_t> counts);

    const std::vector<int>& dims() const { return dims_; }
    int num_axes() const { return static_cast<int>(dims_.size()); }
    std::int64_t length() const { return length_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

    std::int64_t count_at(const std::vector<int>& symbols) const;

    // Marginal onto the given axes (in the given order).
    JointType marginal(const std::vector<int>& axes) const;

    // Flat probability vector counts/length.
    Eigen::VectorXd normalized() const;

    // Entropy (bits) of the marginal on the given axes; empty set gives 0.
    double entropy_bits_of(const std::vector<int>& axes) const;

    std::size_t flat_index(const std::vector<int>& symbols) const;

  private:
    std::vector<int> dims_;
    std::vector<std::int64_t> counts_;
    std::int64_t length_ = 0;
};

// Empirical joint type of equal-length sequences; dims give each axis size.
JointType joint_type(const std::vector<std::vector<int>>& sequences, const std::vector<int>& dims);

// I(A;B|C) in bits computed from the type; the groups must be disjoint.
double conditional_mutual_information(const JointType& t, const std::vector<int>& group_a,
                                      const std::vector<int>& group_b,
                                      const std::vector<int>& group_cond);

// Entrywise |type - target| <= eps; target is a flat probability table over
// the same axes.
bool is_typical(const JointType& t, const Eigen::Ref<const Eigen::VectorXd>& target, double eps);

}  // namespace cavc

#pragma once

#include <Eigen/Core>

#include "cavc/channel.hpp"
#include "cavc/extended_real.hpp"
#include "cavc/simplex.hpp"

namespace cavc {

// All information measures are in bits (base-2 logs) with 0 log 0 = 0.

double entropy_bits(const Eigen::Ref<const Eigen::VectorXd>& p);

double binary_entropy(double p);

// I(X;Y) for input distribution p and channel matrix w (rows = inputs).
double mutual_information(const Eigen::Ref<const Eigen::VectorXd>& p,
                          const Eigen::Ref<const Eigen::MatrixXd>& w);

double mutual_information(const SimplexVector& p_x, const Dmc& channel);

// sum_i p_i log2(p_i / q_i); +infinity when p puts mass where q is zero.
ExtendedReal kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& p,
                           const Eigen::Ref<const Eigen::VectorXd>& q);

}  // namespace cavc

#include "cavc/info.hpp"

#include <cmath>

#include "cavc/errors.hpp"

namespace cavc {

double entropy_bits(const Eigen::Ref<const Eigen::VectorXd>& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double pi = p(i);
        if (pi > 0.0) h -= pi * std::log2(pi);
    }
    return h;
}

double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

double mutual_information(const Eigen::Ref<const Eigen::VectorXd>& p,
                          const Eigen::Ref<const Eigen::MatrixXd>& w) {
    if (p.size() != w.rows()) throw ModelError("mutual_information: dimension mismatch");
    const Eigen::VectorXd marginal = w.transpose() * p;  // output distribution
    double cond = 0.0;                                   // H(Y|X)
    for (Eigen::Index x = 0; x < w.rows(); ++x) {
        if (p(x) <= 0.0) continue;
        cond += p(x) * entropy_bits(w.row(x).transpose());
    }
    const double mi = entropy_bits(marginal) - cond;
    return mi < 0.0 ? 0.0 : mi;  // clamp float dust
}

double mutual_information(const SimplexVector& p_x, const Dmc& channel) {
    if (p_x.has_support()) throw ModelError("mutual_information: input must span the alphabet");
    return mutual_information(p_x.weights(), channel.probs());
}

ExtendedReal kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& p,
                           const Eigen::Ref<const Eigen::VectorXd>& q) {
    if (p.size() != q.size()) throw ModelError("kl_divergence: dimension mismatch");
    double d = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) <= 0.0) continue;
        if (q(i) <= 0.0) return ExtendedReal::infinity();
        d += p(i) * std::log2(p(i) / q(i));
    }
    return d < 0.0 ? 0.0 : d;
}

}  // namespace cavc

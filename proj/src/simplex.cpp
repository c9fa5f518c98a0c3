#include "cavc/simplex.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "cavc/errors.hpp"

namespace cavc {

SimplexVector::SimplexVector(Eigen::VectorXd weights, std::vector<int> support)
    : weights_(std::move(weights)), support_(std::move(support)) {
    if (weights_.size() < 1) throw ModelError("simplex vector must have dimension >= 1");
    for (int i = 0; i < weights_.size(); ++i) {
        if (weights_(i) < 0.0)
            throw ModelError("simplex vector has negative entry at index " + std::to_string(i));
    }
    const double sum = weights_.sum();
    if (std::abs(sum - 1.0) > kStochasticTol)
        throw ModelError("simplex vector sums to " + std::to_string(sum) + ", expected 1");
    if (!support_.empty()) {
        if (static_cast<int>(support_.size()) != weights_.size())
            throw ModelError("simplex support size does not match weight count");
        std::set<int> seen(support_.begin(), support_.end());
        if (seen.size() != support_.size()) throw ModelError("simplex support indices repeat");
    }
}

SimplexVector SimplexVector::uniform(int k) {
    return SimplexVector(Eigen::VectorXd::Constant(k, 1.0 / k));
}

SimplexVector SimplexVector::point_mass(int k, int index) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
    w(index) = 1.0;
    return SimplexVector(std::move(w));
}

namespace {

int grid_steps(double resolution) {
    if (!(resolution > 0.0) || resolution > 1.0)
        throw ModelError("grid resolution must lie in (0, 1]");
    return std::max(1, static_cast<int>(std::llround(1.0 / resolution)));
}

}  // namespace

std::uint64_t simplex_grid_size(int k, double resolution) {
    const int m = grid_steps(resolution);
    // C(m + k - 1, k - 1) with saturation
    std::uint64_t result = 1;
    for (int i = 1; i <= k - 1; ++i) {
        const double projected = static_cast<double>(result) * (m + i) / i;
        if (projected > 1e18) return UINT64_MAX;
        result = result * static_cast<std::uint64_t>(m + i) / static_cast<std::uint64_t>(i);
    }
    return result;
}

void for_each_simplex_grid_point(int k, double resolution,
                                 const std::function<void(const Eigen::VectorXd&)>& visit) {
    const int m = grid_steps(resolution);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    Eigen::VectorXd point(k);
    // Recursively distribute m units over k coordinates.
    std::function<void(int, int)> rec = [&](int axis, int remaining) {
        if (axis == k - 1) {
            counts[static_cast<std::size_t>(axis)] = remaining;
            for (int i = 0; i < k; ++i)
                point(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / m;
            visit(point);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(axis)] = c;
            rec(axis + 1, remaining - c);
        }
    };
    rec(0, m);
}

Eigen::MatrixXd simplex_grid_points(int k, double resolution) {
    const std::uint64_t size = simplex_grid_size(k, resolution);
    if (size > 10'000'000) throw BudgetError("simplex grid too large to materialize");
    Eigen::MatrixXd points(static_cast<Eigen::Index>(size), k);
    Eigen::Index row = 0;
    for_each_simplex_grid_point(k, resolution,
                                [&](const Eigen::VectorXd& p) { points.row(row++) = p; });
    return points;
}

}  // namespace cavc

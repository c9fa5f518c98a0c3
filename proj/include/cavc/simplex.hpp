#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace cavc {

// Probability vector over a finite index set. The optional support maps
// local coordinates into an ambient alphabet (e.g. a distribution over a
// subset of the state alphabet); an empty support means the identity map.
class SimplexVector {
  public:
    explicit SimplexVector(Eigen::VectorXd weights, std::vector<int> support = {});

    const Eigen::VectorXd& weights() const { return weights_; }
    const std::vector<int>& support() const { return support_; }
    int dim() const { return static_cast<int>(weights_.size()); }
    bool has_support() const { return !support_.empty(); }

    // Global index of local coordinate i.
    int global_index(int i) const { return support_.empty() ? i : support_[i]; }

    static SimplexVector uniform(int k);
    static SimplexVector point_mass(int k, int index);

  private:
    Eigen::VectorXd weights_;
    std::vector<int> support_;
};

// Tolerance for accepting a vector as a probability distribution.
inline constexpr double kStochasticTol = 1e-12;

// Number of grid points of the (k-1)-simplex with coordinates that are
// multiples of 1/m where m = round(1/resolution). Saturates at UINT64_MAX.
std::uint64_t simplex_grid_size(int k, double resolution);

// Visit every such grid point. The visitor receives a reusable vector.
void for_each_simplex_grid_point(int k, double resolution,
                                 const std::function<void(const Eigen::VectorXd&)>& visit);

// All grid points collected into a matrix (one point per row).
Eigen::MatrixXd simplex_grid_points(int k, double resolution);

}  // namespace cavc

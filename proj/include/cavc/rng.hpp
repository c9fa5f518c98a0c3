#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace cavc {

// SplitMix64 finalizer, used as the mixing core of the counter generator.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-task seed, e.g. derive_seed(master, trial_index).
constexpr std::uint64_t derive_seed(std::uint64_t key, std::uint64_t index) noexcept {
    return mix64(key ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

// Counter-based generator: the i-th output depends only on (key, i), so a
// fixed seed replays the exact stream regardless of call-site interleaving.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : key_(seed) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound), bound >= 1. Rejection avoids modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % bound;
    }

    // Index sampled from a probability row or column summing to 1.
    template <typename Derived>
    int next_categorical(const Eigen::MatrixBase<Derived>& probs) {
        const double u = next_double();
        double acc = 0.0;
        const int n = static_cast<int>(probs.size());
        for (int i = 0; i + 1 < n; ++i) {
            acc += probs(i);
            if (u < acc) return i;
        }
        return n - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cavc

#pragma once

#include <cstdint>
#include <random>

#include "rbmle/common.hpp"

namespace rbmle {

/// Deterministic random stream with portable derived draws.
///
/// std::mt19937_64 output is specified bit-for-bit by the standard, but the
/// standard *distributions* are not; both uniform and categorical draws are
/// therefore derived here directly from raw engine words so that a seed
/// produces the same trajectory on any platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53 random mantissa bits.
  double next_u01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Index drawn from an unnormalized nonnegative weight vector by CDF scan.
  index_t categorical(const numvec& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    require(total > 0.0, "categorical: weights must have positive sum");
    double u = next_u01() * total;
    double acc = 0.0;
    for (index_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  /// Uniform integer in [0, n).
  index_t uniform_index(index_t n) {
    require(n > 0, "uniform_index: n must be positive");
    return static_cast<index_t>(next_u01() * static_cast<double>(n));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rbmle

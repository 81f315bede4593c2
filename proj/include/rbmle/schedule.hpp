#pragma once

#include <cmath>
#include <cstdint>

#include "rbmle/common.hpp"
#include "rbmle/confidence.hpp"

namespace rbmle {

/// Bias weight alpha(t) = a log(t^b |X|^2 |U|) applied to the gain term of
/// the index objective. a is admissible for a model once it exceeds
/// |X|^3 |U| / (2 p_min Delta_min); the schedule itself never needs the
/// model's hidden quantities.
struct BiasSchedule {
  double a = 1.0;
  double b = 3.0;
  index_t num_states = 0;
  index_t num_actions = 0;

  double alpha_at(std::uint64_t t) const {
    require(t >= 1, "alpha_at: time starts at 1");
    return a * deviation_exponent(t, b, num_states, num_actions);
  }

  static double admissibility_threshold(index_t num_states,
                                        index_t num_actions, double p_min,
                                        double delta_min) {
    const double nx = static_cast<double>(num_states);
    const double nu = static_cast<double>(num_actions);
    return nx * nx * nx * nu / (2.0 * p_min * delta_min);
  }

  bool admissible_for(double p_min, double delta_min) const {
    return a >
           admissibility_threshold(num_states, num_actions, p_min, delta_min);
  }
};

/// Doubling episode grid: episode k >= 1 starts at tau_k = 2^k - 1 and lasts
/// |E_k| = 2^k steps, so consecutive starts are 1, 3, 7, 15, ...
struct EpisodeSchedule {
  static std::uint64_t start_time(index_t k) {
    require(k >= 1, "start_time: episodes are numbered from 1");
    return (std::uint64_t{1} << k) - 1;
  }

  static std::uint64_t length(index_t k) {
    require(k >= 1, "length: episodes are numbered from 1");
    return std::uint64_t{1} << k;
  }

  /// Episode index containing time t >= 1.
  static index_t episode_of(std::uint64_t t) {
    require(t >= 1, "episode_of: time starts at 1");
    index_t k = 0;
    std::uint64_t v = t + 1;
    while (v > 1) {
      v >>= 1;
      ++k;
    }
    return k;
  }

  /// ceil(log2 T): episodes needed to cover a horizon of T >= 2 steps.
  static index_t count_for_horizon(std::uint64_t T) {
    require(T >= 2, "count_for_horizon: need T >= 2");
    index_t k = 0;
    while ((std::uint64_t{1} << k) < T) ++k;
    return k;
  }
};

}  // namespace rbmle

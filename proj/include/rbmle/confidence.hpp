#pragma once

#include <cmath>
#include <vector>

#include "rbmle/common.hpp"
#include "rbmle/counts.hpp"

namespace rbmle {

/// Relative entropy between two distributions on the same alphabet, in nats.
/// Terms with p1(y) = 0 contribute nothing; p1(y) > 0 with p2(y) = 0 makes
/// the divergence infinite. Tiny negative rounding is clamped to zero.
inline double kl_row(const numvec& p1, const numvec& p2) {
  require(p1.size() == p2.size(), "kl_row: size mismatch");
  double acc = 0.0;
  for (index_t y = 0; y < p1.size(); ++y) {
    if (p1[y] <= 0.0) continue;
    if (p2[y] <= 0.0) return kInf;
    acc += p1[y] * std::log(p1[y] / p2[y]);
  }
  return acc < 0.0 ? 0.0 : acc;
}

/// log(t^b |X|^2 |U|) — the shared deviation exponent.
inline double deviation_exponent(std::uint64_t t, double b, index_t num_states,
                                 index_t num_actions) {
  return b * std::log(static_cast<double>(t)) +
         2.0 * std::log(static_cast<double>(num_states)) +
         std::log(static_cast<double>(num_actions));
}

/// Per-entry confidence radius sqrt(log(t^b |X|^2 |U|) / n(x,u)); infinite
/// for unvisited pairs.
inline double confidence_radius_d1(const TransitionCounts& counts, index_t x,
                                   index_t u, double b) {
  require(b > 2.0, "confidence_radius_d1: need b > 2");
  const std::uint64_t n = counts.visits(x, u);
  if (n == 0) return kInf;
  return std::sqrt(deviation_exponent(counts.time(), b, counts.num_states(),
                                      counts.num_actions()) /
                   static_cast<double>(n));
}

/// Box of kernels within d1 of the empirical kernel, entry by entry.
struct ConfidenceSet {
  double b = 0.0;
  std::uint64_t time = 0;
  numvec radii;  // d1 per (x,u), layout x * num_actions + u

  double radius(index_t x, index_t u, index_t num_actions) const {
    return radii[x * num_actions + u];
  }
};

inline ConfidenceSet make_confidence_set(const TransitionCounts& counts,
                                         double b) {
  ConfidenceSet set;
  set.b = b;
  set.time = counts.time();
  set.radii.resize(counts.num_states() * counts.num_actions());
  for (index_t x = 0; x < counts.num_states(); ++x)
    for (index_t u = 0; u < counts.num_actions(); ++u)
      set.radii[x * counts.num_actions() + u] =
          confidence_radius_d1(counts, x, u, b);
  return set;
}

/// Whether kernel `theta` ([x][u][y] layout) lies within d1 of the empirical
/// kernel in every entry. Rows without data never exclude anything.
inline bool in_confidence_set(const TransitionCounts& counts,
                              const numvec& theta, double b) {
  const index_t nx = counts.num_states();
  const index_t nu = counts.num_actions();
  require(theta.size() == nx * nu * nx, "in_confidence_set: size mismatch");
  for (index_t x = 0; x < nx; ++x)
    for (index_t u = 0; u < nu; ++u) {
      const std::uint64_t n = counts.visits(x, u);
      if (n == 0) continue;
      const double d1 = confidence_radius_d1(counts, x, u, b);
      const numvec row = counts.empirical_row(x, u);
      for (index_t y = 0; y < nx; ++y) {
        if (std::abs(theta[(x * nu + u) * nx + y] - row[y]) > d1) return false;
      }
    }
  return true;
}

/// Likelihood-deviation radius sqrt(alpha / (2 n)); infinite when n = 0.
inline double deviation_radius_d2(double alpha, std::uint64_t n) {
  require(alpha >= 0.0, "deviation_radius_d2: alpha must be nonnegative");
  if (n == 0) return kInf;
  return std::sqrt(alpha / (2.0 * static_cast<double>(n)));
}

}  // namespace rbmle

#pragma once

#include <cstdint>
#include <vector>

#include "rbmle/common.hpp"

namespace rbmle {

/// Online transition statistics. The clock starts at 1; each recorded
/// transition advances it, so after observing steps 1..t-1 the clock reads t
/// and the visit counts over all pairs sum to t - 1.
class TransitionCounts {
 public:
  TransitionCounts() = default;
  TransitionCounts(index_t num_states, index_t num_actions)
      : nx_(num_states),
        nu_(num_actions),
        visit_(num_states * num_actions, 0),
        trans_(num_states * num_actions * num_states, 0) {}

  index_t num_states() const { return nx_; }
  index_t num_actions() const { return nu_; }
  std::uint64_t time() const { return clock_; }

  void record_transition(index_t x, index_t u, index_t y) {
    require(x < nx_ && y < nx_ && u < nu_,
            "record_transition: index out of range");
    visit_[x * nu_ + u] += 1;
    trans_[(x * nu_ + u) * nx_ + y] += 1;
    clock_ += 1;
  }

  std::uint64_t visits(index_t x, index_t u) const {
    return visit_[x * nu_ + u];
  }
  std::uint64_t transition_count(index_t x, index_t y, index_t u) const {
    return trans_[(x * nu_ + u) * nx_ + y];
  }
  const std::vector<std::uint64_t>& visit_table() const { return visit_; }

  /// Empirical distribution of one row; all zeros when the pair is unvisited.
  numvec empirical_row(index_t x, index_t u) const {
    numvec row(nx_, 0.0);
    const std::uint64_t n = visits(x, u);
    if (n == 0) return row;
    for (index_t y = 0; y < nx_; ++y)
      row[y] = static_cast<double>(transition_count(x, y, u)) /
               static_cast<double>(n);
    return row;
  }

  /// Full empirical kernel in [x][u][y] layout.
  numvec empirical_kernel() const {
    numvec kernel(nx_ * nu_ * nx_, 0.0);
    for (index_t x = 0; x < nx_; ++x)
      for (index_t u = 0; u < nu_; ++u) {
        const numvec row = empirical_row(x, u);
        for (index_t y = 0; y < nx_; ++y)
          kernel[(x * nu_ + u) * nx_ + y] = row[y];
      }
    return kernel;
  }

 private:
  index_t nx_ = 0;
  index_t nu_ = 0;
  std::uint64_t clock_ = 1;
  std::vector<std::uint64_t> visit_;
  std::vector<std::uint64_t> trans_;
};

}  // namespace rbmle

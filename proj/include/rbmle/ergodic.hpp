#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rbmle/chain.hpp"
#include "rbmle/common.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/solvers.hpp"

namespace rbmle {

/// E[steps to first reach y from x] under `policy`; x == y gives the
/// expected return time. +inf when the target is missed with positive
/// probability.
inline double expected_hitting_time(const MdpModel& model,
                                    const Policy& policy, index_t x,
                                    index_t y) {
  require(x < model.num_states && y < model.num_states,
          "expected_hitting_time: state out of range");
  const HittingTimes ht = expected_hitting_times(induced_chain(model, policy), y);
  return x == y ? ht.return_time : ht.to_target[x];
}

namespace detail {

struct MaxPassageResult {
  numvec value;        // value[x] = max over policies of E[tau_{x,y}], x != y
  double return_time;  // max over policies of E[tau_{y,y}]
};

/// Worst-case expected passage time to `target` over all stationary
/// policies, by value iteration plus an exact re-solve of the greedy
/// policy. Escape sets (state sets some policy never leaves) make the
/// value infinite and are rejected up front.
inline MaxPassageResult max_passage_to(const MdpModel& model, index_t target,
                                       index_t max_iterations,
                                       double tolerance) {
  const index_t nx = model.num_states;
  const index_t nu = model.num_actions;

  std::vector<bool> escape(nx, true);
  escape[target] = false;
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (index_t x = 0; x < nx; ++x) {
      if (!escape[x]) continue;
      bool can_stay = false;
      for (index_t u = 0; u < nu && !can_stay; ++u) {
        bool leaks = false;
        for (index_t z = 0; z < nx; ++z)
          if (model.p(x, z, u) > 0.0 && !escape[z]) {
            leaks = true;
            break;
          }
        if (!leaks) can_stay = true;
      }
      if (!can_stay) {
        escape[x] = false;
        shrunk = true;
      }
    }
  }
  for (index_t x = 0; x < nx; ++x)
    if (escape[x])
      throw SolverError(
          "max_passage_to: some policy avoids state " +
          std::to_string(target) + " forever (passage time infinite)");

  auto backup = [&](const numvec& H, index_t x, index_t* best_action) {
    double best = -kInf;
    for (index_t u = 0; u < nu; ++u) {
      double v = 1.0;
      for (index_t z = 0; z < nx; ++z)
        if (z != target) v += model.p(x, z, u) * H[z];
      if (v > best + 1e-15) {
        best = v;
        if (best_action) *best_action = u;
      }
    }
    return best;
  };

  numvec H(nx, 0.0);
  for (int round = 0; round < 4; ++round) {
    index_t iter = 0;
    for (; iter < max_iterations; ++iter) {
      double change = 0.0, scale = 1.0;
      for (index_t x = 0; x < nx; ++x) {
        if (x == target) continue;
        const double nv = backup(H, x, nullptr);
        change = std::max(change, std::abs(nv - H[x]));
        scale = std::max(scale, std::abs(nv));
        H[x] = nv;
        if (nv > 1e14)
          throw SolverError("max_passage_to: diverging passage values");
      }
      if (change <= tolerance * scale) break;
    }
    if (iter == max_iterations)
      throw SolverError("max_passage_to: value iteration hit iteration cap");

    // Exact passage times of the greedy policy remove the from-below bias
    // of value iteration.
    ChainMatrix P(nx);
    for (index_t x = 0; x < nx; ++x) {
      index_t u = 0;
      backup(H, x, &u);
      for (index_t z = 0; z < nx; ++z) P(x, z) = model.p(x, z, u);
    }
    const HittingTimes exact = expected_hitting_times(P, target);
    double residual = 0.0;
    numvec H_exact(nx, 0.0);
    for (index_t x = 0; x < nx; ++x)
      if (x != target) H_exact[x] = exact.to_target[x];
    for (index_t x = 0; x < nx; ++x) {
      if (x == target) continue;
      residual =
          std::max(residual, std::abs(backup(H_exact, x, nullptr) - H_exact[x]));
    }
    H = H_exact;
    if (residual <= 1e-8) {
      MaxPassageResult out;
      out.value = H;
      out.return_time = backup(H, target, nullptr);
      return out;
    }
  }
  throw SolverError("max_passage_to: failed to certify optimal passage times");
}

}  // namespace detail

/// Mixing time: the largest expected passage (or return) time between any
/// ordered state pair, maximized over stationary policies.
inline double mixing_time(const MdpModel& model,
                          index_t max_iterations = 200000,
                          double tolerance = 1e-13) {
  if (model.num_states == 1) return 1.0;  // immediate self return
  double worst = 0.0;
  for (index_t y = 0; y < model.num_states; ++y) {
    const auto res =
        detail::max_passage_to(model, y, max_iterations, tolerance);
    for (index_t x = 0; x < model.num_states; ++x)
      if (x != y) worst = std::max(worst, res.value[x]);
    worst = std::max(worst, res.return_time);
  }
  return worst;
}

struct ConductivityResult {
  double value = 0.0;
  Policy policy;  // deterministic policy attaining the maximum
  index_t from = 0;
  index_t to = 0;
};

/// Worst ratio of cross-passage time to twice the return time, over all
/// deterministic policies and state pairs. Zero for a single state.
inline ConductivityResult conductivity(const MdpModel& model,
                                       index_t cap = 4096) {
  ConductivityResult result;
  if (model.num_states == 1) {
    result.policy = Policy::deterministic({0});
    return result;
  }
  const auto policies =
      enumerate_policies(model.num_states, model.num_actions, cap);
  for (const Policy& pi : policies) {
    const ChainMatrix P = induced_chain(model, pi);
    // passage[y] holds times into target y from every start
    std::vector<HittingTimes> passage(model.num_states);
    for (index_t y = 0; y < model.num_states; ++y)
      passage[y] = expected_hitting_times(P, y);
    for (index_t x = 0; x < model.num_states; ++x) {
      const double ret = passage[x].return_time;
      for (index_t y = 0; y < model.num_states; ++y) {
        if (y == x) continue;
        const double cross = passage[y].to_target[x];
        if (!std::isfinite(cross) || !std::isfinite(ret))
          throw SolverError(
              "conductivity: infinite passage time (chain does not mix)");
        const double ratio = cross / (2.0 * ret);
        if (ratio > result.value) {
          result.value = ratio;
          result.policy = pi;
          result.from = x;
          result.to = y;
        }
      }
    }
  }
  return result;
}

struct GapsResult {
  double j_star = 0.0;
  double delta_min = kInf;
  std::vector<Policy> policies;      // enumeration order
  numvec gains;                      // aligned with policies
  std::vector<index_t> optimal_ids;  // indices into policies
};

/// Gains and optimality gaps of every deterministic policy. Throws when all
/// policies are optimal, since the minimum positive gap is then undefined.
inline GapsResult policy_gaps(const MdpModel& model, index_t cap = 4096,
                              double tie_tol = 1e-9) {
  GapsResult result;
  result.policies =
      enumerate_policies(model.num_states, model.num_actions, cap);
  result.gains.resize(result.policies.size());
  for (index_t i = 0; i < result.policies.size(); ++i) {
    result.gains[i] = evaluate_policy(model, result.policies[i]).gain;
    result.j_star = std::max(result.j_star, result.gains[i]);
  }
  for (index_t i = 0; i < result.policies.size(); ++i) {
    const double gap = result.j_star - result.gains[i];
    if (gap <= tie_tol)
      result.optimal_ids.push_back(i);
    else
      result.delta_min = std::min(result.delta_min, gap);
  }
  if (result.optimal_ids.size() == result.policies.size())
    throw SolverError(
        "policy_gaps: every policy is gain-optimal; minimum gap undefined");
  return result;
}

/// Ground-truth constants consumed by the regret bound and the verifiers.
struct StructuralConstants {
  double j_star = 0.0;
  double delta_min = 0.0;
  double t_mix = 0.0;
  double kappa = 0.0;
  double p_min = 0.0;
};

inline StructuralConstants structural_constants(const MdpModel& model,
                                                index_t cap = 4096) {
  StructuralConstants c;
  const GapsResult gaps = policy_gaps(model, cap);
  c.j_star = gaps.j_star;
  c.delta_min = gaps.delta_min;
  c.t_mix = mixing_time(model);
  c.kappa = conductivity(model, cap).value;
  c.p_min = model.p_min;
  return c;
}

}  // namespace rbmle

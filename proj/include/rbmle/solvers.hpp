#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "rbmle/chain.hpp"
#include "rbmle/common.hpp"
#include "rbmle/mdp.hpp"

namespace rbmle {

struct PolicyEvaluation {
  double gain = 0.0;
  numvec stationary;
  numvec bias;  // stationary . bias = 0
};

/// Average reward, stationary distribution and bias of a stationary policy.
/// Requires the induced chain to be unichain; throws SolverError otherwise.
inline PolicyEvaluation evaluate_policy(const MdpModel& model,
                                        const Policy& policy) {
  const ChainMatrix P = induced_chain(model, policy);
  if (recurrent_classes(P).size() != 1)
    throw SolverError("evaluate_policy: induced chain is not unichain");
  ChainEvaluation ev = chain_gain_bias(P, induced_rewards(model, policy));
  return PolicyEvaluation{ev.gain, std::move(ev.stationary),
                          std::move(ev.bias)};
}

/// All deterministic policies in lexicographic order of their action vectors
/// (state 0 most significant), so the first entry plays action 0 everywhere.
inline std::vector<Policy> enumerate_policies(index_t num_states,
                                              index_t num_actions,
                                              index_t cap = 4096) {
  require(num_states > 0 && num_actions > 0,
          "enumerate_policies: empty model");
  const index_t total = detail::policy_count(num_states, num_actions, cap);
  require(total <= cap, "enumerate_policies: " + std::to_string(num_actions) +
                            "^" + std::to_string(num_states) +
                            " policies exceeds cap " + std::to_string(cap));
  std::vector<Policy> out;
  out.reserve(total);
  for (index_t i = 0; i < total; ++i)
    out.push_back(detail::nth_policy(i, num_states, num_actions));
  return out;
}

struct OptimalPolicyResult {
  double gain = 0.0;
  Policy policy;                    // lexicographically first maximizer found
  std::vector<Policy> optimal_set;  // exhaustive only when set_exhaustive
  bool set_exhaustive = false;
  bool cycle_fallback = false;  // policy iteration cycled, answer enumerated
  index_t iterations = 0;
};

namespace detail {

inline double improvement_value(const MdpModel& model, index_t x, index_t u,
                                const numvec& h) {
  double v = model.r(x, u);
  for (index_t y = 0; y < model.num_states; ++y)
    v += model.p(x, y, u) * h[y];
  return v;
}

inline OptimalPolicyResult optimal_by_enumeration(const MdpModel& model,
                                                  index_t cap,
                                                  double tie_tol) {
  OptimalPolicyResult result;
  const auto policies = enumerate_policies(model.num_states,
                                           model.num_actions, cap);
  numvec gains(policies.size());
  double best = -kInf;
  for (index_t i = 0; i < policies.size(); ++i) {
    gains[i] = evaluate_policy(model, policies[i]).gain;
    best = std::max(best, gains[i]);
  }
  result.gain = best;
  result.set_exhaustive = true;
  for (index_t i = 0; i < policies.size(); ++i)
    if (best - gains[i] <= tie_tol) result.optimal_set.push_back(policies[i]);
  result.policy = result.optimal_set.front();
  return result;
}

}  // namespace detail

/// Gain-optimal deterministic policy by policy iteration on gain and bias.
///
/// Improvement keeps the incumbent action on ties so iterates cannot
/// oscillate between equal-value policies; if a cycle still appears the
/// answer is recomputed by exhaustive enumeration. The optimal set is
/// confirmed by enumeration whenever the policy count fits under `cap`.
inline OptimalPolicyResult optimal_policy(const MdpModel& model,
                                          index_t cap = 4096,
                                          double tie_tol = 1e-9) {
  const index_t nx = model.num_states;
  const index_t nu = model.num_actions;
  OptimalPolicyResult result;

  std::vector<index_t> actions(nx, 0);
  for (index_t x = 0; x < nx; ++x)
    for (index_t u = 1; u < nu; ++u)
      if (model.r(x, u) > model.r(x, actions[x])) actions[x] = u;

  std::set<std::vector<index_t>> visited;
  Policy current = Policy::deterministic(actions);
  PolicyEvaluation eval = evaluate_policy(model, current);
  while (true) {
    ++result.iterations;
    if (!visited.insert(current.actions()).second) {
      result = detail::optimal_by_enumeration(model, cap, tie_tol);
      result.cycle_fallback = true;
      return result;
    }
    std::vector<index_t> next = current.actions();
    bool changed = false;
    for (index_t x = 0; x < nx; ++x) {
      double incumbent =
          detail::improvement_value(model, x, next[x], eval.bias);
      for (index_t u = 0; u < nu; ++u) {
        if (u == next[x]) continue;
        if (detail::improvement_value(model, x, u, eval.bias) >
            incumbent + 1e-12) {
          incumbent = detail::improvement_value(model, x, u, eval.bias);
          next[x] = u;
          changed = true;
        }
      }
    }
    if (!changed) break;
    current = Policy::deterministic(next);
    eval = evaluate_policy(model, current);
  }

  result.gain = eval.gain;
  result.policy = current;
  const index_t total = detail::policy_count(nx, nu, cap);
  if (total <= cap) {
    auto enumerated = detail::optimal_by_enumeration(model, cap, tie_tol);
    result.gain = enumerated.gain;
    result.optimal_set = std::move(enumerated.optimal_set);
    result.set_exhaustive = true;
    // keep the policy-iteration maximizer as the representative if it ties
    bool found = false;
    for (const Policy& p : result.optimal_set)
      if (p == result.policy) found = true;
    if (!found) result.policy = result.optimal_set.front();
  } else {
    result.optimal_set = {result.policy};
    result.set_exhaustive = false;
  }
  return result;
}

}  // namespace rbmle

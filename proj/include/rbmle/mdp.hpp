#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rbmle/chain.hpp"
#include "rbmle/common.hpp"
#include "rbmle/random.hpp"

namespace rbmle {

/// Finite MDP with known rewards and unknown-to-the-agent transitions.
///
/// transitions and support are stored row-major as [x][u][y]; rewards as
/// [x][u]. p_min is a positive lower bound on every supported transition
/// probability and support marks exactly the entries that may be positive.
struct MdpModel {
  index_t num_states = 0;
  index_t num_actions = 0;
  numvec transitions;
  numvec rewards;
  std::vector<std::uint8_t> support;
  double p_min = 0.0;

  index_t row_offset(index_t x, index_t u) const {
    return (x * num_actions + u) * num_states;
  }
  double p(index_t x, index_t y, index_t u) const {
    return transitions[row_offset(x, u) + y];
  }
  double r(index_t x, index_t u) const {
    return rewards[x * num_actions + u];
  }
  bool supported(index_t x, index_t y, index_t u) const {
    return support[row_offset(x, u) + y] != 0;
  }
};

/// What the learner is allowed to see: sizes, rewards, support and p_min,
/// but never the transition probabilities themselves.
struct KnownModelInfo {
  index_t num_states = 0;
  index_t num_actions = 0;
  numvec rewards;
  std::vector<std::uint8_t> support;
  double p_min = 0.0;

  index_t row_offset(index_t x, index_t u) const {
    return (x * num_actions + u) * num_states;
  }
  double r(index_t x, index_t u) const {
    return rewards[x * num_actions + u];
  }
  bool supported(index_t x, index_t y, index_t u) const {
    return support[row_offset(x, u) + y] != 0;
  }
  index_t support_size(index_t x, index_t u) const {
    index_t c = 0;
    for (index_t y = 0; y < num_states; ++y) c += supported(x, y, u) ? 1 : 0;
    return c;
  }
};

inline KnownModelInfo known_info(const MdpModel& m) {
  return KnownModelInfo{m.num_states, m.num_actions, m.rewards, m.support,
                        m.p_min};
}

/// Stationary policy; deterministic policies carry one action per state,
/// randomized ones a distribution over actions per state.
class Policy {
 public:
  enum class Kind { deterministic, randomized };

  Policy() = default;

  static Policy deterministic(std::vector<index_t> actions) {
    Policy p;
    p.kind_ = Kind::deterministic;
    p.actions_ = std::move(actions);
    return p;
  }

  static Policy randomized(index_t num_states, index_t num_actions,
                           numvec probs) {
    require(probs.size() == num_states * num_actions,
            "Policy::randomized: probability table size mismatch");
    Policy p;
    p.kind_ = Kind::randomized;
    p.num_actions_ = num_actions;
    p.probs_ = std::move(probs);
    for (index_t x = 0; x < num_states; ++x) {
      double total = 0.0;
      for (index_t u = 0; u < num_actions; ++u)
        total += p.probs_[x * num_actions + u];
      require(std::abs(total - 1.0) <= 1e-9,
              "Policy::randomized: row must sum to one");
    }
    return p;
  }

  static Policy uniform(index_t num_states, index_t num_actions) {
    return randomized(num_states, num_actions,
                      numvec(num_states * num_actions,
                             1.0 / static_cast<double>(num_actions)));
  }

  Kind kind() const { return kind_; }
  bool is_deterministic() const { return kind_ == Kind::deterministic; }

  index_t num_states() const {
    return is_deterministic() ? actions_.size()
                              : probs_.size() / num_actions_;
  }

  index_t action(index_t x) const {
    require(is_deterministic(), "Policy::action: randomized policy");
    return actions_[x];
  }

  double prob(index_t x, index_t u) const {
    if (is_deterministic()) return actions_[x] == u ? 1.0 : 0.0;
    return probs_[x * num_actions_ + u];
  }

  const std::vector<index_t>& actions() const {
    require(is_deterministic(), "Policy::actions: randomized policy");
    return actions_;
  }

  friend bool operator==(const Policy& a, const Policy& b) {
    return a.kind_ == b.kind_ && a.actions_ == b.actions_ &&
           a.probs_ == b.probs_;
  }

 private:
  Kind kind_ = Kind::deterministic;
  std::vector<index_t> actions_;
  index_t num_actions_ = 0;
  numvec probs_;
};

/// Markov chain over states induced by playing `policy` in `model`.
inline ChainMatrix induced_chain(const MdpModel& model, const Policy& policy) {
  ChainMatrix P(model.num_states);
  for (index_t x = 0; x < model.num_states; ++x)
    for (index_t u = 0; u < model.num_actions; ++u) {
      const double w = policy.prob(x, u);
      if (w <= 0.0) continue;
      for (index_t y = 0; y < model.num_states; ++y)
        P(x, y) += w * model.p(x, y, u);
    }
  return P;
}

inline numvec induced_rewards(const MdpModel& model, const Policy& policy) {
  numvec r(model.num_states, 0.0);
  for (index_t x = 0; x < model.num_states; ++x)
    for (index_t u = 0; u < model.num_actions; ++u)
      r[x] += policy.prob(x, u) * model.r(x, u);
  return r;
}

struct ValidationResult {
  std::vector<std::string> violations;
  std::optional<MdpModel> model;  // normalized model when violations is empty

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline index_t policy_count(index_t num_states, index_t num_actions,
                            index_t cap) {
  index_t count = 1;
  for (index_t x = 0; x < num_states; ++x) {
    if (count > cap / num_actions + 1) return cap + 1;
    count *= num_actions;
  }
  return count;
}

inline Policy nth_policy(index_t i, index_t num_states, index_t num_actions) {
  std::vector<index_t> actions(num_states);
  for (index_t x = num_states; x-- > 0;) {
    actions[x] = i % num_actions;
    i /= num_actions;
  }
  return Policy::deterministic(actions);
}

}  // namespace detail

/// Checks structural soundness: stochastic rows, rewards in (0, 1], support
/// consistency with p_min, and a single recurrent class under every
/// deterministic policy (a seeded sample of policies once enumeration would
/// exceed `enumeration_cap`). Fills in a default support mask (positive
/// entries) and p_min (smallest supported probability) when absent.
inline ValidationResult validate_mdp(const MdpModel& raw,
                                     index_t enumeration_cap = 4096) {
  ValidationResult result;
  auto fail = [&result](const std::string& msg) {
    result.violations.push_back(msg);
  };

  const index_t nx = raw.num_states;
  const index_t nu = raw.num_actions;
  if (nx == 0 || nu == 0) {
    fail("model must have at least one state and one action");
    return result;
  }
  if (raw.transitions.size() != nx * nu * nx) {
    fail("transition table has wrong size");
    return result;
  }
  if (raw.rewards.size() != nx * nu) {
    fail("reward table has wrong size");
    return result;
  }

  MdpModel model = raw;
  if (model.support.empty()) {
    model.support.resize(nx * nu * nx);
    for (index_t i = 0; i < model.transitions.size(); ++i)
      model.support[i] = model.transitions[i] > 0.0 ? 1 : 0;
  } else if (model.support.size() != nx * nu * nx) {
    fail("support mask has wrong size");
    return result;
  }

  for (index_t x = 0; x < nx; ++x)
    for (index_t u = 0; u < nu; ++u) {
      double sum = 0.0;
      for (index_t y = 0; y < nx; ++y) {
        const double v = model.p(x, y, u);
        sum += v;
        if (v < 0.0)
          fail("negative probability at (" + std::to_string(x) + "," +
               std::to_string(y) + "," + std::to_string(u) + ")");
        if (v > 0.0 && !model.supported(x, y, u))
          fail("positive probability off support at (" + std::to_string(x) +
               "," + std::to_string(y) + "," + std::to_string(u) + ")");
        if (v == 0.0 && model.supported(x, y, u))
          fail("zero probability on support at (" + std::to_string(x) + "," +
               std::to_string(y) + "," + std::to_string(u) + ")");
      }
      if (std::abs(sum - 1.0) > 1e-9)
        fail("row (" + std::to_string(x) + "," + std::to_string(u) +
             ") sums to " + std::to_string(sum));
      const double rv = model.r(x, u);
      if (!(rv > 0.0 && rv <= 1.0))
        fail("reward (" + std::to_string(x) + "," + std::to_string(u) +
             ") outside (0,1]");
    }

  double min_positive = 1.0;
  for (index_t i = 0; i < model.transitions.size(); ++i)
    if (model.transitions[i] > 0.0)
      min_positive = std::min(min_positive, model.transitions[i]);
  if (model.p_min <= 0.0) {
    model.p_min = min_positive;
  } else if (model.p_min > min_positive + 1e-12) {
    fail("p_min exceeds smallest supported probability");
  }
  if (!(model.p_min > 0.0 && model.p_min <= 1.0))
    fail("p_min outside (0,1]");

  if (!result.violations.empty()) return result;

  // Recurrence structure: one closed class under each checked policy.
  const index_t total = detail::policy_count(nx, nu, enumeration_cap);
  std::vector<Policy> to_check;
  if (total <= enumeration_cap) {
    for (index_t i = 0; i < total; ++i)
      to_check.push_back(detail::nth_policy(i, nx, nu));
  } else {
    for (index_t u = 0; u < nu; ++u)
      to_check.push_back(Policy::deterministic(std::vector<index_t>(nx, u)));
    RandomStream rng(0x5eedull);
    for (int i = 0; i < 64; ++i) {
      std::vector<index_t> actions(nx);
      for (index_t x = 0; x < nx; ++x) actions[x] = rng.uniform_index(nu);
      to_check.push_back(Policy::deterministic(std::move(actions)));
    }
  }
  for (const Policy& pi : to_check) {
    const auto closed = recurrent_classes(induced_chain(model, pi));
    if (closed.size() != 1) {
      std::string actions;
      for (index_t x = 0; x < nx; ++x)
        actions += (x ? "," : "") + std::to_string(pi.action(x));
      fail("policy [" + actions + "] induces " +
           std::to_string(closed.size()) + " recurrent classes");
      break;
    }
  }

  if (result.violations.empty()) result.model = std::move(model);
  return result;
}

inline MdpModel validated_or_throw(const MdpModel& raw,
                                   index_t enumeration_cap = 4096) {
  ValidationResult res = validate_mdp(raw, enumeration_cap);
  if (!res.ok()) {
    std::string msg = "invalid model:";
    for (const auto& v : res.violations) msg += "\n  " + v;
    throw InvalidArgument(msg);
  }
  return *res.model;
}

/// Random fully supported model: each row is p_min plus a scaled random
/// point of the simplex, so every entry is at least p_min by construction.
inline MdpModel generate_random_model(index_t num_states, index_t num_actions,
                                      double p_min, std::uint64_t seed,
                                      double reward_floor = 0.05) {
  require(num_states > 0 && num_actions > 0, "generator: empty model");
  require(p_min > 0.0 && p_min * static_cast<double>(num_states) < 1.0,
          "generator: need p_min in (0, 1/num_states)");
  require(reward_floor > 0.0 && reward_floor < 1.0,
          "generator: reward floor outside (0,1)");
  RandomStream rng(seed);
  MdpModel m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.p_min = p_min;
  m.transitions.resize(num_states * num_actions * num_states);
  m.rewards.resize(num_states * num_actions);
  m.support.assign(num_states * num_actions * num_states, 1);
  const double slack = 1.0 - p_min * static_cast<double>(num_states);
  for (index_t x = 0; x < num_states; ++x)
    for (index_t u = 0; u < num_actions; ++u) {
      numvec w(num_states);
      double total = 0.0;
      for (index_t y = 0; y < num_states; ++y) {
        w[y] = -std::log(1.0 - rng.next_u01());
        total += w[y];
      }
      const index_t base = m.row_offset(x, u);
      for (index_t y = 0; y < num_states; ++y)
        m.transitions[base + y] = p_min + slack * w[y] / total;
      m.rewards[x * num_actions + u] =
          reward_floor + (1.0 - reward_floor) * rng.next_u01();
    }
  return m;
}

}  // namespace rbmle

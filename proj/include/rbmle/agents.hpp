#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rbmle/common.hpp"
#include "rbmle/counts.hpp"
#include "rbmle/index_optimizer.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/random.hpp"
#include "rbmle/schedule.hpp"
#include "rbmle/solvers.hpp"

namespace rbmle {

/// Learner interface. Agents see rewards and the support structure but never
/// the transition probabilities (the oracle baseline is the one exception and
/// receives the full model at construction).
class Agent {
 public:
  virtual ~Agent() = default;
  virtual index_t act(index_t state, std::uint64_t t, RandomStream& rng) = 0;
  virtual void observe(index_t state, index_t action, double reward,
                       index_t next_state, std::uint64_t t) = 0;
  virtual std::string kind() const = 0;
};

/// Everything the index agent computed at one episode boundary, kept for
/// later verification: all policy indices, the selection, and the count
/// state the computation saw.
struct EpisodeComputation {
  index_t k = 0;
  std::uint64_t tau = 0;
  double alpha = 0.0;
  std::vector<IndexResult> indices;  // lexicographic policy order
  index_t selected = 0;
  std::vector<std::uint64_t> visit_table;  // per (x,u) at time tau
  numvec empirical_kernel;                 // fitted kernel at time tau
};

struct RbmleConfig {
  double a = 1.0;
  double b = 3.0;
  index_t enumeration_cap = 4096;
  OptimizerOptions optimizer;
  bool record_episodes = true;
};

/// Index policy over a doubling episode grid: at each episode start it
/// maximizes alpha(tau) * gain - count-weighted KL over every deterministic
/// policy's biased model and commits to the winner for the whole episode.
class RbmleAgent final : public Agent {
 public:
  RbmleAgent(KnownModelInfo info, RbmleConfig config)
      : info_(std::move(info)),
        config_(config),
        schedule_{config.a, config.b, info_.num_states, info_.num_actions},
        counts_(info_.num_states, info_.num_actions),
        policy_(Policy::deterministic(
            std::vector<index_t>(info_.num_states, 0))) {}

  index_t act(index_t state, std::uint64_t t, RandomStream&) override {
    if (next_episode_ < 63 &&
        t == EpisodeSchedule::start_time(next_episode_)) {
      recompute(t);
      ++next_episode_;
    }
    return policy_.action(state);
  }

  void observe(index_t state, index_t action, double, index_t next_state,
               std::uint64_t) override {
    counts_.record_transition(state, action, next_state);
  }

  std::string kind() const override { return "rbmle"; }

  const std::vector<EpisodeComputation>& episodes() const { return episodes_; }
  const TransitionCounts& counts() const { return counts_; }
  const Policy& current_policy() const { return policy_; }

 private:
  void recompute(std::uint64_t t) {
    EpisodeComputation record;
    record.k = next_episode_;
    record.tau = t;
    record.alpha = schedule_.alpha_at(t);
    record.indices = compute_indices(info_, counts_, record.alpha,
                                     config_.enumeration_cap,
                                     config_.optimizer);
    record.selected = select_policy(record.indices);
    policy_ = record.indices[record.selected].policy;
    if (config_.record_episodes) {
      record.visit_table = counts_.visit_table();
      record.empirical_kernel = counts_.empirical_kernel();
      episodes_.push_back(std::move(record));
    }
  }

  KnownModelInfo info_;
  RbmleConfig config_;
  BiasSchedule schedule_;
  TransitionCounts counts_;
  Policy policy_;
  index_t next_episode_ = 1;
  std::vector<EpisodeComputation> episodes_;
};

/// Fitted model with every row pushed to the interior of its support simplex
/// (unvisited rows become uniform on support), so induced chains keep the
/// true digraph and stay unichain.
inline MdpModel certainty_equivalent_model(const KnownModelInfo& info,
                                           const TransitionCounts& counts,
                                           double floor_value = 1e-12) {
  MdpModel m;
  m.num_states = info.num_states;
  m.num_actions = info.num_actions;
  m.rewards = info.rewards;
  m.support = info.support;
  m.transitions.assign(m.num_states * m.num_actions * m.num_states, 0.0);
  double min_positive = 1.0;
  for (index_t x = 0; x < m.num_states; ++x) {
    for (index_t u = 0; u < m.num_actions; ++u) {
      double* row = m.transitions.data() + m.row_offset(x, u);
      index_t m_support = 0;
      for (index_t y = 0; y < m.num_states; ++y)
        m_support += info.supported(x, y, u) ? 1 : 0;
      if (counts.visits(x, u) > 0) {
        const numvec emp = counts.empirical_row(x, u);
        double sum = 0.0;
        for (index_t y = 0; y < m.num_states; ++y) {
          if (!info.supported(x, y, u)) continue;
          row[y] = std::max(emp[y], floor_value);
          sum += row[y];
        }
        for (index_t y = 0; y < m.num_states; ++y) row[y] /= sum;
      } else {
        for (index_t y = 0; y < m.num_states; ++y)
          if (info.supported(x, y, u))
            row[y] = 1.0 / static_cast<double>(m_support);
      }
      for (index_t y = 0; y < m.num_states; ++y)
        if (row[y] > 0.0) min_positive = std::min(min_positive, row[y]);
    }
  }
  m.p_min = min_positive;
  return m;
}

/// Certainty-equivalence baseline: refit the model and act greedily with
/// respect to its optimal policy at every step.
class CeGreedyAgent final : public Agent {
 public:
  CeGreedyAgent(KnownModelInfo info, index_t enumeration_cap = 4096)
      : info_(std::move(info)),
        cap_(enumeration_cap),
        counts_(info_.num_states, info_.num_actions),
        policy_(Policy::deterministic(
            std::vector<index_t>(info_.num_states, 0))) {}

  index_t act(index_t state, std::uint64_t, RandomStream&) override {
    refresh();
    return policy_.action(state);
  }

  void observe(index_t state, index_t action, double, index_t next_state,
               std::uint64_t) override {
    counts_.record_transition(state, action, next_state);
  }

  std::string kind() const override { return "ce"; }
  const Policy& current_policy() const { return policy_; }
  const TransitionCounts& counts() const { return counts_; }

 private:
  void refresh() {
    if (counts_.time() == solved_at_) return;
    const MdpModel fitted = certainty_equivalent_model(info_, counts_);
    policy_ = optimal_policy(fitted, cap_).policy;
    solved_at_ = counts_.time();
  }

  KnownModelInfo info_;
  index_t cap_;
  TransitionCounts counts_;
  Policy policy_;
  std::uint64_t solved_at_ = 0;
};

/// Certainty equivalence with epsilon-uniform exploration.
class EpsilonGreedyAgent final : public Agent {
 public:
  EpsilonGreedyAgent(KnownModelInfo info, double epsilon,
                     index_t enumeration_cap = 4096)
      : greedy_(std::move(info), enumeration_cap), epsilon_(epsilon) {
    require(epsilon >= 0.0 && epsilon <= 1.0,
            "epsilon-greedy: epsilon must lie in [0, 1]");
  }

  index_t act(index_t state, std::uint64_t t, RandomStream& rng) override {
    const index_t greedy_action = greedy_.act(state, t, rng);
    if (rng.next_u01() < epsilon_)
      return rng.uniform_index(num_actions());
    return greedy_action;
  }

  void observe(index_t state, index_t action, double reward,
               index_t next_state, std::uint64_t t) override {
    greedy_.observe(state, action, reward, next_state, t);
  }

  std::string kind() const override { return "epsilon"; }

 private:
  index_t num_actions() const { return greedy_.counts().num_actions(); }

  CeGreedyAgent greedy_;
  double epsilon_;
};

/// Plays a fixed gain-optimal policy of the true model.
class OracleAgent final : public Agent {
 public:
  explicit OracleAgent(const MdpModel& model, index_t enumeration_cap = 4096)
      : policy_(optimal_policy(model, enumeration_cap).policy) {}

  index_t act(index_t state, std::uint64_t, RandomStream&) override {
    return policy_.action(state);
  }
  void observe(index_t, index_t, double, index_t, std::uint64_t) override {}
  std::string kind() const override { return "oracle"; }
  const Policy& policy() const { return policy_; }

 private:
  Policy policy_;
};

class UniformRandomAgent final : public Agent {
 public:
  explicit UniformRandomAgent(index_t num_actions)
      : num_actions_(num_actions) {}

  index_t act(index_t, std::uint64_t, RandomStream& rng) override {
    return rng.uniform_index(num_actions_);
  }
  void observe(index_t, index_t, double, index_t, std::uint64_t) override {}
  std::string kind() const override { return "uniform"; }

 private:
  index_t num_actions_;
};

/// Agent selection used by configs and the command line.
struct AgentConfig {
  std::string kind = "rbmle";  // rbmle | ce | epsilon | oracle | uniform
  double a = 1.0;
  double b = 3.0;
  double epsilon = 0.1;
  index_t enumeration_cap = 4096;
  OptimizerOptions optimizer;
  bool record_episodes = true;
};

inline std::unique_ptr<Agent> make_agent(const MdpModel& model,
                                         const AgentConfig& config) {
  const KnownModelInfo info = known_info(model);
  if (config.kind == "rbmle") {
    RbmleConfig rc;
    rc.a = config.a;
    rc.b = config.b;
    rc.enumeration_cap = config.enumeration_cap;
    rc.optimizer = config.optimizer;
    rc.record_episodes = config.record_episodes;
    return std::make_unique<RbmleAgent>(info, rc);
  }
  if (config.kind == "ce")
    return std::make_unique<CeGreedyAgent>(info, config.enumeration_cap);
  if (config.kind == "epsilon")
    return std::make_unique<EpsilonGreedyAgent>(info, config.epsilon,
                                                config.enumeration_cap);
  if (config.kind == "oracle")
    return std::make_unique<OracleAgent>(model, config.enumeration_cap);
  if (config.kind == "uniform")
    return std::make_unique<UniformRandomAgent>(model.num_actions);
  throw InvalidArgument("unknown agent kind: " + config.kind);
}

}  // namespace rbmle

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rbmle/agents.hpp"
#include "rbmle/common.hpp"
#include "rbmle/confidence.hpp"
#include "rbmle/counts.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/random.hpp"
#include "rbmle/schedule.hpp"
#include "rbmle/solvers.hpp"

namespace rbmle {

/// Complete trace of one seeded run. Everything downstream (regret curves,
/// lemma verifiers, reports) is a pure function of this record plus the model.
struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  index_t start_state = 0;
  std::string agent_kind;
  double agent_a = 0.0;
  double agent_b = 3.0;
  double agent_epsilon = 0.0;
  std::vector<index_t> states;   // x(t), t = 1..T
  std::vector<index_t> actions;  // u(t)
  numvec rewards;                // r(x(t), u(t))
  double total_reward = 0.0;
  // Times t where the true kernel fell outside the confidence set C(t)
  // built from the first t-1 transitions (with the agent's b).
  std::vector<std::uint64_t> g1_violation_times;
  std::vector<EpisodeComputation> episodes;  // index agents only
};

/// Runs one trajectory. A single stream drives both the environment and any
/// agent randomness, so identical inputs replay byte-identically.
inline RunRecord simulate(const MdpModel& model, const AgentConfig& config,
                          std::uint64_t horizon, std::uint64_t seed,
                          index_t start_state = 0) {
  require(horizon >= 2, "simulate: need horizon >= 2");
  require(start_state < model.num_states, "simulate: start state out of range");
  std::unique_ptr<Agent> agent = make_agent(model, config);

  RunRecord record;
  record.seed = seed;
  record.horizon = horizon;
  record.start_state = start_state;
  record.agent_kind = config.kind;
  record.agent_a = config.a;
  record.agent_b = config.b;
  record.agent_epsilon = config.epsilon;
  record.states.reserve(horizon);
  record.actions.reserve(horizon);
  record.rewards.reserve(horizon);

  RandomStream rng(seed);
  TransitionCounts mirror(model.num_states, model.num_actions);
  numvec row(model.num_states);
  index_t x = start_state;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    if (!in_confidence_set(mirror, model.transitions, config.b))
      record.g1_violation_times.push_back(t);
    index_t u;
    try {
      u = agent->act(x, t, rng);
    } catch (const std::exception& e) {
      throw SolverError("agent '" + config.kind + "' failed at t=" +
                        std::to_string(t) + ": " + e.what());
    }
    require(u < model.num_actions, "agent returned an invalid action");
    for (index_t y = 0; y < model.num_states; ++y) row[y] = model.p(x, y, u);
    const index_t y = rng.categorical(row);
    const double r = model.r(x, u);
    record.states.push_back(x);
    record.actions.push_back(u);
    record.rewards.push_back(r);
    record.total_reward += r;
    agent->observe(x, u, r, y, t);
    mirror.record_transition(x, u, y);
    x = y;
  }
  if (auto* rb = dynamic_cast<RbmleAgent*>(agent.get()))
    record.episodes = rb->episodes();
  return record;
}

inline std::vector<RunRecord> run_many(const MdpModel& model,
                                       const AgentConfig& config,
                                       std::uint64_t horizon,
                                       const std::vector<std::uint64_t>& seeds,
                                       index_t start_state = 0) {
  require(!seeds.empty(), "run_many: need at least one seed");
  std::vector<RunRecord> records;
  records.reserve(seeds.size());
  for (std::uint64_t seed : seeds)
    records.push_back(simulate(model, config, horizon, seed, start_state));
  return records;
}

/// Regret split of one run across the four proof buckets:
///   r1  suboptimal episodes with both good events holding,
///   r2  episodes in runs where the visit-count event failed,
///   r3  suboptimal episodes whose start-time confidence set failed,
///   r4  episodes playing an optimal policy (mixing losses only).
/// Runs without per-episode computations (baselines) report everything
/// under r4.
struct RunRegret {
  numvec curve;  // R(t) = t J* - sum of rewards, t = 1..T
  double total = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  numvec per_episode;  // rho_k, index agents only
  std::vector<int> episode_bucket;  // 1..4, aligned with per_episode
  bool g2_holds = true;
};

struct RegretSummary {
  double j_star = 0.0;
  std::uint64_t horizon = 0;
  numvec mean_curve;
  numvec stderr_curve;
  double mean_total = 0.0;
  double stderr_total = 0.0;
  double mean_r1 = 0.0, mean_r2 = 0.0, mean_r3 = 0.0, mean_r4 = 0.0;
  std::vector<RunRegret> runs;
};

namespace detail {

/// Visit-count event of the episodic analysis: with K_{x,u} the episodes
/// whose policy plays u at x and y_{x,u} = sum over them of
/// floor(in-horizon episode length / (2 t_mix)), every pair must satisfy
/// n(x,u;T) >= y_{x,u}/2 - sqrt(y_{x,u} log T).
inline bool visit_count_event_holds(const MdpModel& model,
                                    const RunRecord& record, double t_mix) {
  if (record.episodes.empty()) return true;
  const index_t nx = model.num_states;
  const index_t nu = model.num_actions;
  std::vector<std::uint64_t> visits(nx * nu, 0);
  for (std::uint64_t t = 0; t < record.horizon; ++t)
    ++visits[record.states[t] * nu + record.actions[t]];
  numvec y(nx * nu, 0.0);
  for (const EpisodeComputation& ep : record.episodes) {
    const std::uint64_t last =
        std::min(EpisodeSchedule::start_time(ep.k + 1) - 1, record.horizon);
    if (ep.tau > record.horizon) continue;
    const double len = static_cast<double>(last - ep.tau + 1);
    const Policy& pi = ep.indices[ep.selected].policy;
    for (index_t x = 0; x < nx; ++x)
      y[x * nu + pi.action(x)] += std::floor(len / (2.0 * t_mix));
  }
  const double log_t = std::log(static_cast<double>(record.horizon));
  for (index_t i = 0; i < nx * nu; ++i) {
    const double floor_bound = y[i] / 2.0 - std::sqrt(y[i] * log_t);
    if (static_cast<double>(visits[i]) < floor_bound) return false;
  }
  return true;
}

}  // namespace detail

/// Per-run and aggregate regret against the model's optimal gain. t_mix is
/// needed only to evaluate the visit-count event for index-agent records;
/// pass mixing_time(model).
inline RegretSummary expected_regret(const MdpModel& model,
                                     const std::vector<RunRecord>& records,
                                     double t_mix) {
  require(!records.empty(), "expected_regret: need at least one record");
  const std::uint64_t horizon = records.front().horizon;
  for (const RunRecord& r : records)
    require(r.horizon == horizon, "expected_regret: mismatched horizons");

  const OptimalPolicyResult opt = optimal_policy(model);
  RegretSummary summary;
  summary.j_star = opt.gain;
  summary.horizon = horizon;
  summary.runs.reserve(records.size());

  for (const RunRecord& record : records) {
    RunRegret run;
    run.curve.resize(horizon);
    double cum = 0.0;
    for (std::uint64_t t = 0; t < horizon; ++t) {
      cum += record.rewards[t];
      run.curve[t] = summary.j_star * static_cast<double>(t + 1) - cum;
    }
    run.total = run.curve.back();

    if (record.episodes.empty()) {
      run.r4 = run.total;
    } else {
      run.g2_holds = detail::visit_count_event_holds(model, record, t_mix);
      for (const EpisodeComputation& ep : record.episodes) {
        if (ep.tau > horizon) continue;
        const std::uint64_t last =
            std::min(EpisodeSchedule::start_time(ep.k + 1) - 1, horizon);
        double rho = 0.0;
        for (std::uint64_t t = ep.tau; t <= last; ++t)
          rho += summary.j_star - record.rewards[t - 1];
        const Policy& pi = ep.indices[ep.selected].policy;
        const double gain = evaluate_policy(model, pi).gain;
        int bucket;
        if (std::abs(gain - summary.j_star) <= 1e-9)
          bucket = 4;
        else if (!run.g2_holds)
          bucket = 2;
        else if (std::binary_search(record.g1_violation_times.begin(),
                                    record.g1_violation_times.end(), ep.tau))
          bucket = 3;
        else
          bucket = 1;
        run.per_episode.push_back(rho);
        run.episode_bucket.push_back(bucket);
        switch (bucket) {
          case 1: run.r1 += rho; break;
          case 2: run.r2 += rho; break;
          case 3: run.r3 += rho; break;
          default: run.r4 += rho; break;
        }
      }
    }
    summary.runs.push_back(std::move(run));
  }

  const double n = static_cast<double>(records.size());
  summary.mean_curve.assign(horizon, 0.0);
  for (const RunRegret& run : summary.runs)
    for (std::uint64_t t = 0; t < horizon; ++t)
      summary.mean_curve[t] += run.curve[t] / n;
  summary.stderr_curve.assign(horizon, 0.0);
  if (records.size() > 1) {
    for (const RunRegret& run : summary.runs)
      for (std::uint64_t t = 0; t < horizon; ++t) {
        const double d = run.curve[t] - summary.mean_curve[t];
        summary.stderr_curve[t] += d * d;
      }
    for (std::uint64_t t = 0; t < horizon; ++t)
      summary.stderr_curve[t] =
          std::sqrt(summary.stderr_curve[t] / (n * (n - 1.0)));
  }
  for (const RunRegret& run : summary.runs) {
    summary.mean_total += run.total / n;
    summary.mean_r1 += run.r1 / n;
    summary.mean_r2 += run.r2 / n;
    summary.mean_r3 += run.r3 / n;
    summary.mean_r4 += run.r4 / n;
  }
  if (records.size() > 1) {
    double ss = 0.0;
    for (const RunRegret& run : summary.runs) {
      const double d = run.total - summary.mean_total;
      ss += d * d;
    }
    summary.stderr_total = std::sqrt(ss / (n * (n - 1.0)));
  }
  return summary;
}

}  // namespace rbmle

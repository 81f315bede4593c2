#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "rbmle/common.hpp"
#include "rbmle/confidence.hpp"
#include "rbmle/ergodic.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/schedule.hpp"
#include "rbmle/simulate.hpp"
#include "rbmle/solvers.hpp"
#include "rbmle/theorem.hpp"

namespace rbmle {

/// Outcome of one empirical check. `worst_margin` is the smallest observed
/// slack (allowed minus observed); negative means a failed bound. Checks
/// that count discrete violations pass iff `violations == 0`.
struct CheckReport {
  std::string name;
  bool pass = true;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  double worst_margin = kInf;
  std::vector<std::string> notes;
};

namespace detail {

inline void note(CheckReport& report, const std::string& line) {
  report.notes.push_back(line);
}

inline double binomial_slack(double bound, std::size_t n) {
  const double p = std::min(bound, 1.0);
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline bool same_agent_family(const std::vector<RunRecord>& records) {
  for (const RunRecord& r : records)
    if (r.agent_kind != records.front().agent_kind ||
        r.agent_b != records.front().agent_b ||
        r.agent_a != records.front().agent_a)
      return false;
  return true;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

/// Confidence-set failure frequency: on a logarithmic time grid, the
/// fraction of runs with p outside C(t) must stay below
/// 2 / (t^{2b-1} |X|^2 |U|) plus 3-sigma sampling slack.
inline CheckReport verify_lemma1(const MdpModel& model,
                                 const std::vector<RunRecord>& records) {
  CheckReport report;
  report.name = "confidence-failure-frequency";
  require(!records.empty(), "verify: no records");
  require(detail::same_agent_family(records),
          "verify: records mix agent configurations");
  const double b = records.front().agent_b;
  const double nx = static_cast<double>(model.num_states);
  const double nu = static_cast<double>(model.num_actions);
  const std::uint64_t horizon = records.front().horizon;

  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = 2; t <= horizon; t *= 2) grid.push_back(t);
  if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);

  for (std::uint64_t t : grid) {
    std::size_t failures = 0;
    for (const RunRecord& r : records)
      if (std::binary_search(r.g1_violation_times.begin(),
                             r.g1_violation_times.end(), t))
        ++failures;
    const double empirical =
        static_cast<double>(failures) / static_cast<double>(records.size());
    const double bound =
        2.0 / (std::pow(static_cast<double>(t), 2.0 * b - 1.0) * nx * nx * nu);
    const double allowed = bound + detail::binomial_slack(bound, records.size());
    const double margin = allowed - empirical;
    report.worst_margin = std::min(report.worst_margin, margin);
    ++report.checked;
    if (margin < 0.0) {
      ++report.violations;
      detail::note(report, "t=" + std::to_string(t) + " empirical " +
                               detail::fmt(empirical) + " > allowed " +
                               detail::fmt(allowed));
    }
  }
  report.pass = report.violations == 0;
  return report;
}

/// Deviation bound of every optimized kernel from the fitted kernel it was
/// grown from: elementwise |theta - p_hat| <= sqrt(alpha/(2n)) + 1e-6, with
/// unvisited rows unconstrained.
inline CheckReport verify_lemma2(const std::vector<RunRecord>& records) {
  CheckReport report;
  report.name = "index-kernel-deviation";
  for (const RunRecord& record : records) {
    for (const EpisodeComputation& ep : record.episodes) {
      for (const IndexResult& res : ep.indices) {
        const index_t nx = res.policy.actions().size();
        const index_t nu = ep.visit_table.size() / nx;
        for (index_t x = 0; x < nx; ++x) {
          for (index_t u = 0; u < nu; ++u) {
            const double n =
                static_cast<double>(ep.visit_table[x * nu + u]);
            if (n == 0.0) continue;
            const double d2 = deviation_radius_d2(ep.alpha, ep.visit_table[x * nu + u]);
            const index_t off = (x * nu + u) * nx;
            for (index_t y = 0; y < nx; ++y) {
              const double dev =
                  std::abs(res.theta[off + y] - ep.empirical_kernel[off + y]);
              const double margin = d2 + 1e-6 - dev;
              report.worst_margin = std::min(report.worst_margin, margin);
              ++report.checked;
              if (margin < 0.0) ++report.violations;
            }
          }
        }
      }
    }
  }
  if (report.checked == 0)
    detail::note(report, "no stored index computations to check");
  report.pass = report.violations == 0;
  return report;
}

/// Optimal-index lower bound on episodes whose start-time confidence set
/// held: max over optimal policies of the stored index must be at least
/// alpha(tau) (1 - gamma) J* - 1e-6.
inline CheckReport verify_lemma3(const MdpModel& model,
                                 const std::vector<RunRecord>& records) {
  CheckReport report;
  report.name = "optimal-index-lower-bound";
  require(!records.empty(), "verify: no records");
  require(detail::same_agent_family(records),
          "verify: records mix agent configurations");
  const GapsResult gaps = policy_gaps(model);
  const StructuralConstants sc = structural_constants(model);
  const TheoremConstants tc =
      make_theorem_constants(sc, model.num_states, model.num_actions,
                             records.front().agent_a, records.front().agent_b);
  for (const RunRecord& record : records) {
    for (const EpisodeComputation& ep : record.episodes) {
      if (std::binary_search(record.g1_violation_times.begin(),
                             record.g1_violation_times.end(), ep.tau))
        continue;
      double best = -kInf;
      for (index_t id : gaps.optimal_ids)
        best = std::max(best, ep.indices[id].index_value);
      const double lower = ep.alpha * (1.0 - tc.gamma) * gaps.j_star - 1e-6;
      const double margin = best - lower;
      report.worst_margin = std::min(report.worst_margin, margin);
      ++report.checked;
      if (margin < 0.0) {
        ++report.violations;
        detail::note(report, "seed " + std::to_string(record.seed) +
                                 " episode " + std::to_string(ep.k) +
                                 ": index " + detail::fmt(best) + " < " +
                                 detail::fmt(lower));
      }
    }
  }
  if (report.checked == 0)
    detail::note(report, "no episodes with the confidence set holding");
  report.pass = report.violations == 0;
  return report;
}

/// Suboptimal-index upper bound and ordering on well-visited episodes: when
/// the confidence set holds at tau and every pair (x, pi(x)) of a suboptimal
/// pi has more than n_c visits, the stored quantities must satisfy
///   (1) elementwise |theta - p| < c (1/sqrt2 + 1/sqrt a),
///   (2) I(pi) < alpha(tau) (J(p, pi) + beta Delta_min),
///   (3) I(pi) < I(pi*).
/// Reports how often the precondition triggered; it may never trigger at
/// small horizons because n_c is large.
inline CheckReport verify_lemma4(const MdpModel& model,
                                 const std::vector<RunRecord>& records) {
  CheckReport report;
  report.name = "suboptimal-index-ordering";
  require(!records.empty(), "verify: no records");
  require(detail::same_agent_family(records),
          "verify: records mix agent configurations");
  const GapsResult gaps = policy_gaps(model);
  const StructuralConstants sc = structural_constants(model);
  const TheoremConstants tc =
      make_theorem_constants(sc, model.num_states, model.num_actions,
                             records.front().agent_a, records.front().agent_b);
  if (!tc.admissible) {
    detail::note(report,
                 "bias weight below the admissible threshold; ordering "
                 "constants undefined, nothing to check");
    return report;
  }
  const std::uint64_t horizon = records.front().horizon;
  const double n_c = visit_threshold(tc, horizon);
  const double dev_bound =
      tc.c * (1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(tc.a));
  const index_t nu = model.num_actions;
  detail::note(report, "visit threshold n_c(T) = " + detail::fmt(n_c));

  for (const RunRecord& record : records) {
    for (const EpisodeComputation& ep : record.episodes) {
      if (std::binary_search(record.g1_violation_times.begin(),
                             record.g1_violation_times.end(), ep.tau))
        continue;
      double best_optimal = -kInf;
      for (index_t id : gaps.optimal_ids)
        best_optimal = std::max(best_optimal, ep.indices[id].index_value);
      for (index_t i = 0; i < ep.indices.size(); ++i) {
        if (gaps.j_star - gaps.gains[i] <= 1e-9) continue;  // optimal policy
        const IndexResult& res = ep.indices[i];
        bool triggered = true;
        for (index_t x = 0; x < model.num_states; ++x) {
          const double n = static_cast<double>(
              ep.visit_table[x * nu + res.policy.action(x)]);
          if (n <= n_c) {
            triggered = false;
            break;
          }
        }
        if (!triggered) continue;
        ++report.checked;
        bool bad = false;
        for (index_t x = 0; x < model.num_states && !bad; ++x) {
          const index_t off = model.row_offset(x, res.policy.action(x));
          for (index_t y = 0; y < model.num_states; ++y) {
            const double dev =
                std::abs(res.theta[off + y] - model.transitions[off + y]);
            if (dev >= dev_bound) {
              bad = true;
              break;
            }
          }
        }
        const double upper =
            ep.alpha * (gaps.gains[i] + tc.beta * tc.delta_min) + 1e-6;
        if (res.index_value >= upper) bad = true;
        if (!(res.index_value < best_optimal)) bad = true;
        if (bad) {
          ++report.violations;
          detail::note(report, "seed " + std::to_string(record.seed) +
                                   " episode " + std::to_string(ep.k) +
                                   " policy " + std::to_string(i));
        }
      }
    }
  }
  if (report.checked == 0)
    detail::note(report,
                 "visit precondition never held at this horizon (expected: "
                 "n_c exceeds reachable counts at desk scale)");
  report.pass = report.violations == 0;
  return report;
}

/// Visit-count concentration: the fraction of runs where some pair ends
/// below y/2 - sqrt(y log T) visits must stay within |X||U|/T + 3 sigma.
inline CheckReport verify_lemma6(const MdpModel& model,
                                 const std::vector<RunRecord>& records,
                                 double t_mix) {
  CheckReport report;
  report.name = "visit-count-event";
  require(!records.empty(), "verify: no records");
  std::size_t applicable = 0;
  std::size_t failures = 0;
  for (const RunRecord& record : records) {
    if (record.episodes.empty()) continue;
    ++applicable;
    if (!detail::visit_count_event_holds(model, record, t_mix)) ++failures;
  }
  if (applicable == 0) {
    detail::note(report, "no episodic records; nothing to check");
    return report;
  }
  const double empirical =
      static_cast<double>(failures) / static_cast<double>(applicable);
  const double bound =
      static_cast<double>(model.num_states * model.num_actions) /
      static_cast<double>(records.front().horizon);
  const double allowed = bound + detail::binomial_slack(bound, applicable);
  report.checked = applicable;
  report.violations = failures;
  report.worst_margin = allowed - empirical;
  report.pass = report.worst_margin >= 0.0;
  detail::note(report, "failure frequency " + detail::fmt(empirical) +
                           " vs allowed " + detail::fmt(allowed));
  return report;
}

/// Mixing loss of a fixed gain-optimal policy: from every start state, the
/// Monte Carlo mean of total reward over `num_seeds` runs must reach
/// T J* - t_mix - 3 SE.
inline CheckReport verify_lemma7(const MdpModel& model, std::uint64_t horizon,
                                 index_t num_seeds,
                                 std::uint64_t seed_base = 0xace1u) {
  CheckReport report;
  report.name = "oracle-mixing-loss";
  require(num_seeds >= 2, "verify: need at least two seeds");
  const double t_mix = mixing_time(model);
  const double j_star = optimal_policy(model).gain;
  AgentConfig config;
  config.kind = "oracle";
  for (index_t x = 0; x < model.num_states; ++x) {
    double mean = 0.0, ss = 0.0;
    std::vector<double> totals;
    totals.reserve(num_seeds);
    for (index_t i = 0; i < num_seeds; ++i) {
      const RunRecord r = simulate(model, config, horizon,
                                   seed_base + 7919 * x + i, x);
      totals.push_back(r.total_reward);
      mean += r.total_reward;
    }
    mean /= static_cast<double>(num_seeds);
    for (double v : totals) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(
        ss / (static_cast<double>(num_seeds) * (num_seeds - 1.0)));
    const double required =
        static_cast<double>(horizon) * j_star - t_mix - 3.0 * se;
    const double margin = mean - required;
    report.worst_margin = std::min(report.worst_margin, margin);
    ++report.checked;
    if (margin < 0.0) {
      ++report.violations;
      detail::note(report, "start state " + std::to_string(x) + ": mean " +
                               detail::fmt(mean) + " < required " +
                               detail::fmt(required));
    }
  }
  report.pass = report.violations == 0;
  return report;
}

/// Ceiling check: the mean regret of episodic-index runs must lie below the
/// theorem bound at every power-of-two prefix and at the horizon.
inline CheckReport verify_theorem(const MdpModel& model,
                                  const std::vector<RunRecord>& records,
                                  const RegretSummary& summary) {
  CheckReport report;
  report.name = "regret-ceiling";
  require(!records.empty(), "verify: no records");
  if (records.front().agent_kind != "rbmle") {
    detail::note(report, "records are not index-agent runs; nothing to check");
    return report;
  }
  require(detail::same_agent_family(records),
          "verify: records mix agent configurations");
  const StructuralConstants sc = structural_constants(model);
  const TheoremConstants tc =
      make_theorem_constants(sc, model.num_states, model.num_actions,
                             records.front().agent_a, records.front().agent_b);
  if (!tc.admissible) {
    detail::note(report,
                 "bias weight below the admissible threshold; bound not "
                 "evaluable");
    return report;
  }
  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = 2; t <= summary.horizon; t *= 2) grid.push_back(t);
  if (grid.empty() || grid.back() != summary.horizon)
    grid.push_back(summary.horizon);
  for (std::uint64_t t : grid) {
    const double bound = theorem_bound(tc, t);
    const double mean = summary.mean_curve[t - 1];
    const double margin = bound - mean;
    report.worst_margin = std::min(report.worst_margin, margin);
    ++report.checked;
    if (margin < 0.0) {
      ++report.violations;
      detail::note(report, "T=" + std::to_string(t) + ": mean regret " +
                               detail::fmt(mean) + " above bound " +
                               detail::fmt(bound));
    }
  }
  report.pass = report.violations == 0;
  return report;
}

struct VerificationOptions {
  bool lemma1 = true;
  bool lemma2 = true;
  bool lemma3 = true;
  bool lemma4 = true;
  bool lemma6 = true;
  bool lemma7 = true;
  bool theorem = true;
  index_t lemma7_seeds = 50;
  std::uint64_t lemma7_horizon = 1u << 12;
};

/// Runs every enabled verifier against one batch of records.
inline std::vector<CheckReport> run_verification(
    const MdpModel& model, const std::vector<RunRecord>& records,
    const VerificationOptions& options = {}) {
  std::vector<CheckReport> reports;
  const double t_mix = mixing_time(model);
  if (options.lemma1) reports.push_back(verify_lemma1(model, records));
  if (options.lemma2) reports.push_back(verify_lemma2(records));
  if (options.lemma3) reports.push_back(verify_lemma3(model, records));
  if (options.lemma4) reports.push_back(verify_lemma4(model, records));
  if (options.lemma6) reports.push_back(verify_lemma6(model, records, t_mix));
  if (options.lemma7)
    reports.push_back(
        verify_lemma7(model, options.lemma7_horizon, options.lemma7_seeds));
  if (options.theorem) {
    const RegretSummary summary = expected_regret(model, records, t_mix);
    reports.push_back(verify_theorem(model, records, summary));
  }
  return reports;
}

}  // namespace rbmle

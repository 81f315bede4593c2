#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmle/agents.hpp"
#include "rbmle/common.hpp"
#include "rbmle/index_optimizer.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/simulate.hpp"
#include "rbmle/verify.hpp"

namespace rbmle {

using json = nlohmann::json;

/// Writes text to `path` atomically (temp file + rename) so readers never
/// observe partial files.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& text) {
  std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), "cannot open for writing: " + tmp.string());
    out << text;
    out.flush();
    require(out.good(), "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Model files: {"num_states", "num_actions", "transitions"[x][u][y],
// "rewards"[x][u], optional "support"[x][u][y] 0/1, optional "p_min"}.
// ---------------------------------------------------------------------------

inline json model_to_json(const MdpModel& m) {
  json jt = json::array();
  json jr = json::array();
  json js = json::array();
  for (index_t x = 0; x < m.num_states; ++x) {
    json tx = json::array();
    json rx = json::array();
    json sx = json::array();
    for (index_t u = 0; u < m.num_actions; ++u) {
      json row = json::array();
      json srow = json::array();
      for (index_t y = 0; y < m.num_states; ++y) {
        row.push_back(m.p(x, y, u));
        srow.push_back(m.supported(x, y, u) ? 1 : 0);
      }
      tx.push_back(std::move(row));
      sx.push_back(std::move(srow));
      rx.push_back(m.r(x, u));
    }
    jt.push_back(std::move(tx));
    jr.push_back(std::move(rx));
    js.push_back(std::move(sx));
  }
  return json{{"num_states", m.num_states},
              {"num_actions", m.num_actions},
              {"transitions", std::move(jt)},
              {"rewards", std::move(jr)},
              {"support", std::move(js)},
              {"p_min", m.p_min}};
}

inline MdpModel model_from_json(const json& j) {
  MdpModel m;
  try {
    m.num_states = j.at("num_states").get<index_t>();
    m.num_actions = j.at("num_actions").get<index_t>();
    require(m.num_states >= 1 && m.num_actions >= 1,
            "model: need at least one state and one action");
    m.transitions.assign(m.num_states * m.num_actions * m.num_states, 0.0);
    m.rewards.assign(m.num_states * m.num_actions, 0.0);
    const json& jt = j.at("transitions");
    const json& jr = j.at("rewards");
    require(jt.size() == m.num_states && jr.size() == m.num_states,
            "model: transitions/rewards must have one entry per state");
    for (index_t x = 0; x < m.num_states; ++x) {
      require(jt.at(x).size() == m.num_actions &&
                  jr.at(x).size() == m.num_actions,
              "model: per-state arrays must have one entry per action");
      for (index_t u = 0; u < m.num_actions; ++u) {
        const json& row = jt.at(x).at(u);
        require(row.size() == m.num_states,
                "model: transition rows must have one entry per state");
        for (index_t y = 0; y < m.num_states; ++y)
          m.transitions[m.row_offset(x, u) + y] = row.at(y).get<double>();
        m.rewards[x * m.num_actions + u] = jr.at(x).at(u).get<double>();
      }
    }
    if (j.contains("support")) {
      m.support.assign(m.num_states * m.num_actions * m.num_states, 0);
      const json& js = j.at("support");
      require(js.size() == m.num_states, "model: support shape mismatch");
      for (index_t x = 0; x < m.num_states; ++x)
        for (index_t u = 0; u < m.num_actions; ++u) {
          const json& row = js.at(x).at(u);
          require(row.size() == m.num_states, "model: support shape mismatch");
          for (index_t y = 0; y < m.num_states; ++y)
            m.support[m.row_offset(x, u) + y] =
                row.at(y).get<int>() != 0 ? 1 : 0;
        }
    }
    if (j.contains("p_min")) m.p_min = j.at("p_min").get<double>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("model JSON malformed: ") + e.what());
  }
  return m;
}

inline MdpModel load_model(const std::filesystem::path& path,
                           index_t enumeration_cap = 4096) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse model file " + path.string() + ": " +
                          e.what());
  }
  try {
    return validated_or_throw(model_from_json(j), enumeration_cap);
  } catch (const std::exception& e) {
    throw InvalidArgument("model file " + path.string() + ": " + e.what());
  }
}

inline void save_model(const MdpModel& m, const std::filesystem::path& path) {
  write_text_atomic(path, model_to_json(m).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Run records.
// ---------------------------------------------------------------------------

inline json policy_to_json(const Policy& p) {
  if (p.kind() == Policy::Kind::deterministic)
    return json{{"kind", "deterministic"}, {"actions", p.actions()}};
  return json{{"kind", "randomized"}};
}

inline json index_result_to_json(const IndexResult& r) {
  return json{{"policy", policy_to_json(r.policy)},
              {"index_value", r.index_value},
              {"gain", r.gain},
              {"penalty", r.penalty},
              {"theta", r.theta},
              {"diagnostics",
               {{"iterations_total", r.diagnostics.iterations_total},
                {"converged_starts", r.diagnostics.converged_starts},
                {"best_start", r.diagnostics.best_start},
                {"stationarity", r.diagnostics.stationarity}}}};
}

inline IndexResult index_result_from_json(const json& j) {
  IndexResult r;
  r.policy = Policy::deterministic(
      j.at("policy").at("actions").get<std::vector<index_t>>());
  r.index_value = j.at("index_value").get<double>();
  r.gain = j.at("gain").get<double>();
  r.penalty = j.at("penalty").get<double>();
  r.theta = j.at("theta").get<numvec>();
  const json& d = j.at("diagnostics");
  r.diagnostics.iterations_total = d.at("iterations_total").get<index_t>();
  r.diagnostics.converged_starts = d.at("converged_starts").get<index_t>();
  r.diagnostics.best_start = d.at("best_start").get<index_t>();
  r.diagnostics.stationarity = d.at("stationarity").get<double>();
  return r;
}

inline json run_record_to_json(const RunRecord& r) {
  json eps = json::array();
  for (const EpisodeComputation& ep : r.episodes) {
    json indices = json::array();
    for (const IndexResult& res : ep.indices)
      indices.push_back(index_result_to_json(res));
    eps.push_back(json{{"k", ep.k},
                       {"tau", ep.tau},
                       {"alpha", ep.alpha},
                       {"selected", ep.selected},
                       {"visit_table", ep.visit_table},
                       {"empirical_kernel", ep.empirical_kernel},
                       {"indices", std::move(indices)}});
  }
  return json{{"schema_version", 1},
              {"seed", r.seed},
              {"horizon", r.horizon},
              {"start_state", r.start_state},
              {"agent_kind", r.agent_kind},
              {"agent_a", r.agent_a},
              {"agent_b", r.agent_b},
              {"agent_epsilon", r.agent_epsilon},
              {"states", r.states},
              {"actions", r.actions},
              {"rewards", r.rewards},
              {"total_reward", r.total_reward},
              {"g1_violation_times", r.g1_violation_times},
              {"episodes", std::move(eps)}};
}

inline RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  try {
    r.seed = j.at("seed").get<std::uint64_t>();
    r.horizon = j.at("horizon").get<std::uint64_t>();
    r.start_state = j.at("start_state").get<index_t>();
    r.agent_kind = j.at("agent_kind").get<std::string>();
    r.agent_a = j.at("agent_a").get<double>();
    r.agent_b = j.at("agent_b").get<double>();
    r.agent_epsilon = j.at("agent_epsilon").get<double>();
    r.states = j.at("states").get<std::vector<index_t>>();
    r.actions = j.at("actions").get<std::vector<index_t>>();
    r.rewards = j.at("rewards").get<numvec>();
    r.total_reward = j.at("total_reward").get<double>();
    r.g1_violation_times =
        j.at("g1_violation_times").get<std::vector<std::uint64_t>>();
    for (const json& je : j.at("episodes")) {
      EpisodeComputation ep;
      ep.k = je.at("k").get<index_t>();
      ep.tau = je.at("tau").get<std::uint64_t>();
      ep.alpha = je.at("alpha").get<double>();
      ep.selected = je.at("selected").get<index_t>();
      ep.visit_table = je.at("visit_table").get<std::vector<std::uint64_t>>();
      ep.empirical_kernel = je.at("empirical_kernel").get<numvec>();
      for (const json& ji : je.at("indices"))
        ep.indices.push_back(index_result_from_json(ji));
      r.episodes.push_back(std::move(ep));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("run record JSON malformed: ") +
                          e.what());
  }
  return r;
}

inline void save_run_record(const RunRecord& r,
                            const std::filesystem::path& path) {
  write_text_atomic(path, run_record_to_json(r).dump() + "\n");
}

inline RunRecord load_run_record(const std::filesystem::path& path) {
  try {
    return run_record_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse run record " + path.string() + ": " +
                          e.what());
  }
}

/// Per-timestep trace: t, x, u, r, episode, cumulative_regret (against the
/// supplied optimal gain). Column order is part of the file contract.
inline void write_run_csv(const RunRecord& r, double j_star,
                          const std::filesystem::path& path) {
  std::ostringstream out;
  out << "t,x,u,r,episode,cumulative_regret\n";
  double cum = 0.0;
  for (std::uint64_t t = 1; t <= r.horizon; ++t) {
    cum += r.rewards[t - 1];
    const double regret = j_star * static_cast<double>(t) - cum;
    out << t << ',' << r.states[t - 1] << ',' << r.actions[t - 1] << ','
        << r.rewards[t - 1] << ',' << EpisodeSchedule::episode_of(t) << ','
        << regret << '\n';
  }
  write_text_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

inline json check_report_to_json(const CheckReport& r) {
  return json{{"name", r.name},         {"pass", r.pass},
              {"checked", r.checked},   {"violations", r.violations},
              {"worst_margin", r.worst_margin}, {"notes", r.notes}};
}

inline json regret_summary_to_json(const RegretSummary& s) {
  json runs = json::array();
  for (const RunRegret& run : s.runs)
    runs.push_back(json{{"total", run.total},
                        {"r1", run.r1},
                        {"r2", run.r2},
                        {"r3", run.r3},
                        {"r4", run.r4},
                        {"g2_holds", run.g2_holds},
                        {"per_episode", run.per_episode},
                        {"episode_bucket", run.episode_bucket}});
  return json{{"j_star", s.j_star},
              {"horizon", s.horizon},
              {"mean_total", s.mean_total},
              {"stderr_total", s.stderr_total},
              {"mean_r1", s.mean_r1},
              {"mean_r2", s.mean_r2},
              {"mean_r3", s.mean_r3},
              {"mean_r4", s.mean_r4},
              {"runs", std::move(runs)}};
}

/// Mean regret curve: t, mean_regret, stderr. One row per time step.
inline void write_mean_regret_csv(const RegretSummary& s,
                                  const std::filesystem::path& path) {
  std::ostringstream out;
  out << "t,mean_regret,stderr\n";
  for (std::uint64_t t = 1; t <= s.horizon; ++t)
    out << t << ',' << s.mean_curve[t - 1] << ',' << s.stderr_curve[t - 1]
        << '\n';
  write_text_atomic(path, out.str());
}

}  // namespace rbmle

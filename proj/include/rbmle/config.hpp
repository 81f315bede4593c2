#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmle/agents.hpp"
#include "rbmle/common.hpp"
#include "rbmle/io.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/verify.hpp"

namespace rbmle {

/// One experiment: a validated model, an agent, a horizon, and seeds.
/// Parsed from versioned JSON; see README for the schema.
struct ExperimentConfig {
  MdpModel model;
  std::string model_source;  // file path or "generator"
  AgentConfig agent;
  std::uint64_t horizon = 1024;
  std::vector<std::uint64_t> seeds;
  index_t start_state = 0;
  std::filesystem::path output_dir = "out";
  VerificationOptions verify;
};

namespace detail {

template <typename T>
T field(const json& j, const std::string& path, const std::string& key,
        const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("config field '" + path + "." + key +
                          "': wrong type");
  }
}

template <typename T>
T required_field(const json& j, const std::string& path,
                 const std::string& key) {
  if (!j.contains(key))
    throw InvalidArgument("config field '" + path + "." + key + "' missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("config field '" + path + "." + key +
                          "': wrong type");
  }
}

}  // namespace detail

inline AgentConfig agent_config_from_json(const json& j,
                                          const std::string& path) {
  AgentConfig a;
  a.kind = detail::field<std::string>(j, path, "kind", a.kind);
  a.a = detail::field<double>(j, path, "a", a.a);
  a.b = detail::field<double>(j, path, "b", a.b);
  a.epsilon = detail::field<double>(j, path, "epsilon", a.epsilon);
  a.enumeration_cap =
      detail::field<index_t>(j, path, "enumeration_cap", a.enumeration_cap);
  a.record_episodes =
      detail::field<bool>(j, path, "record_episodes", a.record_episodes);
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    const std::string op = path + ".optimizer";
    a.optimizer.restarts =
        detail::field<index_t>(o, op, "restarts", a.optimizer.restarts);
    a.optimizer.max_iterations = detail::field<index_t>(
        o, op, "max_iterations", a.optimizer.max_iterations);
    a.optimizer.objective_tol = detail::field<double>(
        o, op, "objective_tol", a.optimizer.objective_tol);
    a.optimizer.gradient_tol =
        detail::field<double>(o, op, "gradient_tol", a.optimizer.gradient_tol);
    a.optimizer.interior_floor = detail::field<double>(
        o, op, "interior_floor", a.optimizer.interior_floor);
  }
  return a;
}

/// Parses and fully validates an experiment file. Model file references are
/// resolved relative to the config file's directory; a relative output_dir
/// is placed under $RBMLE_OUTPUT_ROOT when that variable is set.
inline ExperimentConfig load_experiment_config(
    const std::filesystem::path& config_path) {
  json j;
  try {
    j = json::parse(read_text(config_path));
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse config " + config_path.string() +
                          ": " + e.what());
  }
  ExperimentConfig cfg;
  const int version = detail::field<int>(j, "", "schema_version", 1);
  require(version == 1, "config schema_version " + std::to_string(version) +
                            " not supported");

  if (!j.contains("model"))
    throw InvalidArgument("config field 'model' missing");
  const json& jm = j.at("model");
  if (jm.contains("file")) {
    std::filesystem::path p = jm.at("file").get<std::string>();
    if (p.is_relative()) p = config_path.parent_path() / p;
    if (!std::filesystem::exists(p))
      throw InvalidArgument("config field 'model.file': no such file: " +
                            p.string());
    cfg.model = load_model(p);
    cfg.model_source = p.string();
  } else if (jm.contains("generator")) {
    const json& g = jm.at("generator");
    const std::string gp = "model.generator";
    const index_t nx = detail::required_field<index_t>(g, gp, "num_states");
    const index_t nu = detail::required_field<index_t>(g, gp, "num_actions");
    const double p_min = detail::field<double>(g, gp, "p_min", 0.05);
    const std::uint64_t seed =
        detail::field<std::uint64_t>(g, gp, "seed", 1u);
    const double reward_floor =
        detail::field<double>(g, gp, "reward_floor", 0.05);
    cfg.model = validated_or_throw(
        generate_random_model(nx, nu, p_min, seed, reward_floor));
    cfg.model_source = "generator";
  } else {
    throw InvalidArgument(
        "config field 'model': need either 'file' or 'generator'");
  }

  if (j.contains("agent"))
    cfg.agent = agent_config_from_json(j.at("agent"), "agent");

  cfg.horizon = detail::field<std::uint64_t>(j, "", "horizon", cfg.horizon);
  require(cfg.horizon >= 2, "config field 'horizon': need >= 2");

  if (j.contains("seeds")) {
    const json& js = j.at("seeds");
    if (js.is_array()) {
      cfg.seeds = js.get<std::vector<std::uint64_t>>();
    } else if (js.is_object()) {
      const std::uint64_t start =
          detail::field<std::uint64_t>(js, "seeds", "start", 1u);
      const std::uint64_t count =
          detail::required_field<std::uint64_t>(js, "seeds", "count");
      for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(start + i);
    } else {
      throw InvalidArgument(
          "config field 'seeds': need an array or {start, count}");
    }
  } else {
    cfg.seeds = {1};
  }
  require(!cfg.seeds.empty(), "config field 'seeds': need at least one seed");

  cfg.start_state = detail::field<index_t>(j, "", "start_state", 0);
  require(cfg.start_state < cfg.model.num_states,
          "config field 'start_state': out of range");

  std::filesystem::path out =
      detail::field<std::string>(j, "", "output_dir", "out");
  if (out.is_relative()) {
    if (const char* root = std::getenv("RBMLE_OUTPUT_ROOT"))
      out = std::filesystem::path(root) / out;
  }
  cfg.output_dir = out;

  if (j.contains("verify")) {
    const json& v = j.at("verify");
    cfg.verify.lemma1 = detail::field<bool>(v, "verify", "lemma1", true);
    cfg.verify.lemma2 = detail::field<bool>(v, "verify", "lemma2", true);
    cfg.verify.lemma3 = detail::field<bool>(v, "verify", "lemma3", true);
    cfg.verify.lemma4 = detail::field<bool>(v, "verify", "lemma4", true);
    cfg.verify.lemma6 = detail::field<bool>(v, "verify", "lemma6", true);
    cfg.verify.lemma7 = detail::field<bool>(v, "verify", "lemma7", true);
    cfg.verify.theorem = detail::field<bool>(v, "verify", "theorem", true);
    cfg.verify.lemma7_seeds = detail::field<index_t>(
        v, "verify", "lemma7_seeds", cfg.verify.lemma7_seeds);
    cfg.verify.lemma7_horizon = detail::field<std::uint64_t>(
        v, "verify", "lemma7_horizon", cfg.verify.lemma7_horizon);
  }
  return cfg;
}

}  // namespace rbmle

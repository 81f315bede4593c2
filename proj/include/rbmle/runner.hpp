#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmle/config.hpp"
#include "rbmle/ergodic.hpp"
#include "rbmle/io.hpp"
#include "rbmle/simulate.hpp"
#include "rbmle/verify.hpp"

namespace rbmle {

/// Result of executing an experiment: the in-memory records plus the paths
/// of everything written to disk.
struct ExperimentResult {
  std::vector<RunRecord> records;
  RegretSummary summary;
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> record_files;
  std::filesystem::path summary_file;
  std::filesystem::path mean_curve_file;
};

/// Runs every seed of the experiment, writes run_<seed>.json + run_<seed>.csv,
/// summary.json and regret_mean.csv to config.output_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       std::ostream* log = nullptr) {
  ExperimentResult result;
  result.output_dir = config.output_dir;
  std::filesystem::create_directories(config.output_dir);

  const OptimalPolicyResult opt = optimal_policy(config.model);
  for (std::uint64_t seed : config.seeds) {
    RunRecord record = simulate(config.model, config.agent, config.horizon,
                                seed, config.start_state);
    const std::filesystem::path base =
        config.output_dir / ("run_" + std::to_string(seed));
    std::filesystem::path json_path = base;
    json_path += ".json";
    std::filesystem::path csv_path = base;
    csv_path += ".csv";
    save_run_record(record, json_path);
    write_run_csv(record, opt.gain, csv_path);
    result.record_files.push_back(json_path);
    result.records.push_back(std::move(record));
    if (log)
      (*log) << "seed " << seed << ": total reward "
             << result.records.back().total_reward << "\n";
  }

  const double t_mix = mixing_time(config.model);
  result.summary = expected_regret(config.model, result.records, t_mix);

  json js = regret_summary_to_json(result.summary);
  js["agent"] = {{"kind", config.agent.kind},
                 {"a", config.agent.a},
                 {"b", config.agent.b},
                 {"epsilon", config.agent.epsilon}};
  js["model_source"] = config.model_source;
  js["start_state"] = config.start_state;
  result.summary_file = config.output_dir / "summary.json";
  write_text_atomic(result.summary_file, js.dump(2) + "\n");

  result.mean_curve_file = config.output_dir / "regret_mean.csv";
  write_mean_regret_csv(result.summary, result.mean_curve_file);
  return result;
}

/// Loads every run_*.json under `dir`, sorted by filename.
inline std::vector<RunRecord> load_run_records(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir))
    throw InvalidArgument("no such record directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("run_", 0) == 0 &&
        entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(load_run_record(f));
  if (records.empty())
    throw InvalidArgument("no run_*.json records in " + dir.string());
  return records;
}

struct VerifyExperimentResult {
  std::vector<CheckReport> reports;
  bool all_pass = true;
  std::filesystem::path report_file;
};

/// Runs the verification suite over stored records and writes
/// verify_report.json next to them (or to `out_dir` when given).
inline VerifyExperimentResult verify_experiment(
    const MdpModel& model, const std::vector<RunRecord>& records,
    const VerificationOptions& options, const std::filesystem::path& out_dir) {
  VerifyExperimentResult result;
  result.reports = run_verification(model, records, options);
  for (const auto& r : result.reports) result.all_pass &= r.pass;

  json j;
  j["schema_version"] = 1;
  j["all_pass"] = result.all_pass;
  j["checks"] = json::array();
  for (const auto& r : result.reports) j["checks"].push_back(check_report_to_json(r));
  std::filesystem::create_directories(out_dir);
  result.report_file = out_dir / "verify_report.json";
  write_text_atomic(result.report_file, j.dump(2) + "\n");
  return result;
}

/// Groups stored records by agent kind and writes one mean-regret CSV per
/// group: report_<kind>.csv with columns t,mean_regret,stderr.
inline std::vector<std::filesystem::path> write_agent_reports(
    const MdpModel& model, const std::vector<RunRecord>& records,
    const std::filesystem::path& out_dir) {
  std::map<std::string, std::vector<RunRecord>> by_kind;
  for (const auto& r : records) by_kind[r.agent_kind].push_back(r);
  const double t_mix = mixing_time(model);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [kind, group] : by_kind) {
    const RegretSummary summary = expected_regret(model, group, t_mix);
    const std::filesystem::path path = out_dir / ("report_" + kind + ".csv");
    write_mean_regret_csv(summary, path);
    written.push_back(path);
  }
  return written;
}

}  // namespace rbmle

// Command-line front end: run experiments, verify stored records against the
// regret analysis, print model constants, and summarize record directories.
//
// Exit codes: 0 success, 2 bad configuration or arguments, 3 runtime failure,
// 4 verification failed.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <rbmle/rbmle.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerify = 4;

struct Overrides {
  std::string out;
  std::string agent;
  double a = -1.0;
  double b = -1.0;
  double epsilon = -1.0;
  std::uint64_t horizon = 0;
  std::uint64_t seeds = 0;
  std::uint64_t seed_start = 0;
};

rbmle::ExperimentConfig load_with_overrides(const std::string& config_path,
                                            const Overrides& o) {
  rbmle::ExperimentConfig cfg =
      rbmle::load_experiment_config(config_path);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.agent.empty()) cfg.agent.kind = o.agent;
  if (o.a >= 0.0) cfg.agent.a = o.a;
  if (o.b >= 0.0) cfg.agent.b = o.b;
  if (o.epsilon >= 0.0) cfg.agent.epsilon = o.epsilon;
  if (o.horizon > 0) cfg.horizon = o.horizon;
  if (o.seeds > 0) {
    const std::uint64_t start = o.seed_start > 0 ? o.seed_start : 1;
    cfg.seeds.clear();
    for (std::uint64_t i = 0; i < o.seeds; ++i) cfg.seeds.push_back(start + i);
  } else if (o.seed_start > 0) {
    throw rbmle::InvalidArgument("--seed-start needs --seeds");
  }
  return cfg;
}

int cmd_run(const std::string& config_path, const Overrides& o, bool quiet) {
  const rbmle::ExperimentConfig cfg = load_with_overrides(config_path, o);
  const rbmle::ExperimentResult result =
      rbmle::run_experiment(cfg, quiet ? nullptr : &std::cerr);
  std::cout << "wrote " << result.record_files.size() << " runs to "
            << result.output_dir.string() << "\n"
            << "mean final regret " << result.summary.mean_total << " +/- "
            << result.summary.stderr_total << " over horizon " << cfg.horizon
            << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const Overrides& o,
               std::string records_dir) {
  const rbmle::ExperimentConfig cfg = load_with_overrides(config_path, o);
  if (records_dir.empty()) records_dir = cfg.output_dir.string();
  const std::vector<rbmle::RunRecord> records =
      rbmle::load_run_records(records_dir);
  const rbmle::VerifyExperimentResult result =
      rbmle::verify_experiment(cfg.model, records, cfg.verify, records_dir);
  for (const auto& report : result.reports) {
    std::cout << (report.pass ? "PASS" : "FAIL") << "  " << report.name << " ("
              << report.violations << "/" << report.checked << " violations)";
    for (const auto& line : report.notes) std::cout << "\n      " << line;
    std::cout << "\n";
  }
  std::cout << "report: " << result.report_file.string() << "\n";
  return result.all_pass ? kExitOk : kExitVerify;
}

int cmd_constants(const std::string& config_path,
                  const std::string& model_path, const Overrides& o) {
  rbmle::MdpModel m;
  double default_a = 1.0;
  double default_b = 3.0;
  if (!model_path.empty()) {
    m = rbmle::load_model(model_path);
  } else if (!config_path.empty()) {
    const rbmle::ExperimentConfig cfg = load_with_overrides(config_path, o);
    m = cfg.model;
    default_a = cfg.agent.a;
    default_b = cfg.agent.b;
  } else {
    throw rbmle::InvalidArgument("constants: need --config or --model");
  }
  const rbmle::StructuralConstants sc = rbmle::structural_constants(m);
  const double threshold = rbmle::BiasSchedule::admissibility_threshold(
      m.num_states, m.num_actions, m.p_min, sc.delta_min);

  std::cout << std::setprecision(10);
  std::cout << "states " << m.num_states << ", actions " << m.num_actions
            << ", p_min " << m.p_min << "\n"
            << "optimal gain J*        " << sc.j_star << "\n"
            << "gain gap Delta_min     " << sc.delta_min << "\n"
            << "mixing time T_p        " << sc.t_mix << "\n"
            << "conductivity kappa_p   " << sc.kappa << "\n"
            << "admissible bias a >    " << threshold << "\n";

  const double a = o.a >= 0.0 ? o.a : default_a;
  const double b = o.b >= 0.0 ? o.b : default_b;
  const rbmle::TheoremConstants tc =
      rbmle::make_theorem_constants(sc, m.num_states, m.num_actions, a, b);
  std::cout << "bias weight a          " << a << " ("
            << (tc.admissible ? "admissible" : "NOT admissible") << ")\n"
            << "exploration gamma      " << tc.gamma << "\n";
  if (tc.admissible) {
    std::cout << "beta (midpoint)        " << tc.beta << " of (0, "
              << tc.beta_upper << ")\n"
              << "deviation scale c      " << tc.c << "\n"
              << "regret bound by horizon:\n";
    for (std::uint64_t t = 1u << 8; t <= (1u << 16); t <<= 2) {
      std::cout << "  T=" << std::setw(6) << t << "  bound "
                << rbmle::theorem_bound(tc, t) << "  visit threshold n_c "
                << rbmle::visit_threshold(tc, t) << "\n";
    }
  } else {
    std::cout << "(bound not evaluable below the admissible threshold)\n";
  }
  return kExitOk;
}

int cmd_report(const std::string& config_path, const Overrides& o,
               std::string records_dir, std::string out_dir) {
  const rbmle::ExperimentConfig cfg = load_with_overrides(config_path, o);
  if (records_dir.empty()) records_dir = cfg.output_dir.string();
  if (out_dir.empty()) out_dir = records_dir;
  const std::vector<rbmle::RunRecord> records =
      rbmle::load_run_records(records_dir);
  const std::vector<std::filesystem::path> written =
      rbmle::write_agent_reports(cfg.model, records, out_dir);
  for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Episodic index policies for average-reward MDPs: simulation, "
      "verification, and reporting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string records_dir;
  std::string out_dir;
  bool quiet = false;
  Overrides o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON")
        ->required();
    cmd->add_option("--out", o.out, "override output directory");
    cmd->add_option("--agent", o.agent,
                    "override agent kind (rbmle|ce|epsilon|oracle|uniform)");
    cmd->add_option("--a", o.a, "override bias weight a");
    cmd->add_option("--b", o.b, "override deviation exponent b");
    cmd->add_option("--epsilon", o.epsilon, "override exploration rate");
    cmd->add_option("--horizon", o.horizon, "override horizon");
    cmd->add_option("--seeds", o.seeds, "override: run this many seeds");
    cmd->add_option("--seed-start", o.seed_start, "first seed (with --seeds)");
  };

  CLI::App* run = app.add_subcommand("run", "simulate and write run records");
  add_common(run);
  run->add_flag("--quiet", quiet, "suppress per-seed progress");

  CLI::App* verify =
      app.add_subcommand("verify", "check stored records against the analysis");
  add_common(verify);
  verify->add_option("--records", records_dir,
                     "record directory (default: config output_dir)");

  std::string model_path;
  CLI::App* constants =
      app.add_subcommand("constants", "print model and bound constants");
  constants->add_option("--config", config_path, "experiment config JSON");
  constants->add_option("--model", model_path,
                        "model JSON (alternative to --config)");
  constants->add_option("--a", o.a, "bias weight a");
  constants->add_option("--b", o.b, "deviation exponent b");

  CLI::App* report = app.add_subcommand(
      "report", "per-agent mean regret curves from stored records");
  add_common(report);
  report->add_option("--records", records_dir,
                     "record directory (default: config output_dir)");
  report->add_option("--report-out", out_dir,
                     "where to write report CSVs (default: records dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path, o, quiet);
    if (app.got_subcommand(verify))
      return cmd_verify(config_path, o, records_dir);
    if (app.got_subcommand(constants))
      return cmd_constants(config_path, model_path, o);
    if (app.got_subcommand(report))
      return cmd_report(config_path, o, records_dir, out_dir);
  } catch (const rbmle::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

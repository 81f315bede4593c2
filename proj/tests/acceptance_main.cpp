// Acceptance gate: the release-blocking behaviors of the library, exercised
// end to end on the shipped reference configurations. Each numbered line
// reports one criterion as PASS or FAIL; the process exits 0 only when every
// criterion passes. Expensive batches are deterministic (fixed seed lists),
// so every number printed here is reproducible bit for bit.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <rbmle/rbmle.hpp>

#include "oracles.hpp"

namespace {

using rbmle::AgentConfig;
using rbmle::CheckReport;
using rbmle::index_t;
using rbmle::MdpModel;
using rbmle::Policy;
using rbmle::RegretSummary;
using rbmle::RunRecord;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::uint64_t> seed_range(std::uint64_t first,
                                      std::uint64_t count) {
  std::vector<std::uint64_t> seeds(count);
  std::iota(seeds.begin(), seeds.end(), first);
  return seeds;
}

void report(const char* tag, const char* name, const Outcome& o) {
  std::printf("[%s] %s  %-34s %s\n", tag, o.pass ? "PASS" : "FAIL", name,
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string describe(const CheckReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: checked=%zu violations=%zu margin=%.3g",
                r.name.c_str(), static_cast<std::size_t>(r.checked),
                static_cast<std::size_t>(r.violations), r.worst_margin);
  return buf;
}

AgentConfig index_config(double a) {
  AgentConfig cfg;
  cfg.kind = "rbmle";
  cfg.a = a;
  cfg.b = 3.0;
  return cfg;
}

// --- reference models -------------------------------------------------------

Outcome check_reference_models(const MdpModel& m0, const MdpModel& trap,
                               const rbmle::StructuralConstants& sc) {
  const auto gaps = rbmle::policy_gaps(m0);
  const auto trap_gaps = rbmle::policy_gaps(trap);
  const bool ok = std::abs(sc.j_star - 0.86) < 1e-9 &&
                  std::abs(sc.delta_min - 0.115) < 1e-9 &&
                  std::abs(sc.t_mix - 10.0) < 1e-9 &&
                  std::abs(sc.kappa - 4.5) < 1e-9 &&
                  std::abs(sc.p_min - 0.1) < 1e-12 &&
                  gaps.optimal_ids.size() == 1 &&
                  gaps.policies[gaps.optimal_ids[0]] ==
                      Policy::deterministic({0, 0}) &&
                  std::abs(trap_gaps.j_star - 0.905) < 1e-9 &&
                  trap_gaps.optimal_ids.size() == 1 &&
                  trap_gaps.policies[trap_gaps.optimal_ids[0]] ==
                      Policy::deterministic({1, 1});
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "J*=%.6f Delta=%.6f T_p=%.1f kappa=%.2f p_min=%.2f; "
                "lure model J*=%.6f",
                sc.j_star, sc.delta_min, sc.t_mix, sc.kappa, sc.p_min,
                trap_gaps.j_star);
  return {ok, buf};
}

// --- criterion 1: gain solver exactness --------------------------------------

Outcome solver_exactness() {
  const auto t0 = Clock::now();
  const index_t sizes[6][2] = {{2, 2}, {3, 2}, {4, 2}, {2, 3}, {3, 3}, {4, 3}};
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const index_t nx = sizes[i % 6][0];
    const index_t nu = sizes[i % 6][1];
    const double p_floor = (i % 2 == 0) ? 0.05 : 0.12;
    const MdpModel m =
        rbmle::generate_random_model(nx, nu, p_floor, 1000 + i);
    // cap = 1 suppresses the enumeration cross-check inside optimal_policy,
    // so its gain is the raw policy-iteration answer.
    const auto pi = rbmle::optimal_policy(m, 1);
    double best = -rbmle::kInf;
    for (const Policy& p : rbmle::enumerate_policies(nx, nu))
      best = std::max(best, rbmle::evaluate_policy(m, p).gain);
    worst = std::max(worst, std::abs(pi.gain - best));
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "50 models, worst |J_pi - J_enum| = %.3g (tol 1e-10), %.2fs "
                "(limit 10s)",
                worst, secs);
  return {worst <= 1e-10 && secs < 10.0, buf};
}

// --- criterion 2: index optimizer vs. brute-force grid -----------------------

Outcome optimizer_grid_equivalence(const MdpModel& m0) {
  const auto t0 = Clock::now();
  const rbmle::KnownModelInfo info = rbmle::known_info(m0);
  std::mt19937_64 rng(424242);
  double worst = 0.0;
  int comparisons = 0;
  for (int c = 0; c < 25; ++c) {
    rbmle::TransitionCounts counts(2, 2);
    for (index_t x = 0; x < 2; ++x)
      for (index_t u = 0; u < 2; ++u) {
        const std::uint64_t scale = rng() % 4;  // 0 leaves the pair unvisited
        std::uint64_t n = 0;
        if (scale == 1) n = 1 + rng() % 20;
        if (scale == 2) n = 50 + rng() % 450;
        if (scale == 3) n = 2000 + rng() % 18000;
        const std::uint64_t n0 = (n == 0) ? 0 : rng() % (n + 1);
        oracle::fill_counts(counts, x, u, {n0, n - n0});
      }
    double alpha = static_cast<double>(rng() % 150000) / 100.0;
    if (c == 0) alpha = 0.0;  // degenerate weight must also agree
    if (c == 1) alpha = 0.5;
    for (const Policy& p : rbmle::enumerate_policies(2, 2)) {
      const auto res = rbmle::optimize_biased_model(info, p, counts, alpha);
      const auto objective =
          oracle::make_two_state_objective(m0, p.actions(), counts, alpha);
      const double grid = oracle::grid_index_value(objective);
      worst = std::max(worst, std::abs(res.index_value - grid));
      ++comparisons;
    }
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d indices, worst |opt - grid| = %.3g (tol 1e-3), %.2fs "
                "(limit 60s)",
                comparisons, worst, secs);
  return {worst <= 1e-3 && secs < 60.0, buf};
}

// --- criteria on the audited index-agent batch --------------------------------

Outcome zero_violation_check(const CheckReport& r, double secs) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s, %.2fs", describe(r).c_str(), secs);
  return {r.pass && r.violations == 0, buf};
}

Outcome frequency_check(const CheckReport& r, double secs) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s, %.2fs", describe(r).c_str(), secs);
  return {r.pass, buf};
}

Outcome two_check(const CheckReport& a, const CheckReport& b, bool zero,
                  double secs) {
  char buf[340];
  std::snprintf(buf, sizeof buf, "%s; %s, %.2fs", describe(a).c_str(),
                describe(b).c_str(), secs);
  const bool ok = a.pass && b.pass &&
                  (!zero || (a.violations == 0 && b.violations == 0));
  return {ok, buf};
}

// --- criterion 6: regret ceiling and sublinearity -----------------------------

Outcome regret_ceiling(const MdpModel& m0,
                       const rbmle::StructuralConstants& sc) {
  const auto t0 = Clock::now();
  const auto records =
      rbmle::run_many(m0, index_config(700.0), 1u << 14, seed_range(1, 100));
  const RegretSummary s = rbmle::expected_regret(m0, records, sc.t_mix);
  const auto tc = rbmle::make_theorem_constants(sc, 2, 2, 700.0, 3.0);
  bool below = tc.admissible;
  double worst_ratio = 0.0;
  for (int k : {10, 12, 14}) {
    const std::uint64_t T = 1ull << k;
    const double regret = s.mean_curve[T - 1];
    const double bound = rbmle::theorem_bound(tc, T);
    below = below && regret <= bound;
    worst_ratio = std::max(worst_ratio, regret / bound);
  }
  const double lhs = s.mean_curve[(1u << 14) - 1] / std::pow(2.0, 14);
  const double rhs = 0.5 * s.mean_curve[(1u << 10) - 1] / std::pow(2.0, 10);
  const double secs = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "100 seeds, worst regret/bound = %.3g; mean rate %.5f vs half "
                "of early rate %.5f, %.2fs",
                worst_ratio, lhs, rhs, secs);
  return {below && lhs < rhs, buf};
}

// --- criterion 7: logarithmic growth of mean regret ---------------------------

Outcome log_growth(const MdpModel& m0, const rbmle::StructuralConstants& sc) {
  const auto t0 = Clock::now();
  const auto records =
      rbmle::run_many(m0, index_config(50.0), 1u << 14, seed_range(1, 400));
  const RegretSummary s = rbmle::expected_regret(m0, records, sc.t_mix);
  std::vector<double> xs, ys;
  for (int k = 8; k <= 14; ++k) {
    xs.push_back(std::log(std::pow(2.0, k)));
    ys.push_back(s.mean_curve[(1ull << k) - 1]);
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = (sxy * sxy) / (sxx * syy);
  const double secs = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "400 seeds, R^2 of mean regret vs log T = %.4f (need >= 0.9), "
                "slope %.1f, %.2fs",
                r2, sxy / sxx, secs);
  return {r2 >= 0.9 && sxy / sxx > 0.0, buf};
}

// --- criterion 8: separation from the certainty-equivalence baseline ----------

Outcome baseline_separation(const MdpModel& trap) {
  const auto t0 = Clock::now();
  const double t_mix = rbmle::mixing_time(trap);
  const auto seeds = seed_range(1, 128);
  const auto rb_records =
      rbmle::run_many(trap, index_config(20.0), 1u << 14, seeds);
  AgentConfig ce;
  ce.kind = "ce";
  const auto ce_records = rbmle::run_many(trap, ce, 1u << 14, seeds);
  const RegretSummary rb = rbmle::expected_regret(trap, rb_records, t_mix);
  const RegretSummary cs = rbmle::expected_regret(trap, ce_records, t_mix);
  const double diff = cs.mean_total - rb.mean_total;
  const double se = std::sqrt(rb.stderr_total * rb.stderr_total +
                              cs.stderr_total * cs.stderr_total);
  const double secs = seconds_since(t0);
  char buf[220];
  std::snprintf(buf, sizeof buf,
                "128 seeds: index %.1f+-%.1f vs greedy %.1f+-%.1f, gap %.1f "
                "vs 2SE %.1f, %.2fs",
                rb.mean_total, rb.stderr_total, cs.mean_total, cs.stderr_total,
                diff, 2.0 * se, secs);
  return {diff >= 2.0 * se, buf};
}

// --- criterion 10: bitwise determinism ----------------------------------------

Outcome determinism(const MdpModel& m0, const MdpModel& trap) {
  const auto t0 = Clock::now();
  AgentConfig ce;
  ce.kind = "ce";
  const auto dump = [](const MdpModel& m, const AgentConfig& cfg,
                       std::uint64_t seed) {
    return rbmle::run_record_to_json(rbmle::simulate(m, cfg, 1u << 12, seed))
        .dump();
  };
  const bool identical = dump(m0, index_config(700.0), 7) ==
                             dump(m0, index_config(700.0), 7) &&
                         dump(trap, ce, 9) == dump(trap, ce, 9);
  const bool distinct =
      dump(m0, index_config(700.0), 7) != dump(m0, index_config(700.0), 8);
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "repeat runs byte-identical: %s; distinct seeds differ: %s, "
                "%.2fs",
                identical ? "yes" : "no", distinct ? "yes" : "no", secs);
  return {identical && distinct, buf};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <configs-dir>\n", argv[0]);
    return 2;
  }
  const std::filesystem::path configs(argv[1]);
  MdpModel m0, trap;
  try {
    m0 = rbmle::load_model(configs / "m0.json");
    trap = rbmle::load_model(configs / "trap.json");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot load reference models: %s\n", e.what());
    return 2;
  }
  const auto sc = rbmle::structural_constants(m0);

  report("M0", "reference-model-constants",
         check_reference_models(m0, trap, sc));
  report(" 1", "gain-solver-exactness", solver_exactness());
  report(" 2", "index-optimizer-grid-equivalence",
         optimizer_grid_equivalence(m0));

  // One audited batch feeds criteria 3, 4, 5, and 9: the shipped index agent
  // at an admissible weight, 200 seeds, horizon 4096, full episode logs.
  auto t0 = Clock::now();
  auto audit =
      rbmle::run_many(m0, index_config(700.0), 1u << 12, seed_range(1, 200));
  const double batch_secs = seconds_since(t0);

  t0 = Clock::now();
  report(" 3", "index-kernel-deviation",
         zero_violation_check(rbmle::verify_lemma2(audit),
                              batch_secs + seconds_since(t0)));
  t0 = Clock::now();
  report(" 4", "confidence-failure-frequency",
         frequency_check(rbmle::verify_lemma1(m0, audit), seconds_since(t0)));
  t0 = Clock::now();
  report(" 5", "index-ordering-bounds",
         two_check(rbmle::verify_lemma3(m0, audit),
                   rbmle::verify_lemma4(m0, audit), true, seconds_since(t0)));

  report(" 6", "regret-ceiling-and-sublinearity", regret_ceiling(m0, sc));
  report(" 7", "log-growth-fit", log_growth(m0, sc));
  report(" 8", "baseline-separation", baseline_separation(trap));

  t0 = Clock::now();
  report(" 9", "visit-counts-and-mixing-loss",
         two_check(rbmle::verify_lemma6(m0, audit, sc.t_mix),
                   rbmle::verify_lemma7(m0, 1u << 12, 50), false,
                   seconds_since(t0)));
  audit.clear();
  audit.shrink_to_fit();

  report("10", "bitwise-determinism", determinism(m0, trap));

  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}

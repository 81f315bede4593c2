#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rbmle/chain.hpp"
#include "rbmle/common.hpp"
#include "rbmle/confidence.hpp"
#include "rbmle/counts.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/random.hpp"
#include "rbmle/solvers.hpp"

namespace rbmle {

struct OptimizerOptions {
  index_t restarts = 8;
  index_t max_iterations = 5000;
  double objective_tol = 1e-10;  // relative objective-change stop
  double gradient_tol = 1e-8;    // simplex-metric stationarity stop
  double interior_floor = 1e-12;
};

struct OptimizerDiagnostics {
  index_t iterations_total = 0;
  index_t converged_starts = 0;
  index_t best_start = 0;
  double stationarity = 0.0;  // at the returned kernel
};

/// Outcome of maximizing  alpha * gain(theta, policy) - sum_x w_x KL(q_x, theta_x)
/// over kernels theta that agree with the fitted model on every row the
/// policy does not exercise.
struct IndexResult {
  Policy policy{Policy::uniform(1, 1)};
  double index_value = 0.0;
  double gain = 0.0;
  double penalty = 0.0;
  numvec theta;  // full kernel, model layout
  OptimizerDiagnostics diagnostics;
};

namespace detail {

/// Controlled row (x, policy(x)) in optimizer-local form. Rows whose support
/// is a single state carry no free variables; they stay pinned forever.
struct ControlledRow {
  index_t state = 0;
  std::vector<index_t> support;  // successor states with positive mass
  numvec empirical;              // aligned with support; zeros allowed
  double weight = 0.0;           // visit count of (x, policy(x))
  bool free = false;             // more than one supported successor
};

struct RowWorkspace {
  std::vector<ControlledRow> rows;
  numvec rewards;           // r(x, policy(x))
  ChainMatrix chain;        // current iterate, nx-by-nx
  std::vector<numvec> dirs; // scratch: per-row gradient aligned with support
};

inline RowWorkspace make_row_workspace(const KnownModelInfo& info,
                                       const Policy& policy,
                                       const TransitionCounts& counts) {
  require(policy.kind() == Policy::Kind::deterministic,
          "index optimizer expects a deterministic policy");
  const index_t nx = info.num_states;
  RowWorkspace ws;
  ws.rows.resize(nx);
  ws.rewards.resize(nx);
  ws.chain = ChainMatrix(nx);
  ws.dirs.resize(nx);
  for (index_t x = 0; x < nx; ++x) {
    const index_t u = policy.action(x);
    ControlledRow& row = ws.rows[x];
    row.state = x;
    for (index_t y = 0; y < nx; ++y)
      if (info.supported(x, y, u)) row.support.push_back(y);
    require(!row.support.empty(), "controlled row has empty support");
    row.weight = static_cast<double>(counts.visits(x, u));
    row.empirical.resize(row.support.size(), 0.0);
    if (row.weight > 0.0) {
      const numvec emp = counts.empirical_row(x, u);
      for (index_t i = 0; i < row.support.size(); ++i)
        row.empirical[i] = emp[row.support[i]];
    }
    row.free = row.support.size() > 1;
    ws.rewards[x] = info.r(x, u);
    ws.dirs[x].resize(row.support.size(), 0.0);
  }
  return ws;
}

/// Writes the per-row simplex point `point[x]` (aligned with support) into the
/// chain matrix.
inline void load_chain(const RowWorkspace& ws,
                       const std::vector<numvec>& point, ChainMatrix& chain) {
  const index_t nx = chain.n;
  for (index_t x = 0; x < nx; ++x) {
    for (index_t y = 0; y < nx; ++y) chain(x, y) = 0.0;
    const ControlledRow& row = ws.rows[x];
    for (index_t i = 0; i < row.support.size(); ++i)
      chain(x, row.support[i]) = point[x][i];
  }
}

/// Penalty sum_x w_x KL(q_x, point_x) over empirically supported entries.
inline double row_penalty(const RowWorkspace& ws,
                          const std::vector<numvec>& point) {
  double total = 0.0;
  for (const ControlledRow& row : ws.rows) {
    if (row.weight <= 0.0) continue;
    double kl = 0.0;
    for (index_t i = 0; i < row.support.size(); ++i) {
      const double q = row.empirical[i];
      if (q <= 0.0) continue;
      kl += q * std::log(q / point[row.state][i]);
    }
    total += row.weight * std::max(kl, 0.0);
  }
  return total;
}

/// Floors every coordinate and renormalizes; keeps iterates strictly inside
/// the support simplex so the induced chain keeps the model's digraph.
inline void project_interior(numvec& p, double floor_value) {
  double sum = 0.0;
  for (double& v : p) {
    v = std::max(v, floor_value);
    sum += v;
  }
  for (double& v : p) v /= sum;
}

struct Objective {
  double value = -kInf;
  double gain = 0.0;
  double penalty = 0.0;
  numvec stationary;
  numvec bias;
  bool ok = false;
};

inline Objective evaluate_point(const RowWorkspace& ws, ChainMatrix& chain,
                                const std::vector<numvec>& point,
                                double alpha) {
  Objective out;
  load_chain(ws, point, chain);
  try {
    ChainEvaluation eval = chain_gain_bias(chain, ws.rewards);
    out.gain = eval.gain;
    out.stationary = std::move(eval.stationary);
    out.bias = std::move(eval.bias);
    out.penalty = row_penalty(ws, point);
    out.value = alpha * out.gain - out.penalty;
    out.ok = true;
  } catch (const SolverError&) {
    // Near-degenerate iterate; the line search treats it as a failed step.
    out.ok = false;
  }
  return out;
}

/// Start 0: fitted rows pushed to the interior; unvisited rows uniform.
inline std::vector<numvec> start_from_estimate(const RowWorkspace& ws,
                                               double floor_value) {
  std::vector<numvec> point(ws.rows.size());
  for (const ControlledRow& row : ws.rows) {
    numvec p(row.support.size());
    if (row.weight > 0.0) {
      p = row.empirical;
    } else {
      std::fill(p.begin(), p.end(),
                1.0 / static_cast<double>(row.support.size()));
    }
    project_interior(p, floor_value);
    point[row.state] = std::move(p);
  }
  return point;
}

inline std::vector<numvec> start_uniform(const RowWorkspace& ws) {
  std::vector<numvec> point(ws.rows.size());
  for (const ControlledRow& row : ws.rows) {
    point[row.state] =
        numvec(row.support.size(), 1.0 / static_cast<double>(row.support.size()));
  }
  return point;
}

/// Gain-seeking start: run a short max-plus value sweep over the support
/// digraph and load most of each row's mass on the most promising successor.
inline std::vector<numvec> start_gain_seeking(const RowWorkspace& ws,
                                              double floor_value) {
  const index_t nx = ws.rows.size();
  numvec h(nx, 0.0), next(nx, 0.0);
  const index_t sweeps = 4 * nx + 16;
  for (index_t it = 0; it < sweeps; ++it) {
    for (index_t x = 0; x < nx; ++x) {
      double best = -kInf;
      for (index_t y : ws.rows[x].support) best = std::max(best, h[y]);
      next[x] = ws.rewards[x] + best;
    }
    const double shift = *std::max_element(next.begin(), next.end());
    for (index_t x = 0; x < nx; ++x) h[x] = next[x] - shift;
  }
  std::vector<numvec> point(nx);
  for (const ControlledRow& row : ws.rows) {
    const index_t m = row.support.size();
    index_t best_i = 0;
    for (index_t i = 1; i < m; ++i)
      if (h[row.support[i]] > h[row.support[best_i]]) best_i = i;
    const double off = m > 1 ? 1e-3 / static_cast<double>(nx) : 0.0;
    numvec p(m, m > 1 ? off / static_cast<double>(m - 1) : 0.0);
    p[best_i] = 1.0 - off;
    project_interior(p, floor_value);
    point[row.state] = std::move(p);
  }
  return point;
}

/// Remaining starts: Dirichlet(1,...,1) rows from a fixed auxiliary stream so
/// the optimizer is deterministic regardless of the caller's seeding.
inline std::vector<numvec> start_random(const RowWorkspace& ws,
                                        index_t start_id, double floor_value) {
  RandomStream stream(0x9e3779b97f4a7c15ull ^
                      (0x100000001b3ull * static_cast<std::uint64_t>(start_id)));
  std::vector<numvec> point(ws.rows.size());
  for (const ControlledRow& row : ws.rows) {
    numvec p(row.support.size());
    for (double& v : p) {
      const double u = std::min(std::max(stream.next_u01(), 1e-16), 1.0 - 1e-16);
      v = -std::log1p(-u);  // Exp(1) draws normalize to Dirichlet(1,..,1)
    }
    project_interior(p, floor_value);
    point[row.state] = std::move(p);
  }
  return point;
}

struct AscentOutcome {
  std::vector<numvec> point;
  Objective objective;
  index_t iterations = 0;
  bool converged = false;
  double stationarity = kInf;
};

/// Exponentiated-gradient ascent with backtracking on one start point.
inline AscentOutcome ascend(RowWorkspace& ws, ChainMatrix& chain,
                            std::vector<numvec> point, double alpha,
                            const OptimizerOptions& opts) {
  AscentOutcome out;
  Objective cur = evaluate_point(ws, chain, point, alpha);
  if (!cur.ok) {
    out.point = std::move(point);
    out.objective = cur;
    return out;
  }
  bool any_free = false;
  for (const ControlledRow& row : ws.rows) any_free |= row.free;
  if (!any_free) {
    out.point = std::move(point);
    out.objective = cur;
    out.converged = true;
    out.stationarity = 0.0;
    return out;
  }

  double step = 1.0;
  std::vector<numvec> cand(point.size());
  for (index_t x = 0; x < point.size(); ++x) cand[x].resize(point[x].size());

  bool flattened = false;
  for (index_t iter = 0; iter < opts.max_iterations && !flattened; ++iter) {
    ++out.iterations;
    // Gradient of the objective in the row entries.
    double stationarity = 0.0;
    for (const ControlledRow& row : ws.rows) {
      numvec& g = ws.dirs[row.state];
      const numvec& p = point[row.state];
      double mean = 0.0;
      for (index_t i = 0; i < row.support.size(); ++i) {
        double gi = alpha * cur.stationary[row.state] * cur.bias[row.support[i]];
        if (row.weight > 0.0 && row.empirical[i] > 0.0)
          gi += row.weight * row.empirical[i] / p[i];
        g[i] = gi;
        mean += p[i] * gi;
      }
      if (!row.free) continue;
      double metric = 0.0;
      for (index_t i = 0; i < row.support.size(); ++i) {
        const double d = g[i] - mean;
        metric += p[i] * d * d;
      }
      stationarity = std::max(stationarity, std::sqrt(std::max(metric, 0.0)));
    }
    out.stationarity = stationarity;
    if (stationarity <= opts.gradient_tol) {
      out.converged = true;
      break;
    }

    // Backtracking multiplicative step.
    bool accepted = false;
    double trial = step;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (const ControlledRow& row : ws.rows) {
        const numvec& p = point[row.state];
        const numvec& g = ws.dirs[row.state];
        numvec& c = cand[row.state];
        if (!row.free) {
          c = p;
          continue;
        }
        double gmax = -kInf;
        for (index_t i = 0; i < row.support.size(); ++i)
          gmax = std::max(gmax, g[i]);
        for (index_t i = 0; i < row.support.size(); ++i)
          c[i] = p[i] * std::exp(trial * (g[i] - gmax));
        project_interior(c, opts.interior_floor);
      }
      Objective next = evaluate_point(ws, chain, cand, alpha);
      if (next.ok && next.value > cur.value) {
        const double improvement = next.value - cur.value;
        point.swap(cand);
        const bool tiny =
            improvement <= opts.objective_tol * (1.0 + std::abs(next.value));
        cur = std::move(next);
        step = std::min(trial * 1.3, 1e3);
        accepted = true;
        if (tiny) {
          out.converged = true;
          flattened = true;
        }
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) {
      // No uphill step exists at line-search resolution: stationary enough.
      out.converged = true;
      break;
    }
  }

  out.point = std::move(point);
  out.objective = cur;
  return out;
}

}  // namespace detail

/// Maximizes alpha * gain(theta, policy) - sum n KL(fitted row, theta row)
/// over the controlled rows; every other row of the reported kernel equals
/// the fitted row (uniform on support where unvisited).
inline IndexResult optimize_biased_model(const KnownModelInfo& info,
                                         const Policy& policy,
                                         const TransitionCounts& counts,
                                         double alpha,
                                         const OptimizerOptions& opts = {}) {
  require(alpha >= 0.0, "optimize_biased_model: alpha must be nonnegative");
  require(opts.restarts >= 1, "optimize_biased_model: need at least one start");
  detail::RowWorkspace ws = detail::make_row_workspace(info, policy, counts);
  ChainMatrix chain(info.num_states);

  detail::AscentOutcome best;
  bool have_best = false;
  OptimizerDiagnostics diag;
  for (index_t s = 0; s < opts.restarts; ++s) {
    std::vector<numvec> start;
    if (s == 0)
      start = detail::start_from_estimate(ws, opts.interior_floor);
    else if (s == 1)
      start = detail::start_uniform(ws);
    else if (s == 2)
      start = detail::start_gain_seeking(ws, opts.interior_floor);
    else
      start = detail::start_random(ws, s, opts.interior_floor);
    detail::AscentOutcome outcome =
        detail::ascend(ws, chain, std::move(start), alpha, opts);
    diag.iterations_total += outcome.iterations;
    if (outcome.converged) ++diag.converged_starts;
    if (outcome.objective.ok &&
        (!have_best || outcome.objective.value > best.objective.value)) {
      best = std::move(outcome);
      have_best = true;
      diag.best_start = s;
    }
  }
  if (!have_best)
    throw SolverError("index optimizer: every start failed to evaluate");
  diag.stationarity = best.stationarity;

  IndexResult result;
  result.policy = policy;
  result.gain = best.objective.gain;
  result.penalty = best.objective.penalty;
  result.index_value = alpha * result.gain - result.penalty;
  result.diagnostics = diag;

  // Assemble the full kernel: optimized controlled rows, fitted elsewhere.
  const index_t nx = info.num_states;
  const index_t nu = info.num_actions;
  result.theta.assign(nx * nu * nx, 0.0);
  for (index_t x = 0; x < nx; ++x) {
    for (index_t u = 0; u < nu; ++u) {
      double* row = result.theta.data() + info.row_offset(x, u);
      if (u == policy.action(x)) {
        const detail::ControlledRow& cr = ws.rows[x];
        for (index_t i = 0; i < cr.support.size(); ++i)
          row[cr.support[i]] = best.point[x][i];
        continue;
      }
      if (counts.visits(x, u) > 0) {
        const numvec emp = counts.empirical_row(x, u);
        std::copy(emp.begin(), emp.end(), row);
      } else {
        index_t m = 0;
        for (index_t y = 0; y < nx; ++y) m += info.supported(x, y, u) ? 1 : 0;
        for (index_t y = 0; y < nx; ++y)
          if (info.supported(x, y, u)) row[y] = 1.0 / static_cast<double>(m);
      }
    }
  }
  return result;
}

/// Index of every deterministic policy, in lexicographic policy order.
inline std::vector<IndexResult> compute_indices(const KnownModelInfo& info,
                                                const TransitionCounts& counts,
                                                double alpha,
                                                index_t enumeration_cap = 4096,
                                                const OptimizerOptions& opts = {}) {
  const std::vector<Policy> policies =
      enumerate_policies(info.num_states, info.num_actions, enumeration_cap);
  std::vector<IndexResult> results;
  results.reserve(policies.size());
  for (const Policy& policy : policies)
    results.push_back(optimize_biased_model(info, policy, counts, alpha, opts));
  return results;
}

/// Argmax by index value; exact ties keep the earliest (lexicographically
/// smallest) policy so replays are deterministic.
inline index_t select_policy(const std::vector<IndexResult>& indices) {
  require(!indices.empty(), "select_policy: no candidates");
  index_t best = 0;
  for (index_t i = 1; i < indices.size(); ++i)
    if (indices[i].index_value > indices[best].index_value) best = i;
  return best;
}

}  // namespace rbmle

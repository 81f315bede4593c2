#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "rbmle/common.hpp"

namespace rbmle {

/// Row-stochastic matrix stored row-major: entry(x, y) = data[x * n + y].
struct ChainMatrix {
  index_t n = 0;
  numvec data;

  ChainMatrix() = default;
  ChainMatrix(index_t states, double fill = 0.0)
      : n(states), data(states * states, fill) {}

  double operator()(index_t x, index_t y) const { return data[x * n + y]; }
  double& operator()(index_t x, index_t y) { return data[x * n + y]; }
};

struct ChainEvaluation {
  double gain = 0.0;
  numvec stationary;
  numvec bias;  // normalized so that stationary . bias = 0
};

/// Expected hitting times to one target state. Entries are +inf for states
/// from which the target is not reached almost surely.
struct HittingTimes {
  numvec to_target;    // to_target[x] = E[steps to first reach target from x]
  double return_time;  // E[steps to first return to target from target]
};

namespace detail {

/// States from which `target` is reachable in the support digraph.
inline std::vector<bool> can_reach(const ChainMatrix& P, index_t target) {
  std::vector<bool> seen(P.n, false);
  seen[target] = true;
  std::deque<index_t> queue{target};
  while (!queue.empty()) {
    index_t y = queue.front();
    queue.pop_front();
    for (index_t x = 0; x < P.n; ++x) {
      if (!seen[x] && P(x, y) > 0.0) {
        seen[x] = true;
        queue.push_back(x);
      }
    }
  }
  return seen;
}

inline std::vector<bool> forward_reachable(const ChainMatrix& P,
                                           index_t start) {
  std::vector<bool> seen(P.n, false);
  seen[start] = true;
  std::deque<index_t> queue{start};
  while (!queue.empty()) {
    index_t x = queue.front();
    queue.pop_front();
    for (index_t y = 0; y < P.n; ++y) {
      if (!seen[y] && P(x, y) > 0.0) {
        seen[y] = true;
        queue.push_back(y);
      }
    }
  }
  return seen;
}

}  // namespace detail

/// Communicating classes of the support digraph, each sorted ascending.
inline std::vector<std::vector<index_t>> communicating_classes(
    const ChainMatrix& P) {
  std::vector<std::vector<bool>> reach(P.n);
  for (index_t x = 0; x < P.n; ++x) reach[x] = detail::forward_reachable(P, x);
  std::vector<int> cls(P.n, -1);
  std::vector<std::vector<index_t>> classes;
  for (index_t x = 0; x < P.n; ++x) {
    if (cls[x] >= 0) continue;
    std::vector<index_t> members{x};
    cls[x] = static_cast<int>(classes.size());
    for (index_t y = x + 1; y < P.n; ++y) {
      if (cls[y] < 0 && reach[x][y] && reach[y][x]) {
        cls[y] = cls[x];
        members.push_back(y);
      }
    }
    classes.push_back(std::move(members));
  }
  return classes;
}

/// Recurrent (closed) classes: communicating classes with no outgoing edge.
inline std::vector<std::vector<index_t>> recurrent_classes(
    const ChainMatrix& P) {
  auto classes = communicating_classes(P);
  std::vector<std::vector<index_t>> closed;
  for (const auto& members : classes) {
    std::vector<bool> inside(P.n, false);
    for (index_t x : members) inside[x] = true;
    bool leaks = false;
    for (index_t x : members) {
      for (index_t y = 0; y < P.n && !leaks; ++y) {
        if (P(x, y) > 0.0 && !inside[y]) leaks = true;
      }
    }
    if (!leaks) closed.push_back(members);
  }
  return closed;
}

inline bool is_unichain(const ChainMatrix& P) {
  return recurrent_classes(P).size() == 1;
}

/// Unique stationary distribution of a unichain transition matrix.
///
/// Solves (I - P' + 11') mu = 1, which is nonsingular exactly when the chain
/// has one recurrent class; the residual check rejects multichain inputs.
inline numvec stationary_distribution(const ChainMatrix& P) {
  const index_t n = P.n;
  require(n > 0, "stationary_distribution: empty chain");
  if (n == 1) return {1.0};
  if (n == 2) {
    const double q0 = P(0, 1);
    const double q1 = P(1, 0);
    const double total = q0 + q1;
    if (total <= 0.0)
      throw SolverError(
          "stationary_distribution: two absorbing states (multichain)");
    return {q1 / total, q0 / total};
  }
  // Two recurrent classes leave a one-parameter family of balanced flows, so
  // the residual below cannot tell mixtures from the real answer; reject the
  // structure outright.
  if (!is_unichain(P))
    throw SolverError(
        "stationary_distribution: multiple recurrent classes (multichain)");
  Eigen::MatrixXd A = Eigen::MatrixXd::Ones(n, n);
  for (index_t x = 0; x < n; ++x)
    for (index_t y = 0; y < n; ++y) A(y, x) += (x == y ? 1.0 : 0.0) - P(x, y);
  Eigen::VectorXd mu = A.partialPivLu().solve(Eigen::VectorXd::Ones(n));
  double residual = 0.0;
  for (index_t y = 0; y < n; ++y) {
    double flow = 0.0;
    for (index_t x = 0; x < n; ++x) flow += mu(x) * P(x, y);
    residual = std::max(residual, std::abs(flow - mu(y)));
  }
  if (!(residual <= 1e-9))
    throw SolverError("stationary_distribution: no unique solution (residual " +
                      std::to_string(residual) + ")");
  numvec out(n);
  double total = 0.0;
  for (index_t x = 0; x < n; ++x) {
    out[x] = std::max(mu(x), 0.0);
    total += out[x];
  }
  for (double& v : out) v /= total;
  return out;
}

/// Gain and bias of a unichain chain with per-state reward r.
///
/// gain = mu . r; the bias solves gain + h(x) = r(x) + sum_y P(x,y) h(y)
/// with the normalization mu . h = 0.
inline ChainEvaluation chain_gain_bias(const ChainMatrix& P, const numvec& r) {
  const index_t n = P.n;
  require(r.size() == n, "chain_gain_bias: reward size mismatch");
  ChainEvaluation ev;
  if (n == 1) {
    ev.gain = r[0];
    ev.stationary = {1.0};
    ev.bias = {0.0};
    return ev;
  }
  if (n == 2) {
    const double q0 = P(0, 1);
    const double q1 = P(1, 0);
    const double total = q0 + q1;
    if (total <= 0.0)
      throw SolverError("chain_gain_bias: two absorbing states (multichain)");
    const double mu0 = q1 / total;
    const double mu1 = q0 / total;
    ev.gain = mu0 * r[0] + mu1 * r[1];
    const double dh = (r[0] - r[1]) / total;  // h(0) - h(1)
    ev.stationary = {mu0, mu1};
    ev.bias = {mu1 * dh, -mu0 * dh};
    return ev;
  }
  ev.stationary = stationary_distribution(P);
  ev.gain = 0.0;
  for (index_t x = 0; x < n; ++x) ev.gain += ev.stationary[x] * r[x];
  // (I - P + 1 mu') h = r - gain 1 pins the mu-orthogonal solution.
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b(n);
  for (index_t x = 0; x < n; ++x) {
    b(x) = r[x] - ev.gain;
    for (index_t y = 0; y < n; ++y)
      A(x, y) = (x == y ? 1.0 : 0.0) - P(x, y) + ev.stationary[y];
  }
  Eigen::VectorXd h = A.partialPivLu().solve(b);
  double residual = 0.0;
  for (index_t x = 0; x < n; ++x) {
    double rhs = r[x] - ev.gain;
    for (index_t y = 0; y < n; ++y) rhs += P(x, y) * h(y);
    residual = std::max(residual, std::abs(rhs - h(x)));
  }
  if (!(residual <= 1e-8))
    throw SolverError("chain_gain_bias: evaluation residual " +
                      std::to_string(residual));
  double dot = 0.0;
  for (index_t x = 0; x < n; ++x) dot += ev.stationary[x] * h(x);
  ev.bias.resize(n);
  for (index_t x = 0; x < n; ++x) ev.bias[x] = h(x) - dot;
  return ev;
}

/// First-passage and return times to `target` under a fixed chain.
///
/// Finite entries come from the linear system h(x) = 1 + sum_{z != target}
/// P(x,z) h(z); states that fail to reach the target almost surely get +inf.
inline HittingTimes expected_hitting_times(const ChainMatrix& P,
                                           index_t target) {
  const index_t n = P.n;
  require(target < n, "expected_hitting_times: target out of range");
  HittingTimes out;
  out.to_target.assign(n, kInf);
  out.to_target[target] = 0.0;
  if (n == 1) {
    out.return_time = 1.0;
    return out;
  }

  // doomed[z]: positive probability of never reaching the target from z.
  // Seeded by states with no support path to the target, then closed under
  // "can reach a doomed state without passing through the target".
  std::vector<bool> reaches = detail::can_reach(P, target);
  std::vector<bool> doomed(n, false);
  for (index_t z = 0; z < n; ++z)
    if (z != target && !reaches[z]) doomed[z] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (index_t x = 0; x < n; ++x) {
      if (x == target || doomed[x]) continue;
      for (index_t z = 0; z < n; ++z) {
        if (z != target && doomed[z] && P(x, z) > 0.0) {
          doomed[x] = true;
          grew = true;
          break;
        }
      }
    }
  }

  std::vector<index_t> solve_states;
  std::vector<int> pos(n, -1);
  for (index_t x = 0; x < n; ++x) {
    if (x != target && !doomed[x]) {
      pos[x] = static_cast<int>(solve_states.size());
      solve_states.push_back(x);
    }
  }
  if (!solve_states.empty()) {
    const index_t m = solve_states.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (index_t i = 0; i < m; ++i) {
      A(i, i) = 1.0;
      for (index_t j = 0; j < m; ++j)
        A(i, j) -= P(solve_states[i], solve_states[j]);
    }
    Eigen::VectorXd h = A.partialPivLu().solve(Eigen::VectorXd::Ones(m));
    for (index_t i = 0; i < m; ++i) {
      if (!(h(i) >= 0.0) || !std::isfinite(h(i)))
        throw SolverError("expected_hitting_times: singular passage system");
      out.to_target[solve_states[i]] = h(i);
    }
  }

  out.return_time = 1.0;
  for (index_t z = 0; z < n; ++z) {
    if (z == target || P(target, z) <= 0.0) continue;
    if (doomed[z]) {
      out.return_time = kInf;
      break;
    }
    out.return_time += P(target, z) * out.to_target[z];
  }
  return out;
}

}  // namespace rbmle

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "rbmle/common.hpp"
#include "rbmle/ergodic.hpp"
#include "rbmle/schedule.hpp"

namespace rbmle {

/// Constants of the logarithmic regret bound, derived from the model's
/// structural quantities and the agent's bias parameters. beta defaults to
/// the midpoint of its admissible interval; c1 to 10 / kappa^2.
struct TheoremConstants {
  index_t num_states = 0;
  index_t num_actions = 0;
  double a = 0.0;
  double b = 3.0;
  double j_star = 0.0;
  double delta_min = 0.0;
  double t_mix = 0.0;
  double kappa = 0.0;
  double p_min = 0.0;

  double gamma = 0.0;       // |X|^3 |U| / (2 a p_min J*)
  double beta_upper = 0.0;  // 1 - gamma J* / Delta_min
  double beta = 0.0;        // midpoint of (0, beta_upper)
  double c = 0.0;           // beta Delta_min / (kappa |X|^2 (1/sqrt2 + 1/sqrt a))
  double c1 = 0.0;          // 10 / kappa^2
  bool admissible = false;  // beta interval non-empty
};

inline TheoremConstants make_theorem_constants(const StructuralConstants& sc,
                                               index_t num_states,
                                               index_t num_actions, double a,
                                               double b) {
  require(a > 0.0, "theorem constants: a must be positive");
  TheoremConstants tc;
  tc.num_states = num_states;
  tc.num_actions = num_actions;
  tc.a = a;
  tc.b = b;
  tc.j_star = sc.j_star;
  tc.delta_min = sc.delta_min;
  tc.t_mix = sc.t_mix;
  tc.kappa = sc.kappa;
  tc.p_min = sc.p_min;

  const double nx = static_cast<double>(num_states);
  const double nu = static_cast<double>(num_actions);
  tc.gamma = nx * nx * nx * nu / (2.0 * a * sc.p_min * sc.j_star);
  tc.beta_upper = 1.0 - tc.gamma * sc.j_star / sc.delta_min;
  tc.admissible = tc.beta_upper > 0.0;
  if (tc.admissible) {
    tc.beta = tc.beta_upper / 2.0;
    tc.c = tc.beta * sc.delta_min /
           (sc.kappa * nx * nx * (1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(a)));
  } else {
    tc.beta = std::numeric_limits<double>::quiet_NaN();
    tc.c = std::numeric_limits<double>::quiet_NaN();
  }
  if (sc.kappa > 0.0) tc.c1 = 10.0 / (sc.kappa * sc.kappa);
  return tc;
}

/// Visit threshold above which the suboptimal-index ordering is guaranteed:
/// n_c(T) = alpha(T) / c^2.
inline double visit_threshold(const TheoremConstants& tc, std::uint64_t T) {
  require(tc.admissible, "visit threshold needs an admissible bias weight");
  const BiasSchedule sched{tc.a, tc.b, tc.num_states, tc.num_actions};
  return sched.alpha_at(T) / (tc.c * tc.c);
}

/// Logarithmic regret ceiling:
///   c1 kappa^2 |X|^5 |U| ((sqrt(a/2)+1)/(beta Delta))^2 ln T
///   + (kappa |X||U| + 1) log2 T + C.
inline double theorem_bound(const TheoremConstants& tc, std::uint64_t T) {
  require(T >= 2, "theorem bound: need T >= 2");
  require(tc.admissible,
          "theorem bound needs an admissible bias weight (beta interval "
          "empty)");
  const double nx = static_cast<double>(tc.num_states);
  const double nu = static_cast<double>(tc.num_actions);
  const double x5u = nx * nx * nx * nx * nx * nu;
  const double lead = tc.c1 * tc.kappa * tc.kappa * x5u *
                      std::pow((std::sqrt(tc.a / 2.0) + 1.0) /
                                   (tc.beta * tc.delta_min),
                               2.0);
  const double episodes_coeff = tc.kappa * nx * nu + 1.0;
  const double constant = lead * std::log(nx * nx * nu) + episodes_coeff +
                          nx * nu + 8.0 / (nx * nx * nu);
  const double t = static_cast<double>(T);
  return lead * std::log(t) + episodes_coeff * std::log2(t) + constant;
}

}  // namespace rbmle

#include <catch2/catch_amalgamated.hpp>

#include <rbmle/ergodic.hpp>

#include "oracles.hpp"

using rbmle::index_t;
using rbmle::MdpModel;
using rbmle::Policy;

TEST_CASE("expected hitting time under a policy") {
  const MdpModel m = oracle::symmetric_chain(0.25);
  const Policy pi = Policy::deterministic({0, 0});
  REQUIRE(rbmle::expected_hitting_time(m, pi, 0, 1) ==
          Catch::Approx(4.0).epsilon(1e-12));
  REQUIRE(rbmle::expected_hitting_time(m, pi, 0, 0) ==
          Catch::Approx(2.0).epsilon(1e-12));  // return time = 1/mu
}

TEST_CASE("mixing time of symmetric flip chains is max(1/q, 2)") {
  REQUIRE(rbmle::mixing_time(oracle::symmetric_chain(0.1)) ==
          Catch::Approx(10.0).epsilon(1e-10));
  REQUIRE(rbmle::mixing_time(oracle::symmetric_chain(0.5)) ==
          Catch::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("mixing time maximizes over policies") {
  // Action 0 flips with 0.5 (fast), action 1 flips with 0.05 (slow): the
  // slow policy dominates, giving 1/0.05 = 20.
  const MdpModel m = oracle::make_model(
      2, 2, {0.5, 0.5, 0.95, 0.05, 0.5, 0.5, 0.05, 0.95},
      {0.5, 0.5, 0.5, 0.5});
  REQUIRE(rbmle::mixing_time(m) == Catch::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("mixing time of the reference model") {
  // Worst passage: reaching the 0.1-probability successor, so 1/0.1.
  REQUIRE(rbmle::mixing_time(oracle::m0()) ==
          Catch::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("conductivity closed forms on flip chains") {
  // cross / (2 * return) = (1/q) / (2 * 2) = 1/(4q).
  const auto fast = rbmle::conductivity(oracle::symmetric_chain(0.5));
  REQUIRE(fast.value == Catch::Approx(0.5).epsilon(1e-12));
  const auto slow = rbmle::conductivity(oracle::symmetric_chain(0.1));
  REQUIRE(slow.value == Catch::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("conductivity of the reference model") {
  // Drift-to-0 policy: E[0 -> 1] = 10 against return(0) = 10/9.
  const auto res = rbmle::conductivity(oracle::m0());
  REQUIRE(res.value == Catch::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("policy gaps on the reference model") {
  const auto gaps = rbmle::policy_gaps(oracle::m0());
  REQUIRE(gaps.j_star == Catch::Approx(0.86).epsilon(1e-12));
  REQUIRE(gaps.delta_min == Catch::Approx(0.115).epsilon(1e-12));
  REQUIRE(gaps.gains.size() == 4);
  REQUIRE(gaps.gains[0] == Catch::Approx(0.86).epsilon(1e-12));
  REQUIRE(gaps.gains[1] == Catch::Approx(0.55).epsilon(1e-12));
  REQUIRE(gaps.gains[2] == Catch::Approx(0.745).epsilon(1e-12));
  REQUIRE(gaps.gains[3] == Catch::Approx(0.279).epsilon(1e-12));
  REQUIRE(gaps.optimal_ids == std::vector<index_t>{0});
}

TEST_CASE("policy gaps on the trap model") {
  const auto gaps = rbmle::policy_gaps(oracle::trap());
  REQUIRE(gaps.j_star == Catch::Approx(0.905).epsilon(1e-12));
  // Runner-up is the greedy trap policy (0,1) at 0.89.
  REQUIRE(gaps.delta_min == Catch::Approx(0.015).epsilon(1e-8));
  REQUIRE(gaps.optimal_ids == std::vector<index_t>{3});
}

TEST_CASE("policy gaps reject models where every policy is optimal") {
  const MdpModel flat = oracle::make_model(
      2, 2, {0.75, 0.25, 0.75, 0.25, 0.25, 0.75, 0.25, 0.75},
      {0.6, 0.6, 0.4, 0.4});
  REQUIRE_THROWS_AS(rbmle::policy_gaps(flat), rbmle::SolverError);
}

TEST_CASE("structural constants bundle the frozen reference values") {
  const auto sc = rbmle::structural_constants(oracle::m0());
  REQUIRE(sc.j_star == Catch::Approx(0.86).epsilon(1e-12));
  REQUIRE(sc.delta_min == Catch::Approx(0.115).epsilon(1e-12));
  REQUIRE(sc.t_mix == Catch::Approx(10.0).epsilon(1e-10));
  REQUIRE(sc.kappa == Catch::Approx(4.5).epsilon(1e-12));
  REQUIRE(sc.p_min == Catch::Approx(0.1).epsilon(1e-12));
}

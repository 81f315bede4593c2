#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <rbmle/chain.hpp>

#include "oracles.hpp"

using rbmle::ChainMatrix;
using rbmle::index_t;
using rbmle::numvec;

namespace {

ChainMatrix two_state(double p01, double p10) {
  ChainMatrix P(2);
  P(0, 0) = 1.0 - p01;
  P(0, 1) = p01;
  P(1, 0) = p10;
  P(1, 1) = 1.0 - p10;
  return P;
}

ChainMatrix three_cycle() {
  ChainMatrix P(3);
  P(0, 1) = 1.0;
  P(1, 2) = 1.0;
  P(2, 0) = 1.0;
  return P;
}

}  // namespace

TEST_CASE("two-state stationary distribution matches the closed form") {
  const ChainMatrix P = two_state(0.3, 0.4);
  const numvec mu = rbmle::stationary_distribution(P);
  REQUIRE(mu[0] == Catch::Approx(4.0 / 7.0).epsilon(1e-12));
  REQUIRE(mu[1] == Catch::Approx(3.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("two-state gain and bias match the closed form") {
  const ChainMatrix P = two_state(0.3, 0.4);
  const auto ev = rbmle::chain_gain_bias(P, {1.0, 0.0});
  // gain = mu . r, h(0) - h(1) = (r0 - r1) / (p01 + p10) = 10/7, mu . h = 0.
  REQUIRE(ev.gain == Catch::Approx(4.0 / 7.0).epsilon(1e-12));
  REQUIRE(ev.bias[0] == Catch::Approx(30.0 / 49.0).epsilon(1e-12));
  REQUIRE(ev.bias[1] == Catch::Approx(-40.0 / 49.0).epsilon(1e-12));
}

TEST_CASE("deterministic cycle: uniform stationary, shifted-reward bias") {
  const auto ev = rbmle::chain_gain_bias(three_cycle(), {0.9, 0.3, 0.3});
  REQUIRE(ev.gain == Catch::Approx(0.5).epsilon(1e-12));
  for (index_t x = 0; x < 3; ++x)
    REQUIRE(ev.stationary[x] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  REQUIRE(ev.bias[0] == Catch::Approx(0.2).margin(1e-10));
  REQUIRE(ev.bias[1] == Catch::Approx(-0.2).margin(1e-10));
  REQUIRE(ev.bias[2] == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("gain and bias satisfy the evaluation equations on a dense chain") {
  // A fixed 5-state chain with unequal rows; no structure to exploit.
  ChainMatrix P(5);
  const double rows[5][5] = {{0.20, 0.30, 0.10, 0.25, 0.15},
                             {0.05, 0.50, 0.20, 0.10, 0.15},
                             {0.30, 0.10, 0.40, 0.10, 0.10},
                             {0.25, 0.25, 0.25, 0.15, 0.10},
                             {0.10, 0.20, 0.30, 0.20, 0.20}};
  for (index_t x = 0; x < 5; ++x)
    for (index_t y = 0; y < 5; ++y) P(x, y) = rows[x][y];
  const numvec r = {0.9, 0.1, 0.5, 0.7, 0.3};
  const auto ev = rbmle::chain_gain_bias(P, r);

  double mass = 0.0, dot = 0.0;
  for (index_t x = 0; x < 5; ++x) {
    mass += ev.stationary[x];
    dot += ev.stationary[x] * ev.bias[x];
    double rhs = r[x] - ev.gain;
    for (index_t y = 0; y < 5; ++y) rhs += P(x, y) * ev.bias[y];
    REQUIRE(ev.bias[x] == Catch::Approx(rhs).margin(1e-9));
  }
  REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(dot == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("hitting times: symmetric flip chain") {
  const ChainMatrix P = two_state(0.25, 0.25);
  const auto ht = rbmle::expected_hitting_times(P, 1);
  REQUIRE(ht.to_target[0] == Catch::Approx(4.0).epsilon(1e-12));  // 1/q
  // Return to 1: one step, then 1/q more if the chain flipped away.
  REQUIRE(ht.return_time == Catch::Approx(2.0).epsilon(1e-12));  // 1/mu(1)
}

TEST_CASE("hitting times: asymmetric chain and return-time identity") {
  const ChainMatrix P = two_state(0.3, 0.4);
  const auto to1 = rbmle::expected_hitting_times(P, 1);
  REQUIRE(to1.to_target[0] == Catch::Approx(10.0 / 3.0).epsilon(1e-12));
  const auto to0 = rbmle::expected_hitting_times(P, 0);
  // E[return to x] = 1 / mu(x).
  REQUIRE(to0.return_time == Catch::Approx(7.0 / 4.0).epsilon(1e-12));
  REQUIRE(to1.return_time == Catch::Approx(7.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("hitting times on the deterministic cycle") {
  const auto ht = rbmle::expected_hitting_times(three_cycle(), 2);
  REQUIRE(ht.to_target[0] == Catch::Approx(2.0).epsilon(1e-12));
  REQUIRE(ht.to_target[1] == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(ht.return_time == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("states that can miss the target have infinite hitting time") {
  ChainMatrix P(3);
  P(0, 0) = 0.5;
  P(0, 1) = 0.25;
  P(0, 2) = 0.25;
  P(1, 1) = 1.0;  // absorbing, never reaches 2
  P(2, 2) = 1.0;
  const auto ht = rbmle::expected_hitting_times(P, 2);
  REQUIRE(std::isinf(ht.to_target[0]));
  REQUIRE(std::isinf(ht.to_target[1]));
}

TEST_CASE("recurrent class detection") {
  ChainMatrix P(3);
  P(0, 0) = 0.5;
  P(0, 1) = 0.25;
  P(0, 2) = 0.25;
  P(1, 1) = 1.0;
  P(2, 2) = 1.0;
  REQUIRE(rbmle::recurrent_classes(P).size() == 2);
  REQUIRE_FALSE(rbmle::is_unichain(P));

  // Transient head, recurrent pair: still unichain.
  ChainMatrix Q(3);
  Q(0, 1) = 1.0;
  Q(1, 1) = 0.5;
  Q(1, 2) = 0.5;
  Q(2, 1) = 0.5;
  Q(2, 2) = 0.5;
  REQUIRE(rbmle::recurrent_classes(Q).size() == 1);
  REQUIRE(rbmle::is_unichain(Q));
  const numvec mu = rbmle::stationary_distribution(Q);
  REQUIRE(mu[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(mu[1] == Catch::Approx(0.5).epsilon(1e-12));
  REQUIRE(mu[2] == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("multichain inputs are rejected") {
  ChainMatrix P(2);
  P(0, 0) = 1.0;
  P(1, 1) = 1.0;
  REQUIRE_THROWS_AS(rbmle::stationary_distribution(P), rbmle::SolverError);
  REQUIRE_THROWS_AS(rbmle::chain_gain_bias(P, {0.5, 0.5}), rbmle::SolverError);

  ChainMatrix Q(3);
  Q(0, 0) = 1.0;
  Q(1, 1) = 1.0;
  Q(2, 0) = 0.5;
  Q(2, 1) = 0.5;
  REQUIRE_THROWS_AS(rbmle::stationary_distribution(Q), rbmle::SolverError);
}

TEST_CASE("single state chain") {
  ChainMatrix P(1);
  P(0, 0) = 1.0;
  REQUIRE(rbmle::stationary_distribution(P)[0] == 1.0);
  const auto ev = rbmle::chain_gain_bias(P, {0.7});
  REQUIRE(ev.gain == 0.7);
  REQUIRE(ev.bias[0] == 0.0);
}

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <type_traits>

#include <rbmle/mdp.hpp>

#include "oracles.hpp"

using rbmle::index_t;
using rbmle::MdpModel;
using rbmle::numvec;
using rbmle::Policy;

namespace {

MdpModel raw_m0() {
  MdpModel raw;
  raw.num_states = 2;
  raw.num_actions = 2;
  raw.transitions = {0.9, 0.1, 0.1, 0.9, 0.9, 0.1, 0.1, 0.9};
  raw.rewards = {0.9, 0.99, 0.5, 0.2};
  return raw;
}

bool mentions(const rbmle::ValidationResult& res, const std::string& word) {
  for (const auto& v : res.violations)
    if (v.find(word) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validation fills in support and p_min") {
  const auto res = rbmle::validate_mdp(raw_m0());
  REQUIRE(res.ok());
  const MdpModel& m = *res.model;
  REQUIRE(m.p_min == Catch::Approx(0.1));
  for (index_t x = 0; x < 2; ++x)
    for (index_t u = 0; u < 2; ++u)
      for (index_t y = 0; y < 2; ++y) REQUIRE(m.supported(x, y, u));
}

TEST_CASE("validation rejects structural defects") {
  SECTION("non-stochastic row") {
    MdpModel raw = raw_m0();
    raw.transitions[0] = 0.8;  // row sums to 0.9
    const auto res = rbmle::validate_mdp(raw);
    REQUIRE_FALSE(res.ok());
  }
  SECTION("reward of zero") {
    MdpModel raw = raw_m0();
    raw.rewards[3] = 0.0;  // rewards must be strictly positive
    const auto res = rbmle::validate_mdp(raw);
    REQUIRE_FALSE(res.ok());
    REQUIRE(mentions(res, "reward"));
  }
  SECTION("reward above one") {
    MdpModel raw = raw_m0();
    raw.rewards[0] = 1.5;
    REQUIRE_FALSE(rbmle::validate_mdp(raw).ok());
  }
  SECTION("p_min larger than the smallest supported probability") {
    MdpModel raw = raw_m0();
    raw.p_min = 0.2;
    const auto res = rbmle::validate_mdp(raw);
    REQUIRE_FALSE(res.ok());
    REQUIRE(mentions(res, "p_min"));
  }
  SECTION("negative probability") {
    MdpModel raw = raw_m0();
    raw.transitions[0] = 1.1;
    raw.transitions[1] = -0.1;
    REQUIRE_FALSE(rbmle::validate_mdp(raw).ok());
  }
  SECTION("a policy with two recurrent classes") {
    MdpModel raw;
    raw.num_states = 2;
    raw.num_actions = 2;
    // Action 0 stays put in both states: that policy has two closed classes.
    raw.transitions = {1.0, 0.0, 0.5, 0.5, 0.0, 1.0, 0.5, 0.5};
    raw.rewards = {0.5, 0.5, 0.5, 0.5};
    const auto res = rbmle::validate_mdp(raw);
    REQUIRE_FALSE(res.ok());
  }
}

TEST_CASE("validated_or_throw raises on bad input, returns normalized model") {
  MdpModel bad = raw_m0();
  bad.rewards[0] = 2.0;
  REQUIRE_THROWS_AS(rbmle::validated_or_throw(bad), rbmle::InvalidArgument);
  const MdpModel good = rbmle::validated_or_throw(raw_m0());
  REQUIRE(good.p_min == Catch::Approx(0.1));
}

TEST_CASE("accessor layout: p(x, y, u) indexes state, successor, action") {
  const MdpModel m = oracle::m0();
  REQUIRE(m.p(0, 0, 0) == Catch::Approx(0.9));
  REQUIRE(m.p(0, 1, 0) == Catch::Approx(0.1));
  REQUIRE(m.p(0, 0, 1) == Catch::Approx(0.1));
  REQUIRE(m.p(1, 0, 0) == Catch::Approx(0.9));
  REQUIRE(m.r(0, 0) == Catch::Approx(0.9));
  REQUIRE(m.r(1, 0) == Catch::Approx(0.5));
  REQUIRE(m.r(1, 1) == Catch::Approx(0.2));
}

TEST_CASE("policies: deterministic, randomized, uniform") {
  const Policy d = Policy::deterministic({1, 0});
  REQUIRE(d.is_deterministic());
  REQUIRE(d.action(0) == 1);
  REQUIRE(d.prob(0, 1) == 1.0);
  REQUIRE(d.prob(0, 0) == 0.0);

  const Policy u = Policy::uniform(2, 4);
  REQUIRE_FALSE(u.is_deterministic());
  REQUIRE(u.prob(1, 3) == Catch::Approx(0.25));

  REQUIRE(d == Policy::deterministic({1, 0}));
  REQUIRE_FALSE(d == Policy::deterministic({0, 0}));
  REQUIRE_THROWS_AS(Policy::randomized(1, 2, {0.7, 0.2}),
                    rbmle::InvalidArgument);
}

TEST_CASE("induced chain and rewards select the policy's rows") {
  const MdpModel m = oracle::m0();
  const Policy pi = Policy::deterministic({0, 1});
  const auto P = rbmle::induced_chain(m, pi);
  REQUIRE(P(0, 0) == Catch::Approx(0.9));
  REQUIRE(P(0, 1) == Catch::Approx(0.1));
  REQUIRE(P(1, 0) == Catch::Approx(0.1));
  REQUIRE(P(1, 1) == Catch::Approx(0.9));
  const numvec r = rbmle::induced_rewards(m, pi);
  REQUIRE(r[0] == Catch::Approx(0.9));
  REQUIRE(r[1] == Catch::Approx(0.2));
}

TEST_CASE("known model info carries everything except the kernel") {
  const MdpModel m = oracle::m0();
  const rbmle::KnownModelInfo info = rbmle::known_info(m);
  REQUIRE(info.num_states == 2);
  REQUIRE(info.num_actions == 2);
  REQUIRE(info.rewards == m.rewards);
  REQUIRE(info.support == m.support);
  REQUIRE(info.p_min == m.p_min);
  // The learner-facing type must not expose transition probabilities at all.
  static_assert(!std::is_convertible_v<rbmle::KnownModelInfo, MdpModel>);
}

TEST_CASE("random model generator produces valid, reproducible models") {
  const MdpModel a = rbmle::generate_random_model(3, 2, 0.05, 42);
  const MdpModel b = rbmle::generate_random_model(3, 2, 0.05, 42);
  REQUIRE(a.transitions == b.transitions);
  REQUIRE(a.rewards == b.rewards);

  for (index_t x = 0; x < 3; ++x)
    for (index_t u = 0; u < 2; ++u) {
      double total = 0.0;
      for (index_t y = 0; y < 3; ++y) {
        REQUIRE(a.p(x, y, u) >= 0.05);
        total += a.p(x, y, u);
      }
      REQUIRE(total == Catch::Approx(1.0).epsilon(1e-12));
      REQUIRE(a.r(x, u) > 0.0);
      REQUIRE(a.r(x, u) <= 1.0);
    }
  REQUIRE(rbmle::validate_mdp(a).ok());

  const MdpModel c = rbmle::generate_random_model(3, 2, 0.05, 43);
  REQUIRE_FALSE(a.transitions == c.transitions);
}

#include <doctest.h>

#include <cmath>

#include "mixguide/errors.hpp"
#include "mixguide/schedule.hpp"

using namespace mixguide;

TEST_SUITE("schedule") {

TEST_CASE("default linear schedule is admissible and fully noised") {
  NoiseSchedule ns = default_noise_schedule();
  REQUIRE(ns.steps == 1000);
  double log_prod = 0.0;
  for (int t = 0; t < ns.steps; ++t) {
    CHECK(ns.beta[t] > 0.0);
    CHECK(ns.beta[t] < 1.0);
    if (t > 0) CHECK(ns.alpha_bar[t] < ns.alpha_bar[t - 1]);
    // cross-check the cumulative product against log-space summation
    log_prod += std::log1p(-ns.beta[t]);
    CHECK(ns.alpha_bar[t] == doctest::Approx(std::exp(log_prod)).epsilon(1e-12));
    CHECK(ns.sqrt_alpha_bar[t] == doctest::Approx(std::sqrt(ns.alpha_bar[t])).epsilon(1e-14));
    CHECK(ns.sigma[t] == doctest::Approx(std::sqrt(1.0 - ns.alpha_bar[t])).epsilon(1e-14));
  }
  CHECK(ns.alpha_bar[999] < 1e-4);
  CHECK(ns.alpha_bar[999] > 0.0);
}

TEST_CASE("two-step constant-beta product") {
  NoiseSchedule ns = build_noise_schedule(2, NoiseKind::linear, 0.5, 0.5);
  CHECK(ns.alpha_bar[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ns.alpha_bar[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("snr strictly decreases for every kind") {
  for (NoiseKind kind : {NoiseKind::linear, NoiseKind::cosine}) {
    NoiseSchedule ns = build_noise_schedule(1000, kind, 1e-4, 0.02);
    CHECK(ns.snr(0) > ns.snr(ns.steps - 1));
    for (int t = 1; t < ns.steps; ++t) CHECK(ns.snr(t) < ns.snr(t - 1));
  }
}

TEST_CASE("posterior variance lies between zero and beta") {
  NoiseSchedule ns = default_noise_schedule();
  for (int t = 1; t < ns.steps; ++t) {
    CHECK(ns.posterior_beta(t) > 0.0);
    CHECK(ns.posterior_beta(t) <= ns.beta[t]);
  }
}

TEST_CASE("noise schedule construction rejects bad parameters") {
  CHECK_THROWS_AS(build_noise_schedule(0, NoiseKind::linear, 1e-4, 0.02), ConstraintError);
  CHECK_THROWS_AS(build_noise_schedule(10, NoiseKind::linear, 0.0, 0.02), ConstraintError);
  CHECK_THROWS_AS(build_noise_schedule(10, NoiseKind::linear, 1e-4, 1.0), ConstraintError);
  CHECK_THROWS_AS(build_noise_schedule(10, NoiseKind::linear, 0.02, 1e-4), ConstraintError);
}

TEST_CASE("sigmoid weight hits one half at the midpoint") {
  ConditionSchedule s;  // sigmoid, a=0.025, b=550, floor 0, ceiling 1
  CHECK(weight_content(s, 550.0) == 0.5);
  CHECK(weight_style(s, 550.0) == 0.5);
}

TEST_CASE("sigmoid weight at the horizon end") {
  ConditionSchedule s;
  double expected = 1.0 / (1.0 + std::exp(-11.225));  // a*(999-550) = 11.225
  CHECK(weight_content(s, 999.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(weight_content(s, 999.0) == doctest::Approx(0.99998).epsilon(1e-5));
}

TEST_CASE("weights complement each other at every timestep") {
  for (WeightKind kind :
       {WeightKind::sigmoid, WeightKind::linear, WeightKind::exclusive, WeightKind::constant}) {
    ConditionSchedule s;
    s.kind = kind;
    for (int t = 0; t < 1000; ++t)
      CHECK(std::abs(weight_content(s, t) + weight_style(s, t) - 1.0) <= 1e-12);
  }
}

TEST_CASE("bounded sigmoid stays inside its band") {
  ConditionSchedule s;
  s.floor = 0.1;
  s.ceiling = 0.9;
  for (double t : {-10000.0, -550.0, 0.0, 300.0, 550.0, 999.0, 10000.0}) {
    double wc = weight_content(s, t), ws = weight_style(s, t);
    CHECK(wc >= 0.1);
    CHECK(wc <= 0.9);
    CHECK(ws >= 0.1);
    CHECK(ws <= 0.9);
  }
  CHECK(weight_content(s, 550.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("exclusive schedule is a step function around b") {
  ConditionSchedule s;
  s.kind = WeightKind::exclusive;
  CHECK(weight_style(s, 400.0) == s.ceiling);
  CHECK(weight_style(s, 550.0) == s.ceiling);
  CHECK(weight_style(s, 551.0) == s.floor);
  CHECK(weight_content(s, 400.0) == s.floor);
  CHECK(weight_content(s, 551.0) == s.ceiling);
}

TEST_CASE("linear ramp spans the horizon") {
  ConditionSchedule s;
  s.kind = WeightKind::linear;
  CHECK(weight_style(s, 0.0) == s.ceiling);
  CHECK(weight_style(s, 999.0) == s.floor);
  CHECK(weight_content(s, 0.0) == s.floor);
  CHECK(weight_content(s, 999.0) == s.ceiling);
  // midpoint of the clamped ramp
  CHECK(weight_content(s, 499.5) == doctest::Approx(0.5).epsilon(1e-12));
  // robust far outside the horizon
  CHECK(weight_content(s, -10000.0) == s.floor);
  CHECK(weight_content(s, 10000.0) == s.ceiling);
}

TEST_CASE("constant schedule sits at the band midpoint") {
  ConditionSchedule s;
  s.kind = WeightKind::constant;
  s.floor = 0.2;
  s.ceiling = 0.6;
  for (double t : {0.0, 500.0, 999.0}) {
    CHECK(weight_content(s, t) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(weight_style(s, t) == doctest::Approx(0.4).epsilon(1e-15));
  }
}

TEST_CASE("condition schedule validation") {
  ConditionSchedule s;
  CHECK_NOTHROW(validate_condition_schedule(s));
  s.floor = 0.9;
  s.ceiling = 0.1;
  CHECK_THROWS_AS(validate_condition_schedule(s), ConstraintError);
  s = ConditionSchedule{};
  s.floor = -0.1;
  CHECK_THROWS_AS(validate_condition_schedule(s), ConstraintError);
  s = ConditionSchedule{};
  s.ceiling = 1.5;
  CHECK_THROWS_AS(validate_condition_schedule(s), ConstraintError);
  s = ConditionSchedule{};
  s.steps = 1;
  CHECK_THROWS_AS(validate_condition_schedule(s), ConstraintError);
  s = ConditionSchedule{};
  s.a = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_condition_schedule(s), ConstraintError);
}

TEST_CASE("kind names round trip") {
  for (const char* name : {"linear", "cosine"})
    CHECK(to_string(noise_kind_from_string(name)) == name);
  for (const char* name : {"sigmoid", "linear", "exclusive", "constant"})
    CHECK(to_string(weight_kind_from_string(name)) == name);
  CHECK_THROWS_AS(noise_kind_from_string("warped"), ParseError);
  CHECK_THROWS_AS(weight_kind_from_string("warped"), ParseError);
}

}  // TEST_SUITE

#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "amlab/schedules.hpp"

using namespace amlab;

TEST_CASE("power schedule values") {
  const auto s = WeightSchedule::power(1.0, 1.0);
  CHECK(s.weight(1) == 1.0);
  CHECK(s.weight(2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.weight(4) == doctest::Approx(0.25).epsilon(1e-15));

  const auto s07 = WeightSchedule::power(1.0, 0.7);
  CHECK(s07.weight(10) == doctest::Approx(0.19952623149688797).epsilon(1e-15));

  // purity: bit-identical repeated evaluation
  CHECK(s07.weight(12345) == s07.weight(12345));
}

TEST_CASE("power schedule parameter validation and admissible box") {
  CHECK_THROWS_AS(WeightSchedule::power(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightSchedule::power(1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightSchedule::power(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightSchedule::power(1.0, -0.2), std::invalid_argument);

  CHECK(WeightSchedule::power(1.0, 1.0).admissible());
  CHECK(WeightSchedule::power(1.0, 0.7).admissible());
  CHECK(WeightSchedule::power(0.5, 0.6).admissible());
  CHECK_FALSE(WeightSchedule::power(1.0, 0.4).admissible());
  CHECK_FALSE(WeightSchedule::power(1.0, 0.5).admissible());
}

TEST_CASE("custom rule outside (0,1) is a schedule violation") {
  const auto bad = WeightSchedule::custom([](std::int64_t) { return 1.5; });
  CHECK_THROWS_AS(bad.weight(2), std::domain_error);
  CHECK(bad.weight(1) == 1.0);  // convention value bypasses the rule
}

TEST_CASE("assumption A1 on power and geometric schedules") {
  const auto rep1 = check_assumption_A1(WeightSchedule::power(1.0, 0.7), 2, 100000);
  CHECK(rep1.passed);
  CHECK(rep1.witnesses.empty());

  const auto rep2 = check_assumption_A1(WeightSchedule::power(1.0, 1.0), 2, 10000);
  CHECK(rep2.passed);

  const auto geom = WeightSchedule::custom(
      [](std::int64_t n) { return std::pow(2.0, -static_cast<double>(n)); },
      "geometric");
  const auto rep3 = check_assumption_A1(geom, 2, 1000);
  CHECK_FALSE(rep3.passed);
  // the partial sum (= 1/2 - 2^-1000) must appear as a witness
  bool sum_witness = false;
  for (const auto& [idx, val] : rep3.witnesses) {
    if (idx == 1000 && std::abs(val - 0.5) < 1e-12) sum_witness = true;
  }
  CHECK(sum_witness);

  CHECK_THROWS_AS(check_assumption_A1(geom, 1, 1000), std::invalid_argument);
}

TEST_CASE("A1 difference monotonicity is exact for power schedules") {
  for (double gamma : {0.6, 1.0}) {
    double prev = std::pow(3.0, gamma / 2.0) - std::pow(2.0, gamma / 2.0);
    bool mono = true;
    for (std::int64_t n = 3; n <= 100000; ++n) {
      const double diff = std::pow(static_cast<double>(n + 1), gamma / 2.0) -
                          std::pow(static_cast<double>(n), gamma / 2.0);
      if (diff > prev) mono = false;
      prev = diff;
    }
    CHECK(mono);
  }
}

TEST_CASE("assumption A2 ratio limit") {
  CHECK(check_assumption_A2(WeightSchedule::power(1.0, 1.0), 10000, 1e-3).passed);
  CHECK(check_assumption_A2(WeightSchedule::power(0.5, 0.6), 10000, 1e-3).passed);

  const auto geom = WeightSchedule::custom(
      [](std::int64_t n) { return std::pow(2.0, -static_cast<double>(n)); },
      "geometric");
  const auto rep = check_assumption_A2(geom, 1000, 1e-3);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("assumption A3 square-summable but not summable") {
  CHECK(check_assumption_A3(WeightSchedule::power(1.0, 1.0), 1000000).passed);

  // slowly decaying: tail of squares diverges, caught by a tight explicit tol
  const auto rep = check_assumption_A3(WeightSchedule::power(1.0, 0.4), 10000,
                                       0.0, 0.1);
  CHECK_FALSE(rep.passed);

  // summable: fails the divergence check at an explicit absolute threshold
  const auto sq = WeightSchedule::custom(
      [](std::int64_t n) {
        return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
      },
      "inverse-square");
  const auto rep2 = check_assumption_A3(sq, 10000, 10.0, 0.0);
  CHECK_FALSE(rep2.passed);
}

TEST_CASE("all three checks pass across the admissible grid with defaults") {
  for (double gamma : {0.51, 0.7, 0.9, 1.0}) {
    for (double c : {0.1, 0.5, 1.0}) {
      const auto s = WeightSchedule::power(c, gamma);
      for (std::int64_t n_max : {1000LL, 10000LL}) {
        CAPTURE(gamma);
        CAPTURE(c);
        CAPTURE(n_max);
        CHECK(check_assumption_A1(s, 2, n_max).passed);
        CHECK(check_assumption_A2(s, n_max, 1e-3).passed);
        CHECK(check_assumption_A3(s, n_max).passed);
      }
    }
  }
}

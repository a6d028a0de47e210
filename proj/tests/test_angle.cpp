#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "bellsim/angle.hpp"
#include "bellsim/rng.hpp"

using namespace bellsim;
using Catch::Matchers::WithinAbs;

TEST_CASE("normalize_angle maps representatives into [0, pi)") {
  CHECK_THAT(normalize_angle(3.0 * kPi / 2.0).radians,
             WithinAbs(kPi / 2.0, 1e-15));
  CHECK_THAT(normalize_angle(-kPi / 4.0).radians,
             WithinAbs(3.0 * kPi / 4.0, 1e-15));
  CHECK(normalize_angle(kPi).radians == 0.0);
  CHECK(normalize_angle(0.0).radians == 0.0);
}

TEST_CASE("normalize_angle rejects non-finite input") {
  CHECK_THROWS_AS(normalize_angle(std::numeric_limits<double>::infinity()),
                  std::domain_error);
  CHECK_THROWS_AS(normalize_angle(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
}

TEST_CASE("normalize_angle is idempotent and lands in [0, pi)") {
  const RandomStream stream(2024, "angles");
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double x = (stream.uniform(2 * i) - 0.5) * 200.0;
    const double r = normalize_angle(x).radians;
    CAPTURE(x);
    CHECK(r >= 0.0);
    CHECK(r < kPi);
    CHECK(normalize_angle(r).radians == r);
  }
}

TEST_CASE("normalize_angle respects the period-pi symmetry") {
  const RandomStream stream(7, "period");
  for (std::uint64_t i = 0; i < 500; ++i) {
    const double x = (stream.uniform(2 * i) - 0.5) * 20.0;
    const int k = static_cast<int>(stream.uniform(2 * i + 1) * 7.0) - 3;
    const double shifted = x + static_cast<double>(k) * kPi;
    CAPTURE(x, k);
    CHECK_THAT(normalize_angle(shifted).radians,
               WithinAbs(normalize_angle(x).radians, 1e-11));
  }
}

TEST_CASE("degrees_to_radians") {
  CHECK_THAT(degrees_to_radians(180.0), WithinAbs(kPi, 1e-15));
  CHECK_THAT(degrees_to_radians(45.0), WithinAbs(kPi / 4.0, 1e-15));
}

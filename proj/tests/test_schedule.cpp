#include <doctest.h>

#include <cmath>

#include "sqz/errors.hpp"
#include "sqz/schedule.hpp"

using namespace sqz;

TEST_CASE("uniform schedule construction") {
  const auto s = MeasurementSchedule::uniform(0.0, 0.5, 40);
  REQUIRE(s.times.size() == 41);
  CHECK(s.intervals() == 40);
  CHECK(s.t_begin() == 0.0);
  CHECK(s.t_end() == doctest::Approx(20.0));
  CHECK(s.min_interval() == doctest::Approx(0.5));
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(MeasurementSchedule::from_times({0.0}).validate(), ValidationError);
  CHECK_THROWS_AS(MeasurementSchedule::from_times({0.0, 1.0, 1.0}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(MeasurementSchedule::from_times({0.0, 1.0, 0.5}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(MeasurementSchedule::uniform(0.0, -0.5, 3), ValidationError);
  CHECK_THROWS_AS(MeasurementSchedule::uniform(0.0, 0.5, 0), ValidationError);
  CHECK_NOTHROW(MeasurementSchedule::from_times({1.0, 1.5, 2.25}).validate());
}

TEST_CASE("compatible_dt divides every interval") {
  const auto s = MeasurementSchedule::from_times({0.0, 0.5, 1.25, 2.0});
  const double dt = s.compatible_dt(20, 0.02);
  CHECK(dt <= 0.02);
  for (int j = 0; j < s.intervals(); ++j) {
    const double len = s.times[static_cast<std::size_t>(j + 1)] -
                       s.times[static_cast<std::size_t>(j)];
    const double steps = len / dt;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    CHECK(steps >= 20.0 - 1e-9);
  }
}

TEST_CASE("compatible_dt honors the oversampling floor") {
  const auto s = MeasurementSchedule::uniform(0.0, 1.0, 4);
  const double dt = s.compatible_dt(50, 1.0);
  CHECK(1.0 / dt >= 50.0 - 1e-9);
}

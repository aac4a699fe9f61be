#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sqz/control.hpp"
#include "sqz/errors.hpp"
#include "sqz/noise.hpp"
#include "sqz/schedule.hpp"

using namespace sqz;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("piecewise average closed forms") {
  const auto sched = MeasurementSchedule::uniform(0.0, 0.5, 4);

  const auto flat = piecewise_average(ControlPulse::constant(0.3), sched);
  for (double a : flat.interval_areas) CHECK(a == doctest::Approx(0.3 * 0.5));

  // integer number of periods per interval: frequency 4*pi over interval 0.5
  const auto whole = piecewise_average(ControlPulse::cosine(1.0, 4.0 * kPi), sched);
  for (double a : whole.interval_areas) CHECK(std::abs(a) < 1e-12);

  const double A = 0.7, wk = 1.3, tau = 0.5;
  const auto cosavg =
      piecewise_average(ControlPulse::cosine(A, wk), MeasurementSchedule::uniform(0.0, tau, 1));
  CHECK(cosavg.interval_areas[0] == doctest::Approx(A / wk * std::sin(wk * tau)).epsilon(1e-12));
}

TEST_CASE("piecewise table pulse") {
  const auto p = ControlPulse::piecewise({0.0, 1.0, 2.0}, {0.5, -0.25});
  CHECK(p.value(0.5) == 0.5);
  CHECK(p.value(1.5) == -0.25);
  CHECK(p.integral(0.0, 2.0) == doctest::Approx(0.25));
  CHECK(p.integral(0.5, 1.5) == doctest::Approx(0.125));
  CHECK_THROWS_AS(ControlPulse::piecewise({0.0, 0.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(ControlPulse::piecewise({0.0, 1.0}, {1.0, 2.0}), ValidationError);

  // table must cover the sensing window
  const auto sched = MeasurementSchedule::uniform(0.0, 1.0, 4);
  CHECK_THROWS_AS(piecewise_average(p, sched), ValidationError);
}

TEST_CASE("control fourier closed forms") {
  const auto sched = MeasurementSchedule::uniform(0.0, 2.0, 1);
  const double v = 0.4, T = 2.0;
  PiecewiseAveragedControl avg;
  avg.schedule = sched;
  avg.interval_areas = {v};

  CHECK(std::abs(control_fourier(avg, 0.0) - std::complex<double>(v * T, 0.0)) < 1e-14);
  for (double w : {0.3, 1.0, 2.7}) {
    const double y2 = std::norm(control_fourier(avg, w));
    CHECK(y2 == doctest::Approx(v * v * (2.0 - 2.0 * std::cos(w * T)) / (w * w)).epsilon(1e-12));
  }

  PiecewiseAveragedControl zero;
  zero.schedule = sched;
  zero.interval_areas = {0.0};
  CHECK(std::abs(control_fourier(zero, 1.3)) == 0.0);
  CHECK_THROWS_AS(control_fourier(avg, -1.0), DomainError);
}

TEST_CASE("filter function values and positivity") {
  const auto sched = MeasurementSchedule::uniform(0.0, 2.0, 1);
  const double v = 0.4, T = 2.0;
  PiecewiseAveragedControl avg;
  avg.schedule = sched;
  avg.interval_areas = {v};

  const double w = kPi / T;
  const auto f = filter_function(avg, std::vector<double>{w});
  CHECK(f.values[0] == doctest::Approx(4.0 * v * v * T * T / (kPi * kPi) / (2.0 * kPi)));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uw(0.0, 6.0), ua(-1.0, 1.0);
  const auto s2 = MeasurementSchedule::uniform(0.0, 0.5, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a2 = piecewise_average(ControlPulse::cosine(ua(rng), uw(rng) / 2.0, ua(rng)), s2);
    for (int i = 0; i < 100; ++i) {
      const double wi = uw(rng);
      const auto fi = filter_function(a2, std::vector<double>{wi});
      CHECK(fi.values[0] >= 0.0);
    }
  }
}

TEST_CASE("filter scaling is quadratic in the amplitude") {
  const auto sched = MeasurementSchedule::uniform(0.0, 0.5, 10);
  const auto grid = uniform_grid(5.0, 200);
  const auto f1 = filter_function(piecewise_average(ControlPulse::cosine(0.2, 1.1), sched), grid);
  const auto f2 = filter_function(piecewise_average(ControlPulse::cosine(0.4, 1.1), sched), grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(f2.values[i] == doctest::Approx(4.0 * f1.values[i]).epsilon(1e-12));
}

TEST_CASE("time shift leaves the filter unchanged") {
  const auto g = uniform_grid(5.0, 200);
  const auto s0 = MeasurementSchedule::uniform(0.0, 0.5, 10);
  const auto s1 = MeasurementSchedule::uniform(3.7, 0.5, 10);
  // same areas on both windows: shift the pulse along with the schedule
  PiecewiseAveragedControl a0 = piecewise_average(ControlPulse::cosine(0.2, 1.1), s0);
  PiecewiseAveragedControl a1;
  a1.schedule = s1;
  a1.interval_areas = a0.interval_areas;
  const auto f0 = filter_function(a0, g);
  const auto f1 = filter_function(a1, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(f1.values[i] == doctest::Approx(f0.values[i]).epsilon(1e-9));
}

TEST_CASE("filter bank design") {
  const auto sched = MeasurementSchedule::uniform(0.0, 0.5, 40);

  const auto single = design_filter_bank(1.2, 1.2, 1, sched, 0.25);
  REQUIRE(single.filters.size() == 1);
  CHECK(single.design_frequencies[0] == doctest::Approx(1.2));

  const auto bank = design_filter_bank(0.5, 4.0, 8, sched, 0.25);
  REQUIRE(bank.filters.size() == 8);
  for (std::size_t k = 1; k < 8; ++k)
    CHECK(bank.design_frequencies[k] > bank.design_frequencies[k - 1]);

  const double step = bank.grid[1] - bank.grid[0];
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& f = bank.filters[k];
    std::size_t imax = 0;
    for (std::size_t i = 1; i < f.values.size(); ++i)
      if (f.values[i] > f.values[imax]) imax = i;
    CHECK(std::abs(f.omega[imax] - bank.design_frequencies[k]) <= step * (1.0 + 1e-12));
  }

  // band beyond the schedule resolution
  CHECK_THROWS_AS(design_filter_bank(0.5, 10.0, 8, sched, 0.25), ValidationError);
  CHECK_THROWS_AS(design_filter_bank(-0.5, 2.0, 8, sched, 0.25), ValidationError);
  CHECK_THROWS_AS(design_filter_bank(0.5, 2.0, 0, sched, 0.25), ValidationError);
}

TEST_CASE("cross-term identity against the interval-sum form") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> amp(-0.5, 0.5), freq(0.1, 3.0), ph(0.0, 2.0 * kPi);
  std::uniform_int_distribution<int> nmeas(2, 12);
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(0.04, 1.0);

  for (int trial = 0; trial < 50; ++trial) {
    const int n = nmeas(rng);
    const double tau = 0.5;
    const auto sched = MeasurementSchedule::uniform(0.0, tau, n);
    const double dt = tau / 20.0;
    const auto traj =
        sample_trajectory(spec, sched.t_begin(), sched.t_end(), dt, 500 + static_cast<std::uint64_t>(trial));
    const auto pulse = ControlPulse::cosine(amp(rng), freq(rng), ph(rng));
    const auto avg = piecewise_average(pulse, sched);

    // reference: sum_j (control area) * (trapezoid of the noise over interval j)
    double ref = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto a = static_cast<std::size_t>(j) * 20;
      double s = 0.5 * (traj.values[a] + traj.values[a + 20]);
      for (std::size_t i = a + 1; i < a + 20; ++i) s += traj.values[i];
      ref += avg.interval_areas[static_cast<std::size_t>(j)] * s * dt;
    }
    CHECK(std::abs(cross_term_integral(avg, traj) - ref) <= 1e-10);
  }
}

TEST_CASE("cross-term rejects off-grid schedules") {
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(0.04, 1.0);
  const auto traj = sample_trajectory(spec, 0.0, 2.0, 0.05, 1);
  const auto sched = MeasurementSchedule::from_times({0.0, 0.52, 2.0});
  PiecewiseAveragedControl avg;
  avg.schedule = sched;
  avg.interval_areas = {0.1, 0.1};
  CHECK_THROWS_AS(cross_term_integral(avg, traj), ValidationError);
}

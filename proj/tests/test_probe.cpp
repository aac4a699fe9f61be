#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/noise.hpp"
#include "sqz/probe.hpp"
#include "sqz/rng.hpp"

using namespace sqz;

namespace {

NoiseTrajectory zero_trajectory(double t0, double t1, double dt) {
  NoiseTrajectory traj;
  traj.t0 = t0;
  traj.dt = dt;
  traj.values.assign(static_cast<std::size_t>(std::llround((t1 - t0) / dt)) + 1, 0.0);
  return traj;
}

double unitarity_defect(const Matrix2c& u) {
  // max |(U^dag U - I)_ij|
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::complex<double> s = 0.0;
      for (int k = 0; k < 2; ++k)
        s += std::conj(u[static_cast<std::size_t>(k * 2 + i)]) *
             u[static_cast<std::size_t>(k * 2 + j)];
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

} // namespace

TEST_CASE("exact propagator trivial and rotation cases") {
  const std::vector<double> zeros(11, 0.0);
  const auto id = propagate_exact(ProbeConfig{0.0}, zeros, 0.05);
  CHECK(std::abs(id[0] - 1.0) < 1e-14);
  CHECK(std::abs(id[1]) < 1e-14);
  CHECK(std::abs(id[2]) < 1e-14);
  CHECK(std::abs(id[3] - 1.0) < 1e-14);

  const double om = 0.8, tau = 0.5;
  const std::vector<double> field(11, om);
  const auto u = propagate_exact(ProbeConfig{0.0}, field, tau / 10.0);
  CHECK(survival_probability(u) ==
        doctest::Approx(std::cos(om * tau) * std::cos(om * tau)).epsilon(1e-12));
}

TEST_CASE("rabi formula for constant drive with detuning") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uo(0.05, 2.0), ud(-2.0, 2.0), ut(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double om = uo(rng), delta = ud(rng), tau = ut(rng);
    const std::size_t steps = 400;
    const std::vector<double> field(steps + 1, om);
    const auto u = propagate_exact(ProbeConfig{delta}, field, tau / static_cast<double>(steps));
    CHECK(unitarity_defect(u) <= 1e-12);
    const double r2 = om * om + delta * delta;
    const double q_ref =
        1.0 - om * om / r2 * std::pow(std::sin(std::sqrt(r2) * tau), 2);
    CHECK(survival_probability(u) == doctest::Approx(q_ref).epsilon(1e-10));
  }
}

TEST_CASE("propagator grid validation") {
  CHECK_THROWS_AS(propagate_exact(ProbeConfig{0.0}, std::vector<double>{1.0}, 0.1),
                  ValidationError);
  CHECK_THROWS_AS(propagate_exact(ProbeConfig{0.0}, std::vector<double>{1.0, 1.0}, -0.1),
                  ValidationError);
}

TEST_CASE("second-order survival factor") {
  const std::vector<double> zeros(11, 0.0);
  CHECK(survival_factor_second_order(zeros, 0.05) == 1.0);

  const std::vector<double> field(11, 0.1);
  const double q2 = survival_factor_second_order(field, 0.05);
  CHECK(q2 == doctest::Approx(1.0 - 0.0025).epsilon(1e-12));

  const auto u = propagate_exact(ProbeConfig{0.0}, field, 0.05);
  const double qe = survival_probability(u);
  CHECK(qe == doctest::Approx(std::pow(std::cos(0.05), 2)).epsilon(1e-12));
  CHECK(std::abs(qe - q2) <= std::pow(0.05, 4));
}

TEST_CASE("second-order error scales as the fourth power of the pulse area") {
  // halving the area must divide the exact/second-order gap by ~16
  std::vector<double> gaps;
  for (double om : {0.2, 0.1, 0.05, 0.025}) {
    const std::vector<double> field(101, om);
    const double tau = 0.5, dt = tau / 100.0;
    const double qe = survival_probability(propagate_exact(ProbeConfig{0.0}, field, dt));
    gaps.push_back(std::abs(qe - survival_factor_second_order(field, dt)));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    const double slope = std::log2(gaps[i - 1] / gaps[i]);
    CHECK(slope == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("zeno sequence basics") {
  const auto sched = MeasurementSchedule::uniform(0.0, 0.5, 5);
  const auto traj = zero_trajectory(0.0, 2.5, 0.025);

  const auto idle = run_zeno_sequence(ProbeConfig{0.0}, sched, traj,
                                      ControlPulse::constant(0.0), PropagationMode::Exact);
  CHECK(idle.probability == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(idle.valid);

  // two intervals, area 0.1 each
  const auto s2 = MeasurementSchedule::uniform(0.0, 0.5, 2);
  const auto t2 = zero_trajectory(0.0, 1.0, 0.025);
  const auto run = run_zeno_sequence(ProbeConfig{0.0}, s2, t2, ControlPulse::constant(0.2),
                                     PropagationMode::Exact);
  REQUIRE(run.factors.size() == 2);
  CHECK(run.probability == doctest::Approx(std::pow(std::cos(0.1), 4)).epsilon(1e-10));

  // N=1 reduces to a single propagation, both modes agree with the direct call
  const auto s1 = MeasurementSchedule::uniform(0.0, 0.5, 1);
  const auto t1 = zero_trajectory(0.0, 0.5, 0.025);
  const auto one = run_zeno_sequence(ProbeConfig{0.0}, s1, t1, ControlPulse::constant(0.2),
                                     PropagationMode::Exact);
  const std::vector<double> field(21, 0.2);
  CHECK(one.probability ==
        doctest::Approx(survival_probability(propagate_exact(ProbeConfig{0.0}, field, 0.025)))
            .epsilon(1e-12));
}

TEST_CASE("second-order negative factor flags the run") {
  const auto s1 = MeasurementSchedule::uniform(0.0, 1.0, 1);
  const auto t1 = zero_trajectory(0.0, 1.0, 0.05);
  const auto run = run_zeno_sequence(ProbeConfig{0.0}, s1, t1, ControlPulse::constant(1.5),
                                     PropagationMode::SecondOrder);
  CHECK_FALSE(run.valid);
  CHECK(run.factors[0] < 0.0);
}

TEST_CASE("exact mode converges under dt halving") {
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(0.01, 1.0);
  const auto sched = MeasurementSchedule::uniform(0.0, 0.5, 8);
  const auto pulse = ControlPulse::cosine(0.25, 1.0);
  const auto coarse = sample_trajectory(spec, 0.0, 4.0, 0.025, 77);
  // same realization on the doubled grid: linear midpoint refinement keeps the
  // field consistent between resolutions
  NoiseTrajectory fine;
  fine.t0 = 0.0;
  fine.dt = 0.0125;
  fine.values.resize(coarse.values.size() * 2 - 1);
  for (std::size_t i = 0; i + 1 < coarse.values.size(); ++i) {
    fine.values[2 * i] = coarse.values[i];
    fine.values[2 * i + 1] = 0.5 * (coarse.values[i] + coarse.values[i + 1]);
  }
  fine.values.back() = coarse.values.back();

  const auto qa = run_zeno_sequence(ProbeConfig{0.3}, sched, coarse, pulse,
                                    PropagationMode::Exact);
  const auto qb = run_zeno_sequence(ProbeConfig{0.3}, sched, fine, pulse,
                                    PropagationMode::Exact);
  for (std::size_t j = 0; j < qa.factors.size(); ++j)
    CHECK(std::abs(qa.factors[j] - qb.factors[j]) <= 1e-8);
}

TEST_CASE("weak-noise factorization") {
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(0.0004, 1.0);
  const auto sched = MeasurementSchedule::uniform(0.0, 0.5, 40);
  const auto pulse = ControlPulse::cosine(0.1, 1.0);
  const auto dt = 0.025;

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto traj = sample_trajectory(spec, 0.0, 20.0, dt, seed);
    double noise_area2 = 0.0;
    for (int j = 0; j < sched.intervals(); ++j) {
      const auto a = static_cast<std::size_t>(j) * 20;
      double s = 0.5 * (traj.values[a] + traj.values[a + 20]);
      for (std::size_t i = a + 1; i < a + 20; ++i) s += traj.values[i];
      noise_area2 += std::pow(s * dt, 2);
    }
    if (noise_area2 > 1e-3) continue; // outside the weak regime this run

    const auto p = run_zeno_sequence(ProbeConfig{0.0}, sched, traj, pulse,
                                     PropagationMode::SecondOrder);
    const auto zero = zero_trajectory(0.0, 20.0, dt);
    const auto pc = run_zeno_sequence(ProbeConfig{0.0}, sched, zero, pulse,
                                      PropagationMode::SecondOrder);
    const auto avg = piecewise_average(pulse, sched);
    const double pcn = std::exp(-2.0 * cross_term_integral(avg, traj));
    CHECK(std::abs(p.probability / (pc.probability * pcn) - 1.0) <= 2e-3);
  }
}

TEST_CASE("readout models") {
  auto rng = make_rng(123);
  const auto exact = ReadoutModel::analog(0.0);
  CHECK(readout(0.37, exact, rng) == 0.37);

  const auto binary = ReadoutModel::binary(500);
  CHECK(readout(1.0, binary, rng) == 1.0);
  CHECK(readout(0.0, binary, rng) == 0.0);

  const auto b10k = ReadoutModel::binary(10000);
  double acc = 0.0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) acc += readout(0.5, b10k, rng);
  CHECK(std::abs(acc / reps - 0.5) <= 3.0 * 0.005 / std::sqrt(static_cast<double>(reps)));

  CHECK_THROWS_AS(readout(1.2, exact, rng), DomainError);
  CHECK_THROWS_AS(readout(-0.1, binary, rng), DomainError);
  CHECK_THROWS_AS(ReadoutModel::analog(-0.5).validate(), ValidationError);
  CHECK_THROWS_AS(ReadoutModel::binary(0).validate(), ValidationError);

  // analog clamp
  const auto noisy = ReadoutModel::analog(0.3);
  for (int r = 0; r < 200; ++r) {
    const double v = readout(0.98, noisy, rng);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("survival json dump") {
  const auto sched = MeasurementSchedule::uniform(0.0, 0.5, 2);
  const auto traj = zero_trajectory(0.0, 1.0, 0.025);
  const auto run = run_zeno_sequence(ProbeConfig{0.0}, sched, traj,
                                     ControlPulse::constant(0.2), PropagationMode::Exact);
  // exercised in test_campaign; here just check the call path stays consistent
  CHECK(run.mode == PropagationMode::Exact);
}

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/noise.hpp"

using namespace sqz;

TEST_CASE("psd closed forms") {
  const auto ou = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0);
  CHECK(psd_eval(ou, 0.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(psd_eval(ou, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

  const auto fb = SpectralDensitySpec::flat_band(2.0, 1.0, 3.0);
  CHECK(psd_eval(fb, 2.0) == doctest::Approx(2.0));
  CHECK(psd_eval(fb, 5.0) == 0.0);
  CHECK(psd_eval(fb, 0.5) == 0.0);

  const auto tab = SpectralDensitySpec::tabulated({{0.0, 1.0}, {2.0, 3.0}});
  CHECK(psd_eval(tab, 1.0) == doctest::Approx(2.0));
  CHECK(psd_eval(tab, 4.0) == 0.0);
}

TEST_CASE("psd_eval input validation") {
  const auto ou = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0);
  CHECK_THROWS_AS(psd_eval(ou, -0.5), DomainError);
  CHECK_THROWS_AS(SpectralDensitySpec::ornstein_uhlenbeck(-1.0, 1.0).validate(),
                  ValidationError);
  CHECK_THROWS_AS(SpectralDensitySpec::ornstein_uhlenbeck(1.0, 0.0).validate(),
                  ValidationError);
  CHECK_THROWS_AS(SpectralDensitySpec::tabulated({{1.0, 1.0}, {0.5, 1.0}}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(SpectralDensitySpec::tabulated({{0.0, -1.0}, {1.0, 1.0}}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(SpectralDensitySpec::flat_band(1.0, 3.0, 1.0).validate(),
                  ValidationError);
}

TEST_CASE("autocorrelation closed forms and symmetry") {
  const auto ou = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0);
  CHECK(autocorrelation_from_psd(ou, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(autocorrelation_from_psd(ou, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(autocorrelation_from_psd(ou, 0.37) == autocorrelation_from_psd(ou, -0.37));

  const auto fb = SpectralDensitySpec::flat_band(2.0, 1.0, 3.0);
  CHECK(autocorrelation_from_psd(fb, 0.37) == autocorrelation_from_psd(fb, -0.37));
}

TEST_CASE("quadrature round trip matches closed forms to 1e-6") {
  struct Case {
    SpectralDensitySpec spec;
    double tau_c;
  };
  const std::vector<Case> cases = {
      {SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0), 1.0},
      {SpectralDensitySpec::ornstein_uhlenbeck(0.04, 0.3), 0.3},
      {SpectralDensitySpec::random_telegraph(0.25, 2.0), 0.25},
  };
  for (const auto& c : cases) {
    for (int i = 0; i <= 20; ++i) {
      const double tau = 5.0 * c.tau_c * i / 20.0;
      const double closed = autocorrelation_from_psd(c.spec, tau);
      const double quad = autocorrelation_quadrature(c.spec, tau);
      CHECK(std::abs(quad - closed) <= 1e-6 * std::max(1e-30, std::abs(closed)));
    }
  }
}

TEST_CASE("g(0) equals process variance for every catalog kind") {
  const std::vector<SpectralDensitySpec> specs = {
      SpectralDensitySpec::ornstein_uhlenbeck(0.04, 0.7),
      SpectralDensitySpec::random_telegraph(0.09, 1.5),
      SpectralDensitySpec::flat_band(0.5, 0.5, 3.0),
      SpectralDensitySpec::harmonics({{1.0, 0.02}, {2.3, 0.03}}),
      SpectralDensitySpec::tabulated({{0.0, 1.0}, {1.0, 2.0}, {3.0, 0.0}}),
  };
  for (const auto& s : specs) {
    CHECK(autocorrelation_from_psd(s, 0.0) ==
          doctest::Approx(s.total_variance()).epsilon(1e-6));
  }
}

TEST_CASE("trajectory degenerate and bounded cases") {
  const auto zero = SpectralDensitySpec::ornstein_uhlenbeck(0.0, 1.0);
  const auto traj = sample_trajectory(zero, 0.0, 2.0, 0.05, 3);
  for (double v : traj.values) CHECK(v == 0.0);

  const double s2 = 0.5;
  const auto line = SpectralDensitySpec::harmonics({{2.0, s2}});
  const auto h = sample_trajectory(line, 0.0, 10.0, 0.05, 11);
  const double bound = std::sqrt(2.0 * s2) * (1.0 + 1e-12);
  for (double v : h.values) CHECK(std::abs(v) <= bound);
}

TEST_CASE("trajectory determinism and seed sensitivity") {
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0);
  const auto a = sample_trajectory(spec, 0.0, 5.0, 0.05, 42);
  const auto b = sample_trajectory(spec, 0.0, 5.0, 0.05, 42);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);

  const auto c = sample_trajectory(spec, 0.0, 5.0, 0.05, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (a.values[i] != c.values[i]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("trajectory dt validation") {
  const auto ou = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 0.5);
  CHECK_THROWS_AS(sample_trajectory(ou, 0.0, 2.0, 0.2, 1), ValidationError);
  CHECK_THROWS_AS(sample_trajectory(ou, 0.0, 2.0, -0.01, 1), ValidationError);
  const auto line = SpectralDensitySpec::harmonics({{10.0, 1.0}});
  // period 2*pi/10 ~ 0.628; dt must stay below period/20
  CHECK_THROWS_AS(sample_trajectory(line, 0.0, 2.0, 0.1, 1), ValidationError);
}

TEST_CASE("ensemble mean near zero") {
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0);
  const int R = 10000;
  double sum = 0.0;
  for (int r = 0; r < R; ++r)
    sum += sample_trajectory(spec, 0.0, 0.1, 0.05, static_cast<std::uint64_t>(r)).values[0];
  CHECK(std::abs(sum / R) <= 3.0 / std::sqrt(static_cast<double>(R)));
}

TEST_CASE("empirical autocorrelation tracks g up to 3 tau_c") {
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0);
  const int R = 400;
  const double dt = 0.05;
  const std::vector<double> lags = {0.0, 0.5, 1.0, 2.0, 3.0};
  std::vector<double> acc(lags.size(), 0.0);
  for (int r = 0; r < R; ++r) {
    const auto traj = sample_trajectory(spec, 0.0, 20.0, dt, 1000 + static_cast<std::uint64_t>(r));
    for (std::size_t li = 0; li < lags.size(); ++li) {
      const auto k = static_cast<std::size_t>(std::llround(lags[li] / dt));
      double s = 0.0;
      const std::size_t n = traj.values.size() - k;
      for (std::size_t i = 0; i < n; ++i) s += traj.values[i] * traj.values[i + k];
      acc[li] += s / static_cast<double>(n);
    }
  }
  const double g0 = autocorrelation_from_psd(spec, 0.0);
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double est = acc[li] / R;
    const double target = autocorrelation_from_psd(spec, lags[li]);
    CHECK(std::abs(est - target) / g0 <= 4.0 / std::sqrt(static_cast<double>(R)));
  }
}

TEST_CASE("spectral synthesis cross-checks the OU recursion") {
  const auto spec = SpectralDensitySpec::ornstein_uhlenbeck(1.0, 1.0);
  double acc = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < 50; ++r) {
    const auto traj = sample_trajectory_spectral(spec, 0.0, 50.0, 0.05, 7 + static_cast<std::uint64_t>(r));
    for (double v : traj.values) acc += v * v;
    n += traj.values.size();
  }
  CHECK(acc / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.1));
}

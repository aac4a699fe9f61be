#include "sqz/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "sqz/errors.hpp"
#include "sqz/rng.hpp"

namespace sqz {

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw NumericalError("adaptive quadrature: max recursion depth reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  // tolerance deliberately not halved: against endpoint jumps the estimate
  // shrinks with the panel and a halved tolerance would never be met
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(f, a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Integral of density * cos(w tau) over [a, b], splitting so no subpanel
/// spans more than half a cosine period.
double oscillation_aware_panel(const std::function<double(double)>& f, double a, double b,
                               double tau, double tol) {
  const double half_period = tau > 0.0 ? kPi / tau : std::numeric_limits<double>::infinity();
  const auto pieces = std::max<long>(1, static_cast<long>(std::ceil((b - a) / half_period)));
  double total = 0.0;
  for (long i = 0; i < pieces; ++i) {
    const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(pieces);
    const double hi = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(pieces);
    total += adaptive_simpson(f, lo, hi, tol / static_cast<double>(pieces));
  }
  return total;
}

/// (1/2pi) int_0^inf S(w) cos(w tau) dw for a decaying density S.
/// Panels split at density breakpoints (band edges, table knots), then either
/// geometric panels (slow phase) or half-period panels between cosine zeros
/// summed until the alternating tail is below tolerance.
double cosine_transform(const std::function<double(double)>& density, double tau,
                        double omega_scale, double abs_tol,
                        std::vector<double> breakpoints = {}) {
  tau = std::abs(tau);
  const auto f = [&](double w) { return density(w) * std::cos(w * tau); };
  double total = 0.0;

  std::sort(breakpoints.begin(), breakpoints.end());
  double a = 0.0;
  for (double bp : breakpoints) {
    if (bp <= a) continue;
    total += oscillation_aware_panel(f, a, bp, tau, abs_tol * 0.01);
    a = bp;
  }

  if (tau * std::max(omega_scale, a) < 1e-9) {
    // effectively no oscillation: geometric panels until the tail dies
    double width = std::max(omega_scale, 1e-30);
    for (int i = 0; i < 400; ++i) {
      const double piece = adaptive_simpson(f, a, a + width, abs_tol * 0.01);
      total += piece;
      a += width;
      width *= 1.5;
      if (i > 3 && std::abs(piece) < abs_tol * 0.1) return total / (2.0 * kPi);
    }
    throw NumericalError("autocorrelation quadrature did not converge (tau ~ 0 tail)");
  }

  const double half_period = kPi / tau;
  // advance to the next cosine zero
  const double next_zero =
      (std::floor(a / half_period - 0.5) + 1.5) * half_period;
  total += oscillation_aware_panel(f, a, next_zero, tau, abs_tol * 0.01);
  a = next_zero;

  int quiet = 0;
  for (long n = 0; n < 4000000; ++n) {
    const double piece = adaptive_simpson(f, a, a + half_period, abs_tol * 0.01);
    total += piece;
    a += half_period;
    quiet = (std::abs(piece) < 0.5 * abs_tol) ? quiet + 1 : 0;
    if (quiet >= 2) return total / (2.0 * kPi);
  }
  throw NumericalError("autocorrelation quadrature did not converge (oscillatory tail)");
}

double table_interp(const std::vector<std::pair<double, double>>& table, double omega) {
  if (table.empty() || omega < table.front().first || omega > table.back().first)
    return 0.0;
  const auto it = std::lower_bound(
      table.begin(), table.end(), omega,
      [](const std::pair<double, double>& p, double w) { return p.first < w; });
  if (it == table.begin()) return it->second;
  const auto lo = std::prev(it);
  const double f = (omega - lo->first) / (it->first - lo->first);
  return lo->second + f * (it->second - lo->second);
}

} // namespace

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::OrnsteinUhlenbeck: return "ornstein-uhlenbeck";
    case NoiseKind::RandomPhaseHarmonics: return "random-phase-harmonics";
    case NoiseKind::RandomTelegraph: return "random-telegraph";
    case NoiseKind::FlatBand: return "flat-band";
    case NoiseKind::Tabulated: return "tabulated";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "ornstein-uhlenbeck") return NoiseKind::OrnsteinUhlenbeck;
  if (name == "random-phase-harmonics") return NoiseKind::RandomPhaseHarmonics;
  if (name == "random-telegraph") return NoiseKind::RandomTelegraph;
  if (name == "flat-band") return NoiseKind::FlatBand;
  if (name == "tabulated") return NoiseKind::Tabulated;
  throw ValidationError("unknown noise kind: " + name);
}

void SpectralDensitySpec::validate() const {
  switch (kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      if (variance < 0.0) throw ValidationError("noise variance must be >= 0");
      if (correlation_time <= 0.0) throw ValidationError("correlation time must be > 0");
      break;
    case NoiseKind::RandomPhaseHarmonics:
      if (lines.empty()) throw ValidationError("harmonic spec needs at least one line");
      for (const auto& l : lines) {
        if (l.omega < 0.0) throw ValidationError("harmonic line frequency must be >= 0");
        if (l.variance < 0.0) throw ValidationError("harmonic line variance must be >= 0");
      }
      break;
    case NoiseKind::FlatBand:
      if (band_level < 0.0) throw ValidationError("flat-band level must be >= 0");
      if (!(0.0 <= band_lo && band_lo < band_hi))
        throw ValidationError("flat-band edges must satisfy 0 <= lo < hi");
      break;
    case NoiseKind::Tabulated: {
      if (table.size() < 2) throw ValidationError("tabulated spec needs >= 2 samples");
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].second < 0.0) throw ValidationError("tabulated S(omega) must be >= 0");
        if (table[i].first < 0.0) throw ValidationError("tabulated omega must be >= 0");
        if (i > 0 && table[i].first <= table[i - 1].first)
          throw ValidationError("tabulated omega samples must be strictly increasing");
      }
      break;
    }
  }
}

double SpectralDensitySpec::total_variance() const {
  switch (kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      return variance;
    case NoiseKind::RandomPhaseHarmonics: {
      double v = 0.0;
      for (const auto& l : lines) v += l.variance;
      return v;
    }
    case NoiseKind::FlatBand:
      return band_level * (band_hi - band_lo) / (2.0 * kPi);
    case NoiseKind::Tabulated: {
      double v = 0.0;
      for (std::size_t i = 1; i < table.size(); ++i)
        v += 0.5 * (table[i].second + table[i - 1].second) *
             (table[i].first - table[i - 1].first);
      return v / (2.0 * kPi);
    }
  }
  return 0.0;
}

double SpectralDensitySpec::min_timescale() const {
  switch (kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      return correlation_time;
    case NoiseKind::RandomPhaseHarmonics: {
      double wmax = 0.0;
      for (const auto& l : lines) wmax = std::max(wmax, l.omega);
      return wmax > 0.0 ? 2.0 * kPi / wmax : std::numeric_limits<double>::infinity();
    }
    case NoiseKind::FlatBand:
      return 2.0 * kPi / band_hi;
    case NoiseKind::Tabulated:
      return 2.0 * kPi / table.back().first;
  }
  return 0.0;
}

double SpectralDensitySpec::suggested_omega_max() const {
  switch (kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      return 50.0 / correlation_time;
    case NoiseKind::RandomPhaseHarmonics: {
      double wmax = 0.0;
      for (const auto& l : lines) wmax = std::max(wmax, l.omega);
      return 2.0 * wmax + 1.0;
    }
    case NoiseKind::FlatBand:
      return band_hi;
    case NoiseKind::Tabulated:
      return table.back().first;
  }
  return 0.0;
}

SpectralDensitySpec SpectralDensitySpec::ornstein_uhlenbeck(double sigma2, double tau_c) {
  SpectralDensitySpec s;
  s.kind = NoiseKind::OrnsteinUhlenbeck;
  s.variance = sigma2;
  s.correlation_time = tau_c;
  s.validate();
  return s;
}

SpectralDensitySpec SpectralDensitySpec::random_telegraph(double sigma2,
                                                          double switching_rate) {
  if (switching_rate <= 0.0) throw ValidationError("telegraph switching rate must be > 0");
  SpectralDensitySpec s;
  s.kind = NoiseKind::RandomTelegraph;
  s.variance = sigma2;
  s.correlation_time = 1.0 / (2.0 * switching_rate);
  s.validate();
  return s;
}

SpectralDensitySpec SpectralDensitySpec::harmonics(std::vector<HarmonicLine> lines) {
  SpectralDensitySpec s;
  s.kind = NoiseKind::RandomPhaseHarmonics;
  s.lines = std::move(lines);
  s.validate();
  return s;
}

SpectralDensitySpec SpectralDensitySpec::flat_band(double level, double lo, double hi) {
  SpectralDensitySpec s;
  s.kind = NoiseKind::FlatBand;
  s.band_level = level;
  s.band_lo = lo;
  s.band_hi = hi;
  s.validate();
  return s;
}

SpectralDensitySpec SpectralDensitySpec::tabulated(
    std::vector<std::pair<double, double>> table) {
  SpectralDensitySpec s;
  s.kind = NoiseKind::Tabulated;
  s.table = std::move(table);
  s.validate();
  return s;
}

double psd_eval(const SpectralDensitySpec& spec, double omega) {
  if (omega < 0.0) throw DomainError("psd_eval: omega must be >= 0 (one-sided PSD)");
  spec.validate();
  switch (spec.kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph: {
      // Lorentzian pair of g(tau) = sigma^2 exp(-|tau|/tau_c)
      const double wt = omega * spec.correlation_time;
      return 4.0 * spec.variance * spec.correlation_time / (1.0 + wt * wt);
    }
    case NoiseKind::RandomPhaseHarmonics:
      return 0.0; // delta comb; weights live in spec.lines
    case NoiseKind::FlatBand:
      return (omega >= spec.band_lo && omega <= spec.band_hi) ? spec.band_level : 0.0;
    case NoiseKind::Tabulated:
      return table_interp(spec.table, omega);
  }
  return 0.0;
}

double autocorrelation_from_psd(const SpectralDensitySpec& spec, double tau) {
  spec.validate();
  tau = std::abs(tau);
  switch (spec.kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      return spec.variance * std::exp(-tau / spec.correlation_time);
    case NoiseKind::RandomPhaseHarmonics: {
      double g = 0.0;
      for (const auto& l : spec.lines) g += l.variance * std::cos(l.omega * tau);
      return g;
    }
    case NoiseKind::FlatBand: {
      if (tau == 0.0) return spec.total_variance();
      return spec.band_level * (std::sin(spec.band_hi * tau) - std::sin(spec.band_lo * tau)) /
             (2.0 * kPi * tau);
    }
    case NoiseKind::Tabulated:
      return autocorrelation_quadrature(spec, tau);
  }
  return 0.0;
}

double autocorrelation_quadrature(const SpectralDensitySpec& spec, double tau,
                                  double rel_tol) {
  spec.validate();
  if (spec.is_line_spectrum())
    return autocorrelation_from_psd(spec, tau); // comb has an exact sum
  const double g0 = spec.total_variance();
  const double abs_tol = std::max(rel_tol * std::max(g0, 1e-300), 1e-300);
  const auto density = [&spec](double w) { return psd_eval(spec, w); };
  const double scale = std::max(spec.suggested_omega_max() / 50.0, 1e-6);
  std::vector<double> breakpoints;
  if (spec.kind == NoiseKind::FlatBand) breakpoints = {spec.band_lo, spec.band_hi};
  if (spec.kind == NoiseKind::Tabulated)
    for (const auto& [w, s] : spec.table) breakpoints.push_back(w);
  return cosine_transform(density, tau, scale, abs_tol, std::move(breakpoints));
}

NoiseTrajectory sample_trajectory_spectral(const SpectralDensitySpec& spec, double t0,
                                           double t1, double dt, std::uint64_t seed) {
  spec.validate();
  if (dt <= 0.0 || t1 <= t0) throw ValidationError("trajectory window/dt invalid");
  const std::size_t n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  NoiseTrajectory traj;
  traj.t0 = t0;
  traj.dt = dt;
  traj.seed = seed;
  traj.values.assign(n + 1, 0.0);
  if (spec.total_variance() == 0.0) return traj;

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

  if (spec.is_line_spectrum()) {
    for (const auto& l : spec.lines) {
      const double amp = std::sqrt(2.0 * l.variance);
      const double phi = phase(rng);
      for (std::size_t i = 0; i <= n; ++i)
        traj.values[i] += amp * std::cos(l.omega * (t0 + dt * static_cast<double>(i)) + phi);
    }
    return traj;
  }

  // harmonic comb: Omega(t) = sum_i sqrt(S(w_i) dw / pi) cos(w_i t + phi_i).
  // dw fine enough that the synthesis period well exceeds the window.
  const double wmax = spec.suggested_omega_max();
  const double span = t1 - t0;
  const double dw_window = 2.0 * kPi / (16.0 * span);
  const double dw = std::max(std::min(dw_window, wmax / 512.0), wmax / 262144.0);
  const std::size_t n_lines = static_cast<std::size_t>(std::ceil(wmax / dw));
  for (std::size_t j = 0; j < n_lines; ++j) {
    const double w = (static_cast<double>(j) + 0.5) * dw;
    const double amp = std::sqrt(psd_eval(spec, w) * dw / kPi);
    const double phi = phase(rng);
    if (amp == 0.0) continue;
    for (std::size_t i = 0; i <= n; ++i)
      traj.values[i] += amp * std::cos(w * (t0 + dt * static_cast<double>(i)) + phi);
  }
  return traj;
}

NoiseTrajectory sample_trajectory(const SpectralDensitySpec& spec, double t0, double t1,
                                  double dt, std::uint64_t seed) {
  spec.validate();
  if (dt <= 0.0 || t1 <= t0) throw ValidationError("trajectory window/dt invalid");
  const double limit = spec.min_timescale() /
                       (spec.kind == NoiseKind::RandomPhaseHarmonics ? 20.0 : 10.0);
  if (dt > limit)
    throw ValidationError("trajectory dt " + std::to_string(dt) +
                          " too coarse for the noise timescale (limit " +
                          std::to_string(limit) + ")");

  switch (spec.kind) {
    case NoiseKind::OrnsteinUhlenbeck: {
      const std::size_t n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
      NoiseTrajectory traj;
      traj.t0 = t0;
      traj.dt = dt;
      traj.seed = seed;
      traj.values.assign(n + 1, 0.0);
      if (spec.variance == 0.0) return traj;
      auto rng = make_rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double sigma = std::sqrt(spec.variance);
      const double rho = std::exp(-dt / spec.correlation_time);
      const double kick = sigma * std::sqrt(1.0 - rho * rho);
      double x = sigma * gauss(rng); // stationary start
      traj.values[0] = x;
      for (std::size_t i = 1; i <= n; ++i) {
        x = rho * x + kick * gauss(rng);
        traj.values[i] = x;
      }
      return traj;
    }
    case NoiseKind::RandomTelegraph: {
      const std::size_t n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
      NoiseTrajectory traj;
      traj.t0 = t0;
      traj.dt = dt;
      traj.seed = seed;
      traj.values.assign(n + 1, 0.0);
      if (spec.variance == 0.0) return traj;
      auto rng = make_rng(seed);
      const double a = std::sqrt(spec.variance);
      const double rate = 1.0 / (2.0 * spec.correlation_time);
      std::exponential_distribution<double> wait(rate);
      std::bernoulli_distribution coin(0.5);
      double level = coin(rng) ? a : -a;
      double next_flip = wait(rng);
      for (std::size_t i = 0; i <= n; ++i) {
        const double t = dt * static_cast<double>(i);
        while (t >= next_flip) {
          level = -level;
          next_flip += wait(rng);
        }
        traj.values[i] = level;
      }
      return traj;
    }
    case NoiseKind::RandomPhaseHarmonics:
    case NoiseKind::FlatBand:
    case NoiseKind::Tabulated:
      return sample_trajectory_spectral(spec, t0, t1, dt, seed);
  }
  throw ValidationError("unreachable noise kind");
}

} // namespace sqz

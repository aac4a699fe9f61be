#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sqz {

enum class NoiseKind {
  OrnsteinUhlenbeck,
  RandomPhaseHarmonics,
  RandomTelegraph,
  FlatBand,
  Tabulated,
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct HarmonicLine {
  double omega;    // rad/s
  double variance; // (rad/s)^2 contributed by this line
};

/// Parametric one-sided power spectral density S(omega), omega >= 0.
/// Convention: g(tau) = (1/2pi) * integral_0^inf S(w) cos(w tau) dw,
/// so g(0) equals the process variance.
struct SpectralDensitySpec {
  NoiseKind kind = NoiseKind::OrnsteinUhlenbeck;

  // ornstein-uhlenbeck / random-telegraph
  double variance = 0.0;         // sigma^2, (rad/s)^2
  double correlation_time = 0.0; // tau_c, s (telegraph: 1/(2*switching rate))

  // random-phase-harmonics
  std::vector<HarmonicLine> lines;

  // flat-band
  double band_lo = 0.0, band_hi = 0.0; // rad/s
  double band_level = 0.0;             // S value on the band

  // tabulated: (omega, S) samples, omega strictly increasing
  std::vector<std::pair<double, double>> table;

  void validate() const; // throws ValidationError

  /// Delta-line spectra (harmonics) have no pointwise density.
  bool is_line_spectrum() const { return kind == NoiseKind::RandomPhaseHarmonics; }

  /// g(0): total process variance implied by the spectrum.
  double total_variance() const;

  /// Shortest timescale the process resolves; used for dt validation.
  double min_timescale() const;

  /// Synthesis/quadrature frequency cutoff, max(50/tau_c, band content).
  double suggested_omega_max() const;

  static SpectralDensitySpec ornstein_uhlenbeck(double sigma2, double tau_c);
  static SpectralDensitySpec random_telegraph(double sigma2, double switching_rate);
  static SpectralDensitySpec harmonics(std::vector<HarmonicLine> lines);
  static SpectralDensitySpec flat_band(double level, double lo, double hi);
  static SpectralDensitySpec tabulated(std::vector<std::pair<double, double>> table);
};

/// One realization of Omega_n(t) on a uniform grid.
struct NoiseTrajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values; // Omega_n(t0 + i*dt), rad/s
  std::uint64_t seed = 0;

  double t_end() const { return t0 + dt * static_cast<double>(values.size() - 1); }
  std::size_t size() const { return values.size(); }
};

/// S(omega); tabulated specs interpolate linearly, 0 outside the table.
/// Line spectra carry delta weights and have no finite density off the lines;
/// psd_eval returns 0 there (use the spec's `lines` for the weights).
double psd_eval(const SpectralDensitySpec& spec, double omega);

/// g(tau) via closed form when available, else adaptive quadrature.
double autocorrelation_from_psd(const SpectralDensitySpec& spec, double tau);

/// g(tau) always by quadrature of (1/2pi) int S(w) cos(w tau) dw;
/// independent cross-check of the closed forms.
double autocorrelation_quadrature(const SpectralDensitySpec& spec, double tau,
                                  double rel_tol = 1e-8);

/// Stationary zero-mean realization over [t0, t1]; pure in (spec, window, dt, seed).
NoiseTrajectory sample_trajectory(const SpectralDensitySpec& spec, double t0, double t1,
                                  double dt, std::uint64_t seed);

/// Spectral synthesis (random-phase harmonic comb) for any spec with a density;
/// used as default for flat-band/tabulated and as an OU cross-check.
NoiseTrajectory sample_trajectory_spectral(const SpectralDensitySpec& spec, double t0,
                                           double t1, double dt, std::uint64_t seed);

} // namespace sqz

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sqz/noise.hpp"
#include "sqz/schedule.hpp"

namespace sqz {

/// Coherent drive Omega_c(t) on sigma_x.
struct ControlPulse {
  enum class Kind { Constant, Cosine, PiecewiseTable };

  Kind kind = Kind::Constant;
  double amplitude = 0.0; // rad/s
  double frequency = 0.0; // rad/s (cosine)
  double phase = 0.0;     // rad    (cosine)
  // piecewise-constant: value levels[i] on [knots[i], knots[i+1])
  std::vector<double> knots;
  std::vector<double> levels;

  static ControlPulse constant(double amplitude);
  static ControlPulse cosine(double amplitude, double frequency, double phase = 0.0);
  static ControlPulse piecewise(std::vector<double> knots, std::vector<double> levels);

  void validate() const;
  double value(double t) const;
  /// Exact integral of the pulse over [a, b].
  double integral(double a, double b) const;
};

/// Piecewise-constant Omega~_c: the integrated pulse area per interval
/// (units rad) held constant over that interval.
struct PiecewiseAveragedControl {
  MeasurementSchedule schedule;
  std::vector<double> interval_areas; // area_j = int_{t_{j-1}}^{t_j} Omega_c dt

  double value(double t) const; // area of the interval containing t, 0 outside
};

/// Tabulated filter function F(omega) >= 0 on a frequency grid.
struct FilterFunction {
  std::vector<double> omega;  // rad/s, sorted
  std::vector<double> values; // F(omega_i)

  double interpolate(double w) const;
  /// Trapezoid integral of F over the grid.
  double integral() const;
};

PiecewiseAveragedControl piecewise_average(const ControlPulse& pulse,
                                           const MeasurementSchedule& schedule);

/// Y(omega) = int Omega~_c(t) e^{i omega t} dt, closed form per interval.
std::complex<double> control_fourier(const PiecewiseAveragedControl& avg, double omega);

/// F(omega) = |Y(omega)|^2 / (2 pi) on the given grid.
FilterFunction filter_function(const PiecewiseAveragedControl& avg,
                               std::span<const double> grid);

std::vector<double> uniform_grid(double omega_max, std::size_t points = 2000);

struct FilterBank {
  std::vector<ControlPulse> pulses;
  std::vector<double> design_frequencies; // rad/s, one per pulse
  std::vector<FilterFunction> filters;
  std::vector<double> grid;
};

/// K cosine pulses with modulation frequencies spread over [lo, hi]. The drive
/// frequency of each pulse is calibrated so the tabulated filter peak lands on
/// its design frequency (finite-window effects shift the peak slightly).
FilterBank design_filter_bank(double lo, double hi, int count,
                              const MeasurementSchedule& schedule, double amplitude,
                              std::vector<double> grid = {});

/// int Omega~_c(t) Omega_n(t) dt over the sensing window; trapezoid per
/// interval so the piecewise identity with sum_j (int Omega_c)(int Omega_n)
/// is exact up to rounding.
double cross_term_integral(const PiecewiseAveragedControl& avg,
                           const NoiseTrajectory& traj);

} // namespace sqz

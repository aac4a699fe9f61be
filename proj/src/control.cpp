#include "sqz/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sqz/errors.hpp"

namespace sqz {

namespace {
constexpr double kPi = std::numbers::pi;

std::size_t grid_index(const NoiseTrajectory& traj, double t) {
  const double x = (t - traj.t0) / traj.dt;
  const auto i = std::llround(x);
  if (std::abs(x - static_cast<double>(i)) > 1e-6 || i < 0 ||
      static_cast<std::size_t>(i) >= traj.size())
    throw ValidationError("schedule time " + std::to_string(t) +
                          " does not fall on the trajectory grid");
  return static_cast<std::size_t>(i);
}

double trapezoid(std::span<const double> y, double dt) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dt;
}

// location of the tabulated maximum, refined by a parabolic fit through the
// three samples around it
double refined_argmax(const FilterFunction& f) {
  const auto it = std::max_element(f.values.begin(), f.values.end());
  const auto i = static_cast<std::size_t>(std::distance(f.values.begin(), it));
  if (i == 0 || i + 1 == f.values.size()) return f.omega[i];
  const double y0 = f.values[i - 1], y1 = f.values[i], y2 = f.values[i + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom >= 0.0) return f.omega[i];
  const double d = 0.5 * (y0 - y2) / denom;
  return f.omega[i] + d * (f.omega[i + 1] - f.omega[i]);
}
} // namespace

ControlPulse ControlPulse::constant(double amplitude) {
  ControlPulse p;
  p.kind = Kind::Constant;
  p.amplitude = amplitude;
  return p;
}

ControlPulse ControlPulse::cosine(double amplitude, double frequency, double phase) {
  ControlPulse p;
  p.kind = Kind::Cosine;
  p.amplitude = amplitude;
  p.frequency = frequency;
  p.phase = phase;
  p.validate();
  return p;
}

ControlPulse ControlPulse::piecewise(std::vector<double> knots,
                                     std::vector<double> levels) {
  ControlPulse p;
  p.kind = Kind::PiecewiseTable;
  p.knots = std::move(knots);
  p.levels = std::move(levels);
  p.validate();
  return p;
}

void ControlPulse::validate() const {
  switch (kind) {
    case Kind::Constant: break;
    case Kind::Cosine:
      if (frequency < 0.0) throw ValidationError("cosine pulse frequency must be >= 0");
      break;
    case Kind::PiecewiseTable:
      if (knots.size() < 2 || levels.size() + 1 != knots.size())
        throw ValidationError("piecewise pulse needs n+1 knots for n levels");
      for (std::size_t i = 1; i < knots.size(); ++i)
        if (knots[i] <= knots[i - 1])
          throw ValidationError("piecewise pulse knots must be strictly increasing");
      break;
  }
}

double ControlPulse::value(double t) const {
  switch (kind) {
    case Kind::Constant: return amplitude;
    case Kind::Cosine: return amplitude * std::cos(frequency * t + phase);
    case Kind::PiecewiseTable: {
      if (t < knots.front() || t > knots.back()) return 0.0;
      const auto it = std::upper_bound(knots.begin(), knots.end(), t);
      const auto i = static_cast<std::size_t>(std::distance(knots.begin(), it));
      return levels[std::min(i - 1, levels.size() - 1)];
    }
  }
  return 0.0;
}

double ControlPulse::integral(double a, double b) const {
  switch (kind) {
    case Kind::Constant: return amplitude * (b - a);
    case Kind::Cosine:
      if (frequency == 0.0) return amplitude * std::cos(phase) * (b - a);
      return amplitude / frequency *
             (std::sin(frequency * b + phase) - std::sin(frequency * a + phase));
    case Kind::PiecewiseTable: {
      double s = 0.0;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const double lo = std::max(a, knots[i]);
        const double hi = std::min(b, knots[i + 1]);
        if (hi > lo) s += levels[i] * (hi - lo);
      }
      return s;
    }
  }
  return 0.0;
}

double PiecewiseAveragedControl::value(double t) const {
  const auto& tt = schedule.times;
  if (t < tt.front() || t >= tt.back()) return 0.0;
  const auto it = std::upper_bound(tt.begin(), tt.end(), t);
  const auto j = static_cast<std::size_t>(std::distance(tt.begin(), it)) - 1;
  return interval_areas[std::min(j, interval_areas.size() - 1)];
}

double FilterFunction::interpolate(double w) const {
  if (omega.empty() || w < omega.front() || w > omega.back()) return 0.0;
  const auto it = std::lower_bound(omega.begin(), omega.end(), w);
  const auto i = static_cast<std::size_t>(std::distance(omega.begin(), it));
  if (i == 0) return values.front();
  const double f = (w - omega[i - 1]) / (omega[i] - omega[i - 1]);
  return values[i - 1] + f * (values[i] - values[i - 1]);
}

double FilterFunction::integral() const {
  double s = 0.0;
  for (std::size_t i = 1; i < omega.size(); ++i)
    s += 0.5 * (values[i] + values[i - 1]) * (omega[i] - omega[i - 1]);
  return s;
}

PiecewiseAveragedControl piecewise_average(const ControlPulse& pulse,
                                           const MeasurementSchedule& schedule) {
  pulse.validate();
  schedule.validate();
  if (pulse.kind == ControlPulse::Kind::PiecewiseTable &&
      (pulse.knots.front() > schedule.t_begin() || pulse.knots.back() < schedule.t_end()))
    throw ValidationError("piecewise pulse table does not cover the sensing window");
  PiecewiseAveragedControl avg;
  avg.schedule = schedule;
  avg.interval_areas.resize(static_cast<std::size_t>(schedule.intervals()));
  for (std::size_t j = 0; j < avg.interval_areas.size(); ++j)
    avg.interval_areas[j] = pulse.integral(schedule.times[j], schedule.times[j + 1]);
  return avg;
}

std::complex<double> control_fourier(const PiecewiseAveragedControl& avg, double omega) {
  if (omega < 0.0) throw DomainError("control_fourier: omega must be >= 0");
  std::complex<double> y{0.0, 0.0};
  const auto& tt = avg.schedule.times;
  for (std::size_t j = 0; j < avg.interval_areas.size(); ++j) {
    const double a = tt[j], b = tt[j + 1];
    if (omega == 0.0) {
      y += avg.interval_areas[j] * (b - a);
      continue;
    }
    // e^{iwb} - e^{iwa} = e^{iwa} * ((cos(wd)-1) + i sin(wd)), d = b - a
    const double d = b - a;
    const std::complex<double> ea{std::cos(omega * a), std::sin(omega * a)};
    const std::complex<double> step{-2.0 * std::pow(std::sin(0.5 * omega * d), 2),
                                    std::sin(omega * d)};
    y += avg.interval_areas[j] * ea * step / std::complex<double>{0.0, omega};
  }
  return y;
}

FilterFunction filter_function(const PiecewiseAveragedControl& avg,
                               std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0) throw ValidationError("filter grid must be nonnegative");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw ValidationError("filter grid must be sorted ascending");
  }
  FilterFunction f;
  f.omega.assign(grid.begin(), grid.end());
  f.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    f.values[i] = std::norm(control_fourier(avg, grid[i])) / (2.0 * kPi);
  return f;
}

std::vector<double> uniform_grid(double omega_max, std::size_t points) {
  if (omega_max <= 0.0 || points < 2) throw ValidationError("bad frequency grid request");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = omega_max * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

FilterBank design_filter_bank(double lo, double hi, int count,
                              const MeasurementSchedule& schedule, double amplitude,
                              std::vector<double> grid) {
  schedule.validate();
  if (count < 1) throw ValidationError("filter bank needs K >= 1");
  if (lo < 0.0 || hi < lo) throw ValidationError("filter bank band must satisfy 0 <= lo <= hi");
  const double resolvable = kPi / schedule.min_interval();
  if (hi >= resolvable)
    throw ValidationError("requested band exceeds the schedule resolution; resolvable band is [0, " +
                          std::to_string(resolvable) + ") rad/s");

  std::vector<double> freqs(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    freqs[static_cast<std::size_t>(k)] =
        count == 1 ? 0.5 * (lo + hi)
                   : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);

  FilterBank bank;
  bank.grid = grid.empty() ? uniform_grid(std::min(2.5 * freqs.back(), 0.999 * resolvable))
                           : std::move(grid);
  bank.design_frequencies = freqs;
  const double step =
      bank.grid.size() > 1 ? bank.grid[1] - bank.grid[0] : 1e-3 * freqs.front();
  for (double wk : freqs) {
    // the spectral peak of a finite-window cosine drive sits slightly off the
    // drive frequency; shift the drive until the tabulated peak lands on wk
    double drive = wk;
    ControlPulse pulse = ControlPulse::cosine(amplitude, drive);
    FilterFunction filt = filter_function(piecewise_average(pulse, schedule), bank.grid);
    for (int iter = 0; iter < 6; ++iter) {
      const double shift = wk - refined_argmax(filt);
      if (std::abs(shift) < 1e-4 * step) break;
      drive = std::clamp(drive + shift, 0.25 * wk, 0.999 * resolvable);
      pulse = ControlPulse::cosine(amplitude, drive);
      filt = filter_function(piecewise_average(pulse, schedule), bank.grid);
    }
    bank.pulses.push_back(pulse);
    bank.filters.push_back(std::move(filt));
  }
  return bank;
}

double cross_term_integral(const PiecewiseAveragedControl& avg,
                           const NoiseTrajectory& traj) {
  double total = 0.0;
  const auto& tt = avg.schedule.times;
  for (std::size_t j = 0; j < avg.interval_areas.size(); ++j) {
    const std::size_t a = grid_index(traj, tt[j]);
    const std::size_t b = grid_index(traj, tt[j + 1]);
    total += avg.interval_areas[j] *
             trapezoid(std::span<const double>(traj.values).subspan(a, b - a + 1), traj.dt);
  }
  return total;
}

} // namespace sqz

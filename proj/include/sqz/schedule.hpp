#pragma once

#include <vector>

namespace sqz {

/// Zeno measurement times t_0 < t_1 < ... < t_N.
struct MeasurementSchedule {
  std::vector<double> times;

  static MeasurementSchedule uniform(double t0, double interval, int n_measurements);
  static MeasurementSchedule from_times(std::vector<double> times);

  void validate() const;

  int intervals() const { return static_cast<int>(times.size()) - 1; }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }
  double min_interval() const;

  /// dt such that every interval holds an integer number of steps and
  /// each interval has at least `oversampling` steps; also caps dt at `dt_max`.
  double compatible_dt(int oversampling, double dt_max) const;
};

} // namespace sqz

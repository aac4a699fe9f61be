#include "sqz/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sqz/errors.hpp"

namespace sqz {

MeasurementSchedule MeasurementSchedule::uniform(double t0, double interval,
                                                int n_measurements) {
  if (n_measurements < 1) throw ValidationError("schedule needs N >= 1 measurements");
  if (interval <= 0.0) throw ValidationError("schedule interval must be > 0");
  MeasurementSchedule s;
  s.times.resize(static_cast<std::size_t>(n_measurements) + 1);
  for (std::size_t j = 0; j < s.times.size(); ++j)
    s.times[j] = t0 + interval * static_cast<double>(j);
  return s;
}

MeasurementSchedule MeasurementSchedule::from_times(std::vector<double> times) {
  MeasurementSchedule s;
  s.times = std::move(times);
  s.validate();
  return s;
}

void MeasurementSchedule::validate() const {
  if (times.size() < 2) throw ValidationError("schedule needs N >= 1 measurements");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (times[j] <= times[j - 1])
      throw ValidationError("schedule times must be strictly increasing");
}

double MeasurementSchedule::min_interval() const {
  double m = times[1] - times[0];
  for (std::size_t j = 2; j < times.size(); ++j)
    m = std::min(m, times[j] - times[j - 1]);
  return m;
}

double MeasurementSchedule::compatible_dt(int oversampling, double dt_max) const {
  validate();
  // steps per interval: smallest count that satisfies both constraints on
  // every interval; non-uniform schedules get per-interval counts from one dt,
  // so pick dt = min_interval / k with k large enough that each interval is an
  // integer multiple within rounding.
  const double base = min_interval();
  const double cap = std::min(base / static_cast<double>(oversampling), dt_max);
  // dt = base / k for the smallest k meeting the cap; grow k until dt also
  // divides every other interval
  auto k = static_cast<long long>(std::ceil(base / cap - 1e-9));
  k = std::max<long long>(k, oversampling);
  for (int iter = 0; iter < 4096; ++iter, ++k) {
    const double dt = base / static_cast<double>(k);
    bool ok = true;
    for (std::size_t j = 1; j < times.size(); ++j) {
      const double steps = (times[j] - times[j - 1]) / dt;
      if (std::abs(steps - static_cast<double>(std::llround(steps))) > 1e-9 * steps) {
        ok = false;
        break;
      }
    }
    if (ok) return dt;
  }
  throw ValidationError(
      "could not find a dt dividing every schedule interval; use commensurate times");
}

} // namespace sqz

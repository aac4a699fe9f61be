#include "sqz/probe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

Matrix2c matmul(const Matrix2c& a, const Matrix2c& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

/// exp(-i a . sigma) in axis-angle closed form.
Matrix2c axis_angle_step(double ax, double ay, double az) {
  const double theta = std::sqrt(ax * ax + ay * ay + az * az);
  if (theta == 0.0) return {1.0, 0.0, 0.0, 1.0};
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double nx = ax / theta, ny = ay / theta, nz = az / theta;
  using C = std::complex<double>;
  // -i*s*(n . sigma) on top of c*I
  return {C{c, -s * nz}, C{-s * ny, -s * nx}, C{s * ny, -s * nx}, C{c, s * nz}};
}

/// One time step with H(t) = delta*sigma_z + omega(t)*sigma_x; `area` is the
/// integral of omega over the step, (omega_a, omega_b) its endpoint values.
/// Two-term Magnus exponent: the field ramp adds a sigma_y component
/// -(dt^2/6)*delta*(omega_b - omega_a).
Matrix2c step_propagator(double delta, double area, double omega_a, double omega_b,
                         double dt) {
  return axis_angle_step(area, -(dt * dt / 6.0) * delta * (omega_b - omega_a),
                         delta * dt);
}

std::size_t grid_index(const NoiseTrajectory& traj, double t) {
  const double x = (t - traj.t0) / traj.dt;
  const auto i = std::llround(x);
  if (std::abs(x - static_cast<double>(i)) > 1e-6 || i < 0 ||
      static_cast<std::size_t>(i) >= traj.size())
    throw ValidationError("schedule time " + std::to_string(t) +
                          " does not fall on the trajectory grid");
  return static_cast<std::size_t>(i);
}

} // namespace

PropagationMode propagation_mode_from_string(const std::string& name) {
  if (name == "exact") return PropagationMode::Exact;
  if (name == "second-order") return PropagationMode::SecondOrder;
  throw ValidationError("unknown propagation mode: " + name);
}

std::string to_string(PropagationMode mode) {
  return mode == PropagationMode::Exact ? "exact" : "second-order";
}

Matrix2c propagate_exact(const ProbeConfig& config, std::span<const double> field,
                         double dt) {
  if (field.size() < 2) throw ValidationError("propagate_exact needs >= 2 field samples");
  if (dt <= 0.0) throw ValidationError("propagate_exact needs dt > 0");
  Matrix2c u{1.0, 0.0, 0.0, 1.0};
  for (std::size_t k = 0; k + 1 < field.size(); ++k)
    u = matmul(step_propagator(config.delta, 0.5 * (field[k] + field[k + 1]) * dt,
                               field[k], field[k + 1], dt),
               u);
  return u;
}

double survival_probability(const Matrix2c& propagator) {
  return std::norm(propagator[0]);
}

double survival_factor_second_order(std::span<const double> field, double dt) {
  if (field.size() < 2)
    throw ValidationError("survival_factor_second_order needs >= 2 field samples");
  if (dt <= 0.0) throw ValidationError("survival_factor_second_order needs dt > 0");
  double area = 0.5 * (field.front() + field.back());
  for (std::size_t i = 1; i + 1 < field.size(); ++i) area += field[i];
  area *= dt;
  return 1.0 - area * area;
}

SurvivalResult run_zeno_sequence(const ProbeConfig& config,
                                 const MeasurementSchedule& schedule,
                                 const NoiseTrajectory& trajectory,
                                 const ControlPulse& control, PropagationMode mode) {
  schedule.validate();
  control.validate();
  if (trajectory.t0 > schedule.t_begin() || trajectory.t_end() < schedule.t_end() - 1e-9 * trajectory.dt)
    throw ValidationError("trajectory does not cover the sensing window");

  SurvivalResult result;
  result.mode = mode;
  result.factors.reserve(static_cast<std::size_t>(schedule.intervals()));

  const double dt = trajectory.dt;
  for (int j = 0; j < schedule.intervals(); ++j) {
    const std::size_t a = grid_index(trajectory, schedule.times[static_cast<std::size_t>(j)]);
    const std::size_t b = grid_index(trajectory, schedule.times[static_cast<std::size_t>(j) + 1]);

    double q;
    if (mode == PropagationMode::Exact) {
      // control handled by its closed-form integral per step, noise linear
      // between samples
      Matrix2c u{1.0, 0.0, 0.0, 1.0};
      for (std::size_t i = a; i < b; ++i) {
        const double ta = trajectory.t0 + dt * static_cast<double>(i);
        const double tb = ta + dt;
        const double area =
            control.integral(ta, tb) + 0.5 * (trajectory.values[i] + trajectory.values[i + 1]) * dt;
        const double fa = control.value(ta) + trajectory.values[i];
        const double fb = control.value(tb) + trajectory.values[i + 1];
        u = matmul(step_propagator(config.delta, area, fa, fb, dt), u);
      }
      q = survival_probability(u);
    } else {
      double area = control.integral(schedule.times[static_cast<std::size_t>(j)],
                                     schedule.times[static_cast<std::size_t>(j) + 1]);
      double s = 0.5 * (trajectory.values[a] + trajectory.values[b]);
      for (std::size_t i = a + 1; i < b; ++i) s += trajectory.values[i];
      area += s * dt;
      q = 1.0 - area * area;
      if (q < 0.0) result.valid = false;
    }
    result.factors.push_back(q);
    result.probability *= q;
  }
  return result;
}

ReadoutModel ReadoutModel::analog(double sigma) {
  ReadoutModel m;
  m.kind = ReadoutKind::Analog;
  m.sigma = sigma;
  m.validate();
  return m;
}

ReadoutModel ReadoutModel::binary(int n_shots) {
  ReadoutModel m;
  m.kind = ReadoutKind::Binary;
  m.n_shots = n_shots;
  m.validate();
  return m;
}

void ReadoutModel::validate() const {
  if (kind == ReadoutKind::Analog && sigma < 0.0)
    throw ValidationError("analog readout sigma must be >= 0");
  if (kind == ReadoutKind::Binary && n_shots < 1)
    throw ValidationError("binary readout needs n_shots >= 1");
}

double readout(double survival, const ReadoutModel& model, std::mt19937_64& rng) {
  model.validate();
  if (survival < 0.0 || survival > 1.0)
    throw DomainError("readout: survival probability must lie in [0, 1]");
  if (model.kind == ReadoutKind::Analog) {
    if (model.sigma == 0.0) return survival;
    std::normal_distribution<double> gauss(0.0, model.sigma);
    return std::clamp(survival + gauss(rng), 0.0, 1.0);
  }
  std::binomial_distribution<int> shots(model.n_shots, survival);
  return static_cast<double>(shots(rng)) / static_cast<double>(model.n_shots);
}

} // namespace sqz

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sqz/control.hpp"
#include "sqz/noise.hpp"
#include "sqz/schedule.hpp"

namespace sqz {

/// Two-level probe: H(t) = delta*sigma_z + (Omega_c(t) + Omega_n(t))*sigma_x,
/// initial state |0>.
struct ProbeConfig {
  double delta = 0.0; // level splitting, rad/s
};

enum class PropagationMode { Exact, SecondOrder };

PropagationMode propagation_mode_from_string(const std::string& name);
std::string to_string(PropagationMode mode);

/// 2x2 complex matrix, row-major.
using Matrix2c = std::array<std::complex<double>, 4>;

/// Per-interval survival factors q_j and the total P = prod q_j.
struct SurvivalResult {
  std::vector<double> factors;
  double probability = 1.0;
  PropagationMode mode = PropagationMode::Exact;
  bool valid = true; // false if any second-order q_j < 0
};

/// Time-ordered propagator over one interval; `field` holds n+1 samples of
/// Omega_c + Omega_n on a uniform grid of step dt, the field linear between
/// samples (two-term Magnus per step). Unitary to ~1e-15 per entry.
Matrix2c propagate_exact(const ProbeConfig& config, std::span<const double> field,
                         double dt);

double survival_probability(const Matrix2c& propagator);

/// q_j = 1 - (int (Omega_c + Omega_n) dt)^2, trapezoid on the sample grid.
/// Independent of delta by construction; may be negative for strong fields.
double survival_factor_second_order(std::span<const double> field, double dt);

SurvivalResult run_zeno_sequence(const ProbeConfig& config,
                                 const MeasurementSchedule& schedule,
                                 const NoiseTrajectory& trajectory,
                                 const ControlPulse& control, PropagationMode mode);

enum class ReadoutKind { Analog, Binary };

struct ReadoutModel {
  ReadoutKind kind = ReadoutKind::Analog;
  double sigma = 0.0; // analog: Gaussian std dev on P
  int n_shots = 1;    // binary: Bernoulli shots

  static ReadoutModel analog(double sigma);
  static ReadoutModel binary(int n_shots);
  void validate() const;
};

/// Measured value of P under the readout model; analog result clamped to [0,1].
double readout(double survival, const ReadoutModel& model, std::mt19937_64& rng);

} // namespace sqz

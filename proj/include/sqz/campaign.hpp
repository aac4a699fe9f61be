#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sqz/estimators.hpp"
#include "sqz/noise.hpp"
#include "sqz/probe.hpp"
#include "sqz/reconstruction.hpp"
#include "sqz/schedule.hpp"

namespace sqz {

inline constexpr const char* kVersion = "0.1.0";

/// Full description of a sensing campaign; every output is a pure function
/// of this struct.
struct CampaignConfig {
  SpectralDensitySpec noise = SpectralDensitySpec::ornstein_uhlenbeck(0.01, 1.0);
  double delta = 0.0;

  // schedule: uniform (n, interval) unless explicit times are given
  int n_measurements = 40;
  double interval = 0.5;
  double t_start = 0.0;
  std::vector<double> times;

  int bank_size = 8;
  double band_lo = 0.25;
  double band_hi = 3.0;
  double amplitude = 0.25;

  int repetitions = 200;
  PropagationMode mode = PropagationMode::Exact;
  ReadoutModel readout_model = ReadoutModel::analog(0.0);

  std::uint64_t master_seed = 1;
  std::string output_dir = "campaign-out";

  int oversampling = 20;        // min steps per interval and per noise timescale
  int grid_points = 2000;       // frequency grid resolution
  double weak_noise_threshold = 1e-2;
  double gramian_cutoff = 1e-10;

  void validate() const;
  MeasurementSchedule schedule() const;
  double trajectory_dt() const;
  double omega_max() const;

  static CampaignConfig from_file(const std::filesystem::path& path);
};

struct CampaignSummary {
  std::filesystem::path artifact_dir;
  std::vector<ChiEstimate> estimates;
  ReconstructionResult reconstruction;
  ErgodicityStats ergodicity;
  int weak_noise_violations = 0;
  int invalid_runs = 0;
};

/// Run the full M x K campaign and write all artifacts (manifest, per-filter
/// records, estimates, reconstruction, diagnostics). Atomic: outputs appear
/// only on success.
CampaignSummary run_campaign(const CampaignConfig& config);

/// Re-run estimation + inversion from the stored records of a finished
/// campaign; rewrites estimates, reconstruction and diagnostics in place.
CampaignSummary reconstruct_from_artifacts(const std::filesystem::path& artifact_dir);

/// Summary tables and plot-ready CSV series from a finished campaign.
void write_report(const std::filesystem::path& artifact_dir);

// --- serialization helpers (module external interfaces) ---

void write_trajectory_csv(const NoiseTrajectory& traj, const std::filesystem::path& path);
void write_filter_csv(const FilterFunction& filter, const std::filesystem::path& path);
std::string survival_result_json(const MeasurementSchedule& schedule,
                                 const SurvivalResult& result, std::uint64_t seed);
std::string spectral_spec_config(const SpectralDensitySpec& spec);

} // namespace sqz

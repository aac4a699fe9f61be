#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqz/control.hpp"
#include "sqz/noise.hpp"

namespace sqz {

/// One repetition of the Zeno sequence for filter index k.
struct CampaignRecord {
  int filter_index = 0;
  int repetition = 0;
  double survival = 0.0;         // measured P_{k,m}
  double control_survival = 0.0; // noise-free P_c,k for the same pulse/schedule
  std::uint64_t seed = 0;
  bool valid = true; // false when the simulation flagged the run

  double ratio() const { return survival / control_survival; }
};

struct ChiEstimate {
  double mean = 0.0;
  double spread = 0.0; // sample std dev (M-1); bootstrap std for the binary path
  bool spread_defined = true;
  int order = 2;
  std::string estimator; // "analog-log" or "binary-average"
  int repetitions = 0;
  int rejected = 0; // non-positive ratios / flagged records dropped
};

struct ErgodicityStats {
  double mean_pcn = 1.0;
  double var_pcn = 0.0;
  double chi_mean = 0.0;        // chi2_analog mean over the same records
  double predicted_var = 0.0;   // 4 * chi
  double predicted_offset = 0.0;// 2 * chi  (<P_cn> - 1 prediction)
  double var_rel_dev = 0.0;     // var_pcn / (4 chi) - 1
  double offset_rel_dev = 0.0;  // (mean_pcn - 1) / (2 chi) - 1
  bool ergodic_limit = false;   // distribution effectively degenerate
  std::vector<double> hist_edges;
  std::vector<std::uint64_t> hist_counts;
};

/// chi_{k,m} = (1/4) ln^2(P/P_c); mean and sample spread over repetitions.
/// Non-positive ratios are rejected and counted; > 10% rejected fails.
ChiEstimate chi2_analog(std::span<const CampaignRecord> records);

/// Binary pathway: chi = (1/2) ln(mean_m P_{k,m} / P_c); spread by
/// nonparametric bootstrap over the repetitions.
ChiEstimate chi2_binary(std::span<const double> shot_fractions, double control_survival,
                        int bootstrap_resamples = 1000, std::uint64_t bootstrap_seed = 0x5eedb001);

/// k-th order generalization, (prefactor) * ln^k(P/P_c); the paper's fixed 1/4
/// prefactor is the default and configurable.
ChiEstimate chik_analog(int order, std::span<const CampaignRecord> records,
                        double prefactor = 0.25);

/// Predicted chi = int S(w) F(w) dw by trapezoid on the filter grid; line
/// spectra contribute 2*pi*variance_i*F(omega_i) per line.
double predicted_chi2(const SpectralDensitySpec& spec, const FilterFunction& filter);

/// Moments of P_cn = P/P_c vs the first-order predictions 4*chi and 2*chi,
/// plus a fixed-width histogram of the distribution.
ErgodicityStats ergodicity_stats(std::span<const CampaignRecord> records,
                                 std::size_t histogram_bins = 40);

} // namespace sqz

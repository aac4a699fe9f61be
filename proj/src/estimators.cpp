#include "sqz/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "sqz/errors.hpp"
#include "sqz/rng.hpp"

namespace sqz {

namespace {

constexpr double kPi = std::numbers::pi;

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  if (xs.empty()) return r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return r;
}

std::vector<double> usable_log_ratios(std::span<const CampaignRecord> records,
                                      int* rejected) {
  if (records.empty()) throw ValidationError("no campaign records supplied");
  std::vector<double> logs;
  logs.reserve(records.size());
  *rejected = 0;
  for (const auto& rec : records) {
    if (!rec.valid || !(rec.control_survival > 0.0) || !(rec.ratio() > 0.0) ||
        !std::isfinite(rec.ratio())) {
      ++*rejected;
      continue;
    }
    logs.push_back(std::log(rec.ratio()));
  }
  if (static_cast<double>(*rejected) > 0.10 * static_cast<double>(records.size()))
    throw NumericalError("chi estimation failed: " + std::to_string(*rejected) + " of " +
                         std::to_string(records.size()) +
                         " records rejected (non-positive ratio or flagged run)");
  return logs;
}

} // namespace

ChiEstimate chi2_analog(std::span<const CampaignRecord> records) {
  return chik_analog(2, records);
}

ChiEstimate chik_analog(int order, std::span<const CampaignRecord> records,
                        double prefactor) {
  if (order < 2) throw ValidationError("chik_analog needs order >= 2");
  if (records.size() < 2) throw ValidationError("chi estimation needs M >= 2 records");
  int rejected = 0;
  const auto logs = usable_log_ratios(records, &rejected);
  std::vector<double> chis(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i)
    chis[i] = prefactor * std::pow(logs[i], static_cast<double>(order));
  const auto ms = mean_std(chis);

  ChiEstimate est;
  est.mean = ms.mean;
  est.spread = ms.std;
  est.spread_defined = chis.size() >= 2;
  est.order = order;
  est.estimator = "analog-log";
  est.repetitions = static_cast<int>(chis.size());
  est.rejected = rejected;
  return est;
}

ChiEstimate chi2_binary(std::span<const double> shot_fractions, double control_survival,
                        int bootstrap_resamples, std::uint64_t bootstrap_seed) {
  if (shot_fractions.empty()) throw ValidationError("chi2_binary needs >= 1 fraction");
  if (!(control_survival > 0.0))
    throw ValidationError("chi2_binary needs control survival P_c > 0");
  for (double f : shot_fractions)
    if (f < 0.0 || f > 1.0)
      throw ValidationError("shot fractions must lie in [0, 1]");

  const auto chi_of_mean = [control_survival](std::span<const double> fr) {
    const double mean =
        std::accumulate(fr.begin(), fr.end(), 0.0) / static_cast<double>(fr.size());
    const double x = std::log(mean / control_survival);
    if (!std::isfinite(x))
      throw NumericalError("chi2_binary: log of the mean ratio is not finite");
    return 0.5 * x;
  };

  ChiEstimate est;
  est.mean = chi_of_mean(shot_fractions);
  est.order = 2;
  est.estimator = "binary-average";
  est.repetitions = static_cast<int>(shot_fractions.size());
  est.spread_defined = shot_fractions.size() >= 2;
  if (!est.spread_defined) return est;

  auto rng = make_rng(bootstrap_seed);
  std::uniform_int_distribution<std::size_t> pick(0, shot_fractions.size() - 1);
  std::vector<double> resample(shot_fractions.size());
  std::vector<double> boot;
  boot.reserve(static_cast<std::size_t>(bootstrap_resamples));
  for (int b = 0; b < bootstrap_resamples; ++b) {
    for (auto& x : resample) x = shot_fractions[pick(rng)];
    const double mean =
        std::accumulate(resample.begin(), resample.end(), 0.0) /
        static_cast<double>(resample.size());
    if (mean > 0.0) boot.push_back(0.5 * std::log(mean / control_survival));
  }
  est.spread = mean_std(boot).std;
  return est;
}

double predicted_chi2(const SpectralDensitySpec& spec, const FilterFunction& filter) {
  spec.validate();
  if (filter.omega.size() < 2) throw ValidationError("filter grid too small");

  if (spec.is_line_spectrum()) {
    // delta comb: S carries weight 2*pi*variance at each line
    double chi = 0.0;
    for (const auto& l : spec.lines) chi += 2.0 * kPi * l.variance * filter.interpolate(l.omega);
    return chi;
  }

  std::vector<double> integrand(filter.omega.size());
  for (std::size_t i = 0; i < integrand.size(); ++i)
    integrand[i] = psd_eval(spec, filter.omega[i]) * filter.values[i];

  // coarseness check near the peak of the integrand
  const auto peak = std::max_element(integrand.begin(), integrand.end());
  const double peak_val = *peak;
  if (peak_val > 0.0) {
    const auto i = static_cast<std::size_t>(std::distance(integrand.begin(), peak));
    for (std::size_t j = (i > 0 ? i - 1 : 0); j <= std::min(i + 1, integrand.size() - 2); ++j) {
      const double rel = std::abs(integrand[j + 1] - integrand[j]) / peak_val;
      if (rel > 0.20)
        throw ValidationError("filter grid too coarse near the integrand peak for predicted_chi2");
    }
  }

  double chi = 0.0, tail = 0.0;
  const double w_tail = filter.omega.back() / 10.0; // last decade of the grid
  for (std::size_t i = 1; i < integrand.size(); ++i) {
    const double piece =
        0.5 * (integrand[i] + integrand[i - 1]) * (filter.omega[i] - filter.omega[i - 1]);
    chi += piece;
    if (filter.omega[i - 1] >= filter.omega.back() - w_tail) tail += piece;
  }
  if (chi > 0.0 && tail > 1e-3 * chi)
    std::fprintf(stderr,
                 "[sqz] warning: predicted_chi2 grid tail contributes %.2g%% of the "
                 "integral; extend the frequency grid\n",
                 100.0 * tail / chi);
  return chi;
}

ErgodicityStats ergodicity_stats(std::span<const CampaignRecord> records,
                                 std::size_t histogram_bins) {
  if (records.size() < 10)
    throw ValidationError("ergodicity_stats needs M >= 10 records for meaningful moments");

  std::vector<double> pcn;
  pcn.reserve(records.size());
  for (const auto& rec : records)
    if (rec.valid && rec.control_survival > 0.0) pcn.push_back(rec.ratio());
  if (pcn.size() < 10) throw ValidationError("too few valid records for ergodicity stats");

  const auto ms = mean_std(pcn);
  const auto chi = chi2_analog(records);

  ErgodicityStats stats;
  stats.mean_pcn = ms.mean;
  stats.var_pcn = ms.std * ms.std * static_cast<double>(pcn.size() - 1) /
                  static_cast<double>(pcn.size()); // population variance
  stats.chi_mean = chi.mean;
  stats.predicted_var = 4.0 * chi.mean;
  stats.predicted_offset = 2.0 * chi.mean;
  if (chi.mean > 0.0) {
    stats.var_rel_dev = stats.var_pcn / stats.predicted_var - 1.0;
    stats.offset_rel_dev = (stats.mean_pcn - 1.0) / stats.predicted_offset - 1.0;
  }
  // degenerate distribution: spread negligible against the offset from 1
  stats.ergodic_limit =
      std::sqrt(stats.var_pcn) <= 0.1 * std::max(std::abs(stats.mean_pcn - 1.0), 1e-12);

  const auto [lo_it, hi_it] = std::minmax_element(pcn.begin(), pcn.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi <= lo) hi = lo + 1e-12;
  stats.hist_edges.resize(histogram_bins + 1);
  stats.hist_counts.assign(histogram_bins, 0);
  for (std::size_t i = 0; i <= histogram_bins; ++i)
    stats.hist_edges[i] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(histogram_bins);
  for (double v : pcn) {
    auto bin = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(histogram_bins));
    stats.hist_counts[std::min(bin, histogram_bins - 1)] += 1;
  }
  return stats;
}

} // namespace sqz

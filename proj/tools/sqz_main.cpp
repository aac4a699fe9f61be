#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "sqz/campaign.hpp"
#include "sqz/errors.hpp"

namespace {

// exit codes: 0 success, 2 validation error, 3 numerical failure
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::uint64_t seed = 0;
  std::string output;
  int repetitions = 0;
  int filters = 0;
  double band_lo = 0, band_hi = 0, amplitude = 0, interval = 0, delta = 0;
  int measurements = 0;
  std::string mode;
};

void add_override_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--output,-o", o.output, "artifact output directory");
  cmd->add_option("--repetitions,-M", o.repetitions, "repetitions per filter");
  cmd->add_option("--filters,-K", o.filters, "filter bank size");
  cmd->add_option("--band-lo", o.band_lo, "filter band lower edge [rad/s]");
  cmd->add_option("--band-hi", o.band_hi, "filter band upper edge [rad/s]");
  cmd->add_option("--amplitude", o.amplitude, "control pulse amplitude [rad/s]");
  cmd->add_option("--measurements,-N", o.measurements, "number of Zeno measurements");
  cmd->add_option("--interval", o.interval, "measurement interval [s]");
  cmd->add_option("--delta", o.delta, "probe level splitting [rad/s]");
  cmd->add_option("--mode", o.mode, "propagation mode: exact | second-order");
}

void apply_overrides(const CLI::App* cmd, const Overrides& o, sqz::CampaignConfig& c) {
  if (cmd->count("--seed")) c.master_seed = o.seed;
  if (cmd->count("--output")) c.output_dir = o.output;
  if (cmd->count("--repetitions")) c.repetitions = o.repetitions;
  if (cmd->count("--filters")) c.bank_size = o.filters;
  if (cmd->count("--band-lo")) c.band_lo = o.band_lo;
  if (cmd->count("--band-hi")) c.band_hi = o.band_hi;
  if (cmd->count("--amplitude")) c.amplitude = o.amplitude;
  if (cmd->count("--measurements")) c.n_measurements = o.measurements;
  if (cmd->count("--interval")) c.interval = o.interval;
  if (cmd->count("--delta")) c.delta = o.delta;
  if (cmd->count("--mode")) c.mode = sqz::propagation_mode_from_string(o.mode);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-Zeno noise sensing toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string artifact_dir;
  Overrides overrides;

  auto* simulate = app.add_subcommand("simulate", "run a full sensing campaign");
  simulate->add_option("--config,-c", config_path, "campaign config file");
  add_override_options(simulate, overrides);

  auto* reconstruct =
      app.add_subcommand("reconstruct", "re-run the inversion from stored records");
  reconstruct->add_option("artifact_dir", artifact_dir, "campaign artifact directory")
      ->required();

  auto* report = app.add_subcommand("report", "summary tables and plot data");
  report->add_option("artifact_dir", artifact_dir, "campaign artifact directory")
      ->required();

  auto* validate = app.add_subcommand("validate-config", "check a config file");
  validate->add_option("--config,-c", config_path, "campaign config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      sqz::CampaignConfig config;
      if (!config_path.empty()) config = sqz::CampaignConfig::from_file(config_path);
      apply_overrides(simulate, overrides, config);
      const auto summary = sqz::run_campaign(config);
      std::printf("campaign written to %s\n", summary.artifact_dir.c_str());
      if (summary.reconstruction.relative_l2_error >= 0.0)
        std::printf("relative L2 error (filter band): %.6g\n",
                    summary.reconstruction.relative_l2_error);
      sqz::write_report(summary.artifact_dir);
    } else if (reconstruct->parsed()) {
      const auto summary = sqz::reconstruct_from_artifacts(artifact_dir);
      std::printf("inversion refreshed in %s\n", summary.artifact_dir.c_str());
    } else if (report->parsed()) {
      sqz::write_report(artifact_dir);
      std::printf("report written to %s\n",
                  (std::filesystem::path(artifact_dir) / "summary.txt").c_str());
    } else if (validate->parsed()) {
      sqz::CampaignConfig::from_file(config_path);
      std::printf("config OK\n");
    }
  } catch (const sqz::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const sqz::DomainError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const sqz::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

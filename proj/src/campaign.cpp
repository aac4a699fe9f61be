#include "sqz/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sqz/errors.hpp"
#include "sqz/rng.hpp"

namespace sqz {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.good()) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// "omega:value;omega:value" pairs
std::vector<std::pair<double, double>> parse_pair_list(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ValidationError("expected 'omega:value' pair, got '" + item + "'");
    out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("SQZ_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

json spec_to_json(const SpectralDensitySpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      j["variance"] = spec.variance;
      j["correlation_time"] = spec.correlation_time;
      break;
    case NoiseKind::RandomPhaseHarmonics: {
      json lines = json::array();
      for (const auto& l : spec.lines) lines.push_back({{"omega", l.omega}, {"variance", l.variance}});
      j["lines"] = lines;
      break;
    }
    case NoiseKind::FlatBand:
      j["level"] = spec.band_level;
      j["band_lo"] = spec.band_lo;
      j["band_hi"] = spec.band_hi;
      break;
    case NoiseKind::Tabulated: {
      json table = json::array();
      for (const auto& [w, s] : spec.table) table.push_back({w, s});
      j["table"] = table;
      break;
    }
  }
  return j;
}

SpectralDensitySpec spec_from_json(const json& j) {
  SpectralDensitySpec spec;
  spec.kind = noise_kind_from_string(j.at("kind").get<std::string>());
  switch (spec.kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      spec.variance = j.at("variance").get<double>();
      spec.correlation_time = j.at("correlation_time").get<double>();
      break;
    case NoiseKind::RandomPhaseHarmonics:
      for (const auto& l : j.at("lines"))
        spec.lines.push_back({l.at("omega").get<double>(), l.at("variance").get<double>()});
      break;
    case NoiseKind::FlatBand:
      spec.band_level = j.at("level").get<double>();
      spec.band_lo = j.at("band_lo").get<double>();
      spec.band_hi = j.at("band_hi").get<double>();
      break;
    case NoiseKind::Tabulated:
      for (const auto& row : j.at("table"))
        spec.table.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
      break;
  }
  spec.validate();
  return spec;
}

json config_to_json(const CampaignConfig& c) {
  json j;
  j["noise"] = spec_to_json(c.noise);
  j["probe"] = {{"delta", c.delta}};
  json sched = {{"n", c.n_measurements}, {"interval", c.interval}, {"t_start", c.t_start}};
  if (!c.times.empty()) sched["times"] = c.times;
  j["schedule"] = sched;
  j["bank"] = {{"count", c.bank_size},
               {"band_lo", c.band_lo},
               {"band_hi", c.band_hi},
               {"amplitude", c.amplitude}};
  j["campaign"] = {{"repetitions", c.repetitions},
                   {"mode", to_string(c.mode)},
                   {"seed", c.master_seed},
                   {"oversampling", c.oversampling},
                   {"grid_points", c.grid_points},
                   {"weak_noise_threshold", c.weak_noise_threshold},
                   {"gramian_cutoff", c.gramian_cutoff}};
  json readout = {{"kind", c.readout_model.kind == ReadoutKind::Analog ? "analog" : "binary"}};
  if (c.readout_model.kind == ReadoutKind::Analog)
    readout["sigma"] = c.readout_model.sigma;
  else
    readout["shots"] = c.readout_model.n_shots;
  j["readout"] = readout;
  return j;
}

CampaignConfig config_from_json(const json& j) {
  CampaignConfig c;
  c.noise = spec_from_json(j.at("noise"));
  c.delta = j.at("probe").at("delta").get<double>();
  const auto& sched = j.at("schedule");
  c.n_measurements = sched.at("n").get<int>();
  c.interval = sched.at("interval").get<double>();
  c.t_start = sched.at("t_start").get<double>();
  if (sched.contains("times")) c.times = sched.at("times").get<std::vector<double>>();
  const auto& bank = j.at("bank");
  c.bank_size = bank.at("count").get<int>();
  c.band_lo = bank.at("band_lo").get<double>();
  c.band_hi = bank.at("band_hi").get<double>();
  c.amplitude = bank.at("amplitude").get<double>();
  const auto& camp = j.at("campaign");
  c.repetitions = camp.at("repetitions").get<int>();
  c.mode = propagation_mode_from_string(camp.at("mode").get<std::string>());
  c.master_seed = camp.at("seed").get<std::uint64_t>();
  c.oversampling = camp.at("oversampling").get<int>();
  c.grid_points = camp.at("grid_points").get<int>();
  c.weak_noise_threshold = camp.at("weak_noise_threshold").get<double>();
  c.gramian_cutoff = camp.at("gramian_cutoff").get<double>();
  const auto& readout = j.at("readout");
  if (readout.at("kind").get<std::string>() == "analog")
    c.readout_model = ReadoutModel::analog(readout.at("sigma").get<double>());
  else
    c.readout_model = ReadoutModel::binary(readout.at("shots").get<int>());
  return c;
}

struct RunResult {
  double survival = 0.0;
  double control_survival = 0.0;
  bool valid = true;
  bool weak_noise_ok = true;
};

double noise_only_decay(const MeasurementSchedule& schedule, const NoiseTrajectory& traj) {
  // sum_j (int Omega_n dt)^2 over the intervals, trapezoid on the grid
  double total = 0.0;
  for (int j = 0; j < schedule.intervals(); ++j) {
    const auto a = static_cast<std::size_t>(
        std::llround((schedule.times[static_cast<std::size_t>(j)] - traj.t0) / traj.dt));
    const auto b = static_cast<std::size_t>(
        std::llround((schedule.times[static_cast<std::size_t>(j) + 1] - traj.t0) / traj.dt));
    double area = 0.5 * (traj.values[a] + traj.values[b]);
    for (std::size_t i = a + 1; i < b; ++i) area += traj.values[i];
    area *= traj.dt;
    total += area * area;
  }
  return total;
}

} // namespace

void CampaignConfig::validate() const {
  noise.validate();
  readout_model.validate();
  schedule().validate();
  if (bank_size < 1) throw ValidationError("bank.count must be >= 1");
  if (!(band_lo >= 0.0 && band_hi > band_lo))
    throw ValidationError("bank band must satisfy 0 <= band_lo < band_hi");
  if (repetitions < 1) throw ValidationError("campaign.repetitions must be >= 1");
  if (oversampling < 2) throw ValidationError("campaign.oversampling must be >= 2");
  if (grid_points < 16) throw ValidationError("campaign.grid_points must be >= 16");
  if (weak_noise_threshold <= 0.0)
    throw ValidationError("campaign.weak_noise_threshold must be > 0");
  if (!(gramian_cutoff > 0.0 && gramian_cutoff < 1.0))
    throw ValidationError("campaign.gramian_cutoff must lie in (0, 1)");
  if (!std::isfinite(delta)) throw ValidationError("probe.delta must be finite");
  trajectory_dt(); // throws when no commensurate dt exists
}

MeasurementSchedule CampaignConfig::schedule() const {
  if (!times.empty()) return MeasurementSchedule::from_times(times);
  return MeasurementSchedule::uniform(t_start, interval, n_measurements);
}

double CampaignConfig::trajectory_dt() const {
  const double noise_dt = noise.min_timescale() / static_cast<double>(oversampling);
  return schedule().compatible_dt(oversampling, noise_dt);
}

double CampaignConfig::omega_max() const {
  return std::max(noise.suggested_omega_max(), 10.0 * band_hi);
}

CampaignConfig CampaignConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line without '=': " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  CampaignConfig c;
  const auto take = [&kv](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const auto num = [&take](const char* key, double& target) {
    if (auto v = take(key)) target = std::stod(*v);
  };
  const auto integer = [&take](const char* key, int& target) {
    if (auto v = take(key)) target = std::stoi(*v);
  };

  SpectralDensitySpec spec;
  if (auto v = take("noise.kind")) spec.kind = noise_kind_from_string(*v);
  num("noise.variance", spec.variance);
  num("noise.correlation_time", spec.correlation_time);
  if (auto v = take("noise.switching_rate")) {
    const double rate = std::stod(*v);
    if (rate <= 0.0) throw ValidationError("noise.switching_rate must be > 0");
    spec.correlation_time = 1.0 / (2.0 * rate);
  }
  if (auto v = take("noise.lines"))
    for (const auto& [w, var] : parse_pair_list(*v)) spec.lines.push_back({w, var});
  num("noise.band_lo", spec.band_lo);
  num("noise.band_hi", spec.band_hi);
  num("noise.level", spec.band_level);
  if (auto v = take("noise.table")) spec.table = parse_pair_list(*v);
  c.noise = spec;

  num("probe.delta", c.delta);
  integer("schedule.n", c.n_measurements);
  num("schedule.interval", c.interval);
  num("schedule.t_start", c.t_start);
  if (auto v = take("schedule.times")) c.times = parse_double_list(*v);
  integer("bank.count", c.bank_size);
  num("bank.band_lo", c.band_lo);
  num("bank.band_hi", c.band_hi);
  num("bank.amplitude", c.amplitude);
  integer("campaign.repetitions", c.repetitions);
  if (auto v = take("campaign.mode")) c.mode = propagation_mode_from_string(*v);
  if (auto v = take("campaign.seed")) c.master_seed = std::stoull(*v);
  integer("campaign.oversampling", c.oversampling);
  integer("campaign.grid_points", c.grid_points);
  num("campaign.weak_noise_threshold", c.weak_noise_threshold);
  num("campaign.gramian_cutoff", c.gramian_cutoff);
  if (auto v = take("campaign.output")) c.output_dir = *v;

  std::string readout_kind = "analog";
  if (auto v = take("readout.kind")) readout_kind = *v;
  if (readout_kind == "analog") {
    double sigma = 0.0;
    num("readout.sigma", sigma);
    c.readout_model = ReadoutModel::analog(sigma);
  } else if (readout_kind == "binary") {
    int shots = 1000;
    integer("readout.shots", shots);
    c.readout_model = ReadoutModel::binary(shots);
  } else {
    throw ValidationError("readout.kind must be 'analog' or 'binary'");
  }

  if (!kv.empty()) throw ValidationError("unknown config key: " + kv.begin()->first);
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " (config file " + path.string() + ")");
  }
  return c;
}

namespace {

struct CampaignData {
  MeasurementSchedule schedule;
  double dt = 0.0;
  FilterBank bank;
  std::vector<double> control_survival; // P_c per filter
  std::vector<CampaignRecord> records;  // ordered (k, m)
  std::vector<double> fractions_flat;   // measured values per record (binary path)
  int weak_noise_violations = 0;
  int invalid_runs = 0;
};

CampaignData simulate_campaign(const CampaignConfig& config) {
  CampaignData data;
  data.schedule = config.schedule();
  data.dt = config.trajectory_dt();
  data.bank =
      design_filter_bank(config.band_lo, config.band_hi, config.bank_size, data.schedule,
                         config.amplitude,
                         uniform_grid(config.omega_max(), static_cast<std::size_t>(config.grid_points)));

  const ProbeConfig probe{config.delta};
  const NoiseTrajectory silence = [&] {
    NoiseTrajectory t;
    t.t0 = data.schedule.t_begin();
    t.dt = data.dt;
    t.values.assign(
        static_cast<std::size_t>(std::llround((data.schedule.t_end() - t.t0) / t.dt)) + 1, 0.0);
    return t;
  }();

  for (const auto& pulse : data.bank.pulses) {
    const auto ref = run_zeno_sequence(probe, data.schedule, silence, pulse,
                                       config.mode);
    data.control_survival.push_back(ref.probability);
  }

  const int k_count = config.bank_size;
  const int m_count = config.repetitions;
  const std::size_t total = static_cast<std::size_t>(k_count) * static_cast<std::size_t>(m_count);
  data.records.resize(total);
  std::vector<std::uint8_t> weak_flags(total, 0);

  std::atomic<std::size_t> cursor{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= total) return;
      const int k = static_cast<int>(idx) / m_count;
      const int m = static_cast<int>(idx) % m_count;
      const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(k),
                                             static_cast<std::uint64_t>(m));
      const auto traj = sample_trajectory(config.noise, data.schedule.t_begin(),
                                          data.schedule.t_end(), data.dt, seed);
      const auto run = run_zeno_sequence(probe, data.schedule, traj,
                                         data.bank.pulses[static_cast<std::size_t>(k)],
                                         config.mode);
      auto readout_rng = make_rng(seed ^ 0xdeadf00dULL);
      const double survival_clamped = std::clamp(run.probability, 0.0, 1.0);
      const double measured = readout(survival_clamped, config.readout_model, readout_rng);

      CampaignRecord rec;
      rec.filter_index = k;
      rec.repetition = m;
      rec.survival = measured;
      rec.control_survival = data.control_survival[static_cast<std::size_t>(k)];
      rec.seed = seed;
      rec.valid = run.valid;
      data.records[idx] = rec;
      if (noise_only_decay(data.schedule, traj) > config.weak_noise_threshold)
        weak_flags[idx] = 1;
    }
  };

  const int n_workers = std::min<int>(worker_count(), static_cast<int>(total));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < total; ++i) {
    data.weak_noise_violations += weak_flags[i];
    data.invalid_runs += data.records[i].valid ? 0 : 1;
  }
  return data;
}

std::vector<ChiEstimate> estimate_all(const CampaignConfig& config, const CampaignData& data) {
  std::vector<ChiEstimate> estimates;
  const auto m_count = static_cast<std::size_t>(config.repetitions);
  for (int k = 0; k < config.bank_size; ++k) {
    const std::span<const CampaignRecord> slice(
        data.records.data() + static_cast<std::size_t>(k) * m_count, m_count);
    if (config.readout_model.kind == ReadoutKind::Analog) {
      estimates.push_back(chi2_analog(slice));
    } else {
      std::vector<double> fractions;
      fractions.reserve(m_count);
      for (const auto& rec : slice)
        if (rec.valid) fractions.push_back(rec.survival);
      estimates.push_back(
          chi2_binary(fractions, data.control_survival[static_cast<std::size_t>(k)], 1000,
                      derive_seed(config.master_seed, 0xb007u, static_cast<std::uint64_t>(k))));
    }
  }
  return estimates;
}

struct InversionOutput {
  Gramian gram;
  std::vector<FilterFunction> transformed;
  ReconstructionResult result;
};

InversionOutput invert(const CampaignConfig& config, const FilterBank& bank,
                       std::span<const ChiEstimate> estimates) {
  InversionOutput out;
  out.gram = gramian(bank.filters, config.gramian_cutoff);
  out.transformed = transformed_filters(out.gram, bank.filters);

  std::vector<double> reference;
  if (!config.noise.is_line_spectrum()) {
    reference.resize(bank.grid.size());
    for (std::size_t i = 0; i < bank.grid.size(); ++i)
      reference[i] = psd_eval(config.noise, bank.grid[i]);
  }
  out.result = reconstruct(estimates, out.transformed, out.gram, reference,
                           bank.design_frequencies.front(), bank.design_frequencies.back());
  return out;
}

std::string records_csv(std::span<const CampaignRecord> records) {
  std::string out = "k,m,P,Pc,ratio,seed,valid\n";
  for (const auto& r : records) {
    out += std::to_string(r.filter_index) + "," + std::to_string(r.repetition) + "," +
           fmt17(r.survival) + "," + fmt17(r.control_survival) + "," + fmt17(r.ratio()) +
           "," + std::to_string(r.seed) + "," + (r.valid ? "1" : "0") + "\n";
  }
  return out;
}

json estimates_json(std::span<const ChiEstimate> estimates) {
  json arr = json::array();
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto& e = estimates[k];
    arr.push_back({{"k", k},
                   {"chi_mean", e.mean},
                   {"chi_std", e.spread},
                   {"spread_defined", e.spread_defined},
                   {"estimator", e.estimator},
                   {"M", e.repetitions},
                   {"rejected", e.rejected}});
  }
  return arr;
}

std::string reconstruction_csv(const CampaignConfig& config, const ReconstructionResult& r) {
  const bool have_ref = !config.noise.is_line_spectrum();
  std::string out = have_ref ? "omega,S_rec,dS_rec,S_orig\n" : "omega,S_rec,dS_rec\n";
  for (std::size_t i = 0; i < r.omega.size(); ++i) {
    out += fmt17(r.omega[i]) + "," + fmt17(r.spectrum[i]) + "," + fmt17(r.error[i]);
    if (have_ref) out += "," + fmt17(psd_eval(config.noise, r.omega[i]));
    out += "\n";
  }
  return out;
}

json diagnostics_json(const CampaignConfig& config, const CampaignData& data,
                      const InversionOutput& inv, const ErgodicityStats& erg,
                      bool have_ergodicity) {
  json j;
  j["eigenvalues"] = inv.gram.eigenvalues;
  j["condition_number"] = inv.result.condition_number;
  j["retained_eigenvalues"] = inv.result.retained_eigenvalues;
  j["truncated_eigenvalues"] = inv.result.truncated_eigenvalues;
  j["relative_l2_error"] = inv.result.relative_l2_error;
  j["design_frequencies"] = data.bank.design_frequencies;
  j["trajectory_dt"] = data.dt;
  j["omega_max"] = config.omega_max();
  j["weak_noise_violations"] = data.weak_noise_violations;
  j["invalid_runs"] = data.invalid_runs;
  j["control_survival"] = data.control_survival;
  if (have_ergodicity) {
    j["ergodicity"] = {{"mean_pcn", erg.mean_pcn},
                       {"var_pcn", erg.var_pcn},
                       {"chi_mean", erg.chi_mean},
                       {"var_rel_dev", erg.var_rel_dev},
                       {"offset_rel_dev", erg.offset_rel_dev},
                       {"ergodic_limit", erg.ergodic_limit},
                       {"hist_edges", erg.hist_edges},
                       {"hist_counts", erg.hist_counts}};
  }
  return j;
}

void write_artifacts(const fs::path& dir, const CampaignConfig& config,
                     const CampaignData& data, std::span<const ChiEstimate> estimates,
                     const InversionOutput& inv, const ErgodicityStats& erg,
                     bool have_ergodicity) {
  json manifest;
  manifest["tool"] = "sqz";
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(config);
  json bank_manifest = json::array();
  for (std::size_t k = 0; k < data.bank.pulses.size(); ++k) {
    const auto& p = data.bank.pulses[k];
    const std::string file = "filter_" + std::to_string(k) + ".csv";
    bank_manifest.push_back({{"k", k},
                             {"kind", "cosine"},
                             {"amplitude", p.amplitude},
                             {"frequency", p.frequency},
                             {"phase", p.phase},
                             {"file", file}});
    write_filter_csv(data.bank.filters[k], dir / file);
  }
  manifest["filters"] = bank_manifest;

  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  write_file_atomic(dir / "records.csv", records_csv(data.records));
  write_file_atomic(dir / "estimates.json", estimates_json(estimates).dump(2) + "\n");
  write_file_atomic(dir / "reconstruction.csv", reconstruction_csv(config, inv.result));
  write_file_atomic(dir / "diagnostics.json",
                    diagnostics_json(config, data, inv, erg, have_ergodicity).dump(2) + "\n");
}

CampaignSummary summarize(const fs::path& dir, const CampaignData& data,
                          std::vector<ChiEstimate> estimates, InversionOutput inv,
                          ErgodicityStats erg) {
  CampaignSummary s;
  s.artifact_dir = dir;
  s.estimates = std::move(estimates);
  s.reconstruction = std::move(inv.result);
  s.ergodicity = std::move(erg);
  s.weak_noise_violations = data.weak_noise_violations;
  s.invalid_runs = data.invalid_runs;
  return s;
}

} // namespace

CampaignSummary run_campaign(const CampaignConfig& config) {
  config.validate();
  const fs::path out_dir(config.output_dir);
  const fs::path staging = out_dir.string() + ".partial";
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging);

  try {
    const CampaignData data = simulate_campaign(config);
    const auto estimates = estimate_all(config, data);
    const auto inv = invert(config, data.bank, estimates);

    ErgodicityStats erg;
    bool have_erg = false;
    if (config.repetitions >= 10) {
      const std::span<const CampaignRecord> first_filter(
          data.records.data(), static_cast<std::size_t>(config.repetitions));
      erg = ergodicity_stats(first_filter);
      have_erg = true;
    }

    write_artifacts(staging, config, data, estimates, inv, erg, have_erg);
    fs::remove_all(out_dir, ec);
    fs::rename(staging, out_dir);
    return summarize(out_dir, data, estimates, inv, erg);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

CampaignSummary reconstruct_from_artifacts(const fs::path& artifact_dir) {
  const fs::path manifest_path = artifact_dir / "manifest.json";
  std::ifstream manifest_in(manifest_path);
  if (!manifest_in)
    throw ValidationError("missing manifest: " + manifest_path.string());
  json manifest;
  try {
    manifest_in >> manifest;
  } catch (const json::exception& e) {
    throw ValidationError("corrupt manifest " + manifest_path.string() + ": " + e.what());
  }
  const CampaignConfig config = config_from_json(manifest.at("config"));

  // reload records
  std::ifstream rec_in(artifact_dir / "records.csv");
  if (!rec_in) throw ValidationError("missing records.csv in " + artifact_dir.string());
  CampaignData data;
  data.schedule = config.schedule();
  data.dt = config.trajectory_dt();
  data.bank = design_filter_bank(
      config.band_lo, config.band_hi, config.bank_size, data.schedule, config.amplitude,
      uniform_grid(config.omega_max(), static_cast<std::size_t>(config.grid_points)));
  std::string line;
  std::getline(rec_in, line); // header
  while (std::getline(rec_in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw ValidationError("malformed records.csv row: " + line);
    CampaignRecord rec;
    rec.filter_index = std::stoi(cells[0]);
    rec.repetition = std::stoi(cells[1]);
    rec.survival = std::stod(cells[2]);
    rec.control_survival = std::stod(cells[3]);
    rec.seed = std::stoull(cells[5]);
    rec.valid = cells[6] == "1";
    data.records.push_back(rec);
    data.invalid_runs += rec.valid ? 0 : 1;
  }
  if (data.records.size() !=
      static_cast<std::size_t>(config.bank_size) * static_cast<std::size_t>(config.repetitions))
    throw ValidationError("records.csv does not match the manifest campaign shape");
  for (int k = 0; k < config.bank_size; ++k)
    data.control_survival.push_back(
        data.records[static_cast<std::size_t>(k) * static_cast<std::size_t>(config.repetitions)]
            .control_survival);

  const auto estimates = estimate_all(config, data);
  const auto inv = invert(config, data.bank, estimates);
  ErgodicityStats erg;
  bool have_erg = false;
  if (config.repetitions >= 10) {
    erg = ergodicity_stats(std::span<const CampaignRecord>(
        data.records.data(), static_cast<std::size_t>(config.repetitions)));
    have_erg = true;
  }

  write_file_atomic(artifact_dir / "estimates.json", estimates_json(estimates).dump(2) + "\n");
  write_file_atomic(artifact_dir / "reconstruction.csv", reconstruction_csv(config, inv.result));
  write_file_atomic(artifact_dir / "diagnostics.json",
                    diagnostics_json(config, data, inv, erg, have_erg).dump(2) + "\n");
  return summarize(artifact_dir, data, estimates, inv, erg);
}

void write_report(const fs::path& artifact_dir) {
  std::ifstream manifest_in(artifact_dir / "manifest.json");
  if (!manifest_in)
    throw ValidationError("missing manifest in " + artifact_dir.string());
  json manifest, estimates, diagnostics;
  try {
    manifest_in >> manifest;
    std::ifstream est_in(artifact_dir / "estimates.json");
    if (!est_in) throw ValidationError("missing estimates.json");
    est_in >> estimates;
    std::ifstream diag_in(artifact_dir / "diagnostics.json");
    if (!diag_in) throw ValidationError("missing diagnostics.json");
    diag_in >> diagnostics;
  } catch (const json::exception& e) {
    throw ValidationError("corrupt campaign artifacts in " + artifact_dir.string() + ": " +
                          e.what());
  }

  std::ostringstream out;
  out << "campaign report (" << manifest.at("tool").get<std::string>() << " "
      << manifest.at("version").get<std::string>() << ")\n\n";
  out << "  k   omega_k [rad/s]      chi_mean          chi_std\n";
  const auto freqs = diagnostics.at("design_frequencies").get<std::vector<double>>();
  for (const auto& e : estimates) {
    const auto k = e.at("k").get<std::size_t>();
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-3zu %-16.6g %16.8g %16.8g\n", k, freqs.at(k),
                  e.at("chi_mean").get<double>(), e.at("chi_std").get<double>());
    out << buf;
  }
  out << "\ncondition number: " << diagnostics.at("condition_number").get<double>() << "\n";
  out << "retained/truncated eigenvalues: "
      << diagnostics.at("retained_eigenvalues").get<int>() << "/"
      << diagnostics.at("truncated_eigenvalues").get<int>() << "\n";
  const double l2 = diagnostics.at("relative_l2_error").get<double>();
  if (l2 >= 0.0) out << "relative L2 error (filter band): " << l2 << "\n";
  out << "weak-noise violations: " << diagnostics.at("weak_noise_violations").get<int>()
      << "\n";
  out << "invalid runs: " << diagnostics.at("invalid_runs").get<int>() << "\n";
  if (diagnostics.contains("ergodicity")) {
    const auto& erg = diagnostics.at("ergodicity");
    out << "ergodic-limit: " << (erg.at("ergodic_limit").get<bool>() ? "true" : "false")
        << " (mean P_cn = " << erg.at("mean_pcn").get<double>()
        << ", var = " << erg.at("var_pcn").get<double>() << ")\n";

    std::string hist = "pcn_lo,pcn_hi,count\n";
    const auto edges = erg.at("hist_edges").get<std::vector<double>>();
    const auto counts = erg.at("hist_counts").get<std::vector<std::uint64_t>>();
    for (std::size_t i = 0; i < counts.size(); ++i)
      hist += fmt17(edges[i]) + "," + fmt17(edges[i + 1]) + "," + std::to_string(counts[i]) +
              "\n";
    write_file_atomic(artifact_dir / "pcn_histogram.csv", hist);
  }
  write_file_atomic(artifact_dir / "summary.txt", out.str());
}

void write_trajectory_csv(const NoiseTrajectory& traj, const fs::path& path) {
  std::string out = "t,omega_n\n";
  for (std::size_t i = 0; i < traj.values.size(); ++i)
    out += fmt17(traj.t0 + traj.dt * static_cast<double>(i)) + "," + fmt17(traj.values[i]) +
           "\n";
  write_file_atomic(path, out);
}

void write_filter_csv(const FilterFunction& filter, const fs::path& path) {
  std::string out = "omega,F\n";
  for (std::size_t i = 0; i < filter.omega.size(); ++i)
    out += fmt17(filter.omega[i]) + "," + fmt17(filter.values[i]) + "\n";
  write_file_atomic(path, out);
}

std::string survival_result_json(const MeasurementSchedule& schedule,
                                 const SurvivalResult& result, std::uint64_t seed) {
  json j;
  j["schedule"] = schedule.times;
  j["mode"] = to_string(result.mode);
  j["q"] = result.factors;
  j["P"] = result.probability;
  j["valid"] = result.valid;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

std::string spectral_spec_config(const SpectralDensitySpec& spec) {
  std::ostringstream out;
  out << "noise.kind = " << to_string(spec.kind) << "\n";
  switch (spec.kind) {
    case NoiseKind::OrnsteinUhlenbeck:
    case NoiseKind::RandomTelegraph:
      out << "noise.variance = " << fmt17(spec.variance) << "\n";
      out << "noise.correlation_time = " << fmt17(spec.correlation_time) << "\n";
      break;
    case NoiseKind::RandomPhaseHarmonics: {
      out << "noise.lines = ";
      for (std::size_t i = 0; i < spec.lines.size(); ++i)
        out << (i ? ";" : "") << fmt17(spec.lines[i].omega) << ":"
            << fmt17(spec.lines[i].variance);
      out << "\n";
      break;
    }
    case NoiseKind::FlatBand:
      out << "noise.level = " << fmt17(spec.band_level) << "\n";
      out << "noise.band_lo = " << fmt17(spec.band_lo) << "\n";
      out << "noise.band_hi = " << fmt17(spec.band_hi) << "\n";
      break;
    case NoiseKind::Tabulated: {
      out << "noise.table = ";
      for (std::size_t i = 0; i < spec.table.size(); ++i)
        out << (i ? ";" : "") << fmt17(spec.table[i].first) << ":"
            << fmt17(spec.table[i].second);
      out << "\n";
      break;
    }
  }
  return out.str();
}

} // namespace sqz

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>
#include <algorithm>

#include "sqz/campaign.hpp"
#include "sqz/control.hpp"
#include "sqz/errors.hpp"
#include "sqz/estimators.hpp"
#include "sqz/noise.hpp"
#include "sqz/probe.hpp"
#include "sqz/reconstruction.hpp"
#include "sqz/rng.hpp"
#include "sqz/schedule.hpp"

namespace py = pybind11;
using namespace py::literals;

namespace {

std::vector<double> to_vector(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
  return {arr.data(), arr.data() + arr.size()};
}

} // namespace

PYBIND11_MODULE(_sqz, m) {
  m.doc() = "Stochastic-Zeno noise sensing toolkit (C++ core)";
  m.attr("__version__") = sqz::kVersion;

  py::register_exception<sqz::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<sqz::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<sqz::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // --- noise models ---
  py::class_<sqz::SpectralDensitySpec>(m, "SpectralDensitySpec")
      .def_static("ornstein_uhlenbeck", &sqz::SpectralDensitySpec::ornstein_uhlenbeck,
                  "variance"_a, "correlation_time"_a)
      .def_static("random_telegraph", &sqz::SpectralDensitySpec::random_telegraph,
                  "variance"_a, "switching_rate"_a)
      .def_static(
          "harmonics",
          [](const std::vector<std::pair<double, double>>& lines) {
            std::vector<sqz::HarmonicLine> ls;
            for (const auto& [w, v] : lines) ls.push_back({w, v});
            return sqz::SpectralDensitySpec::harmonics(std::move(ls));
          },
          "lines"_a, "list of (omega, variance) pairs")
      .def_static("flat_band", &sqz::SpectralDensitySpec::flat_band, "level"_a, "lo"_a,
                  "hi"_a)
      .def_static("tabulated", &sqz::SpectralDensitySpec::tabulated, "table"_a)
      .def_property_readonly("kind",
                             [](const sqz::SpectralDensitySpec& s) { return to_string(s.kind); })
      .def_property_readonly("total_variance", &sqz::SpectralDensitySpec::total_variance)
      .def("__repr__", [](const sqz::SpectralDensitySpec& s) {
        return "<SpectralDensitySpec kind=" + to_string(s.kind) + ">";
      });

  py::class_<sqz::NoiseTrajectory>(m, "NoiseTrajectory")
      .def_readonly("t0", &sqz::NoiseTrajectory::t0)
      .def_readonly("dt", &sqz::NoiseTrajectory::dt)
      .def_readonly("seed", &sqz::NoiseTrajectory::seed)
      .def("value_at",
           [](const sqz::NoiseTrajectory& t, std::size_t i) { return t.values.at(i); })
      .def_property_readonly("values", [](const sqz::NoiseTrajectory& t) {
        py::array_t<double> out(
            std::vector<py::ssize_t>{static_cast<py::ssize_t>(t.values.size())});
        std::copy(t.values.begin(), t.values.end(), out.mutable_data());
        return out;
      });

  m.def("psd_eval", &sqz::psd_eval, "spec"_a, "omega"_a);
  m.def("autocorrelation_from_psd", &sqz::autocorrelation_from_psd, "spec"_a, "tau"_a);
  m.def("autocorrelation_quadrature", &sqz::autocorrelation_quadrature, "spec"_a, "tau"_a,
        "rel_tol"_a = 1e-8);
  m.def("sample_trajectory", &sqz::sample_trajectory, "spec"_a, "t0"_a, "t1"_a, "dt"_a,
        "seed"_a);

  // --- schedule / control ---
  py::class_<sqz::MeasurementSchedule>(m, "MeasurementSchedule")
      .def_static("uniform", &sqz::MeasurementSchedule::uniform, "t0"_a, "interval"_a,
                  "n_measurements"_a)
      .def_static("from_times", &sqz::MeasurementSchedule::from_times, "times"_a)
      .def_readonly("times", &sqz::MeasurementSchedule::times)
      .def_property_readonly("intervals", &sqz::MeasurementSchedule::intervals);

  py::class_<sqz::ControlPulse>(m, "ControlPulse")
      .def_static("constant", &sqz::ControlPulse::constant, "amplitude"_a)
      .def_static("cosine", &sqz::ControlPulse::cosine, "amplitude"_a, "frequency"_a,
                  "phase"_a = 0.0)
      .def_static("piecewise", &sqz::ControlPulse::piecewise, "knots"_a, "levels"_a)
      .def("value", &sqz::ControlPulse::value, "t"_a)
      .def("integral", &sqz::ControlPulse::integral, "a"_a, "b"_a);

  py::class_<sqz::PiecewiseAveragedControl>(m, "PiecewiseAveragedControl")
      .def_readonly("interval_areas", &sqz::PiecewiseAveragedControl::interval_areas)
      .def("value", &sqz::PiecewiseAveragedControl::value, "t"_a);

  py::class_<sqz::FilterFunction>(m, "FilterFunction")
      .def_readonly("omega", &sqz::FilterFunction::omega)
      .def_readonly("values", &sqz::FilterFunction::values)
      .def("interpolate", &sqz::FilterFunction::interpolate, "omega"_a)
      .def("integral", &sqz::FilterFunction::integral);

  m.def("piecewise_average", &sqz::piecewise_average, "pulse"_a, "schedule"_a);
  m.def("control_fourier", &sqz::control_fourier, "avg"_a, "omega"_a);
  m.def(
      "filter_function",
      [](const sqz::PiecewiseAveragedControl& avg,
         py::array_t<double, py::array::c_style | py::array::forcecast> grid) {
        const auto g = to_vector(grid);
        return sqz::filter_function(avg, g);
      },
      "avg"_a, "grid"_a);
  m.def("uniform_grid", &sqz::uniform_grid, "omega_max"_a, "points"_a = 2000);
  m.def("cross_term_integral", &sqz::cross_term_integral, "avg"_a, "trajectory"_a);

  py::class_<sqz::FilterBank>(m, "FilterBank")
      .def_readonly("pulses", &sqz::FilterBank::pulses)
      .def_readonly("design_frequencies", &sqz::FilterBank::design_frequencies)
      .def_readonly("filters", &sqz::FilterBank::filters)
      .def_readonly("grid", &sqz::FilterBank::grid);

  m.def("design_filter_bank", &sqz::design_filter_bank, "lo"_a, "hi"_a, "count"_a,
        "schedule"_a, "amplitude"_a, "grid"_a = std::vector<double>{});

  // --- probe simulation ---
  py::class_<sqz::ProbeConfig>(m, "ProbeConfig")
      .def(py::init<>())
      .def(py::init([](double delta) { return sqz::ProbeConfig{delta}; }), "delta"_a)
      .def_readwrite("delta", &sqz::ProbeConfig::delta);

  py::enum_<sqz::PropagationMode>(m, "PropagationMode")
      .value("EXACT", sqz::PropagationMode::Exact)
      .value("SECOND_ORDER", sqz::PropagationMode::SecondOrder);

  py::class_<sqz::SurvivalResult>(m, "SurvivalResult")
      .def_readonly("factors", &sqz::SurvivalResult::factors)
      .def_readonly("probability", &sqz::SurvivalResult::probability)
      .def_readonly("valid", &sqz::SurvivalResult::valid);

  m.def(
      "propagate_exact",
      [](const sqz::ProbeConfig& config,
         py::array_t<double, py::array::c_style | py::array::forcecast> field, double dt) {
        const auto f = to_vector(field);
        const auto u = sqz::propagate_exact(config, f, dt);
        py::array_t<std::complex<double>> out({2, 2});
        auto view = out.mutable_unchecked<2>();
        view(0, 0) = u[0];
        view(0, 1) = u[1];
        view(1, 0) = u[2];
        view(1, 1) = u[3];
        return out;
      },
      "config"_a, "field"_a, "dt"_a);
  m.def(
      "survival_factor_second_order",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> field, double dt) {
        const auto f = to_vector(field);
        return sqz::survival_factor_second_order(f, dt);
      },
      "field"_a, "dt"_a);
  m.def("run_zeno_sequence", &sqz::run_zeno_sequence, "config"_a, "schedule"_a,
        "trajectory"_a, "control"_a, "mode"_a);
  m.def(
      "readout",
      [](double survival, const std::string& kind, double sigma, int n_shots,
         std::uint64_t seed) {
        const auto model = kind == "analog" ? sqz::ReadoutModel::analog(sigma)
                                            : sqz::ReadoutModel::binary(n_shots);
        auto rng = sqz::make_rng(seed);
        return sqz::readout(survival, model, rng);
      },
      "survival"_a, "kind"_a, "sigma"_a = 0.0, "n_shots"_a = 1, "seed"_a = 0);

  // --- estimators ---
  py::class_<sqz::CampaignRecord>(m, "CampaignRecord")
      .def(py::init([](int k, int mrep, double survival, double control_survival,
                       std::uint64_t seed, bool valid) {
             sqz::CampaignRecord r;
             r.filter_index = k;
             r.repetition = mrep;
             r.survival = survival;
             r.control_survival = control_survival;
             r.seed = seed;
             r.valid = valid;
             return r;
           }),
           "filter_index"_a, "repetition"_a, "survival"_a, "control_survival"_a,
           "seed"_a = 0, "valid"_a = true)
      .def_readonly("survival", &sqz::CampaignRecord::survival)
      .def_readonly("control_survival", &sqz::CampaignRecord::control_survival)
      .def("ratio", &sqz::CampaignRecord::ratio);

  py::class_<sqz::ChiEstimate>(m, "ChiEstimate")
      .def_readonly("mean", &sqz::ChiEstimate::mean)
      .def_readonly("spread", &sqz::ChiEstimate::spread)
      .def_readonly("spread_defined", &sqz::ChiEstimate::spread_defined)
      .def_readonly("order", &sqz::ChiEstimate::order)
      .def_readonly("estimator", &sqz::ChiEstimate::estimator)
      .def_readonly("repetitions", &sqz::ChiEstimate::repetitions)
      .def_readonly("rejected", &sqz::ChiEstimate::rejected);

  m.def(
      "chi2_analog",
      [](const std::vector<sqz::CampaignRecord>& records) { return sqz::chi2_analog(records); },
      "records"_a);
  m.def(
      "chi2_binary",
      [](const std::vector<double>& fractions, double control_survival, int resamples,
         std::uint64_t seed) {
        return sqz::chi2_binary(fractions, control_survival, resamples, seed);
      },
      "shot_fractions"_a, "control_survival"_a, "bootstrap_resamples"_a = 1000,
      "bootstrap_seed"_a = 0x5eedb001);
  m.def(
      "chik_analog",
      [](int order, const std::vector<sqz::CampaignRecord>& records, double prefactor) {
        return sqz::chik_analog(order, records, prefactor);
      },
      "order"_a, "records"_a, "prefactor"_a = 0.25);
  m.def("predicted_chi2", &sqz::predicted_chi2, "spec"_a, "filter"_a);

  py::class_<sqz::ErgodicityStats>(m, "ErgodicityStats")
      .def_readonly("mean_pcn", &sqz::ErgodicityStats::mean_pcn)
      .def_readonly("var_pcn", &sqz::ErgodicityStats::var_pcn)
      .def_readonly("chi_mean", &sqz::ErgodicityStats::chi_mean)
      .def_readonly("var_rel_dev", &sqz::ErgodicityStats::var_rel_dev)
      .def_readonly("offset_rel_dev", &sqz::ErgodicityStats::offset_rel_dev)
      .def_readonly("ergodic_limit", &sqz::ErgodicityStats::ergodic_limit)
      .def_readonly("hist_edges", &sqz::ErgodicityStats::hist_edges)
      .def_readonly("hist_counts", &sqz::ErgodicityStats::hist_counts);

  m.def(
      "ergodicity_stats",
      [](const std::vector<sqz::CampaignRecord>& records, std::size_t bins) {
        return sqz::ergodicity_stats(records, bins);
      },
      "records"_a, "histogram_bins"_a = 40);

  // --- reconstruction ---
  py::class_<sqz::Gramian>(m, "Gramian")
      .def_readonly("size", &sqz::Gramian::size)
      .def_readonly("matrix", &sqz::Gramian::matrix)
      .def_readonly("eigenvalues", &sqz::Gramian::eigenvalues)
      .def_readonly("cutoff", &sqz::Gramian::cutoff)
      .def("retained", &sqz::Gramian::retained)
      .def("condition_number", &sqz::Gramian::condition_number);

  py::class_<sqz::ReconstructionResult>(m, "ReconstructionResult")
      .def_readonly("omega", &sqz::ReconstructionResult::omega)
      .def_readonly("spectrum", &sqz::ReconstructionResult::spectrum)
      .def_readonly("error", &sqz::ReconstructionResult::error)
      .def_readonly("error_rss", &sqz::ReconstructionResult::error_rss)
      .def_readonly("condition_number", &sqz::ReconstructionResult::condition_number)
      .def_readonly("relative_l2_error", &sqz::ReconstructionResult::relative_l2_error);

  m.def(
      "gramian",
      [](const std::vector<sqz::FilterFunction>& filters, double cutoff) {
        return sqz::gramian(filters, cutoff);
      },
      "filters"_a, "cutoff"_a = 1e-10);
  m.def(
      "transformed_filters",
      [](const sqz::Gramian& g, const std::vector<sqz::FilterFunction>& filters) {
        return sqz::transformed_filters(g, filters);
      },
      "gram"_a, "filters"_a);
  m.def(
      "reconstruct",
      [](const std::vector<sqz::ChiEstimate>& estimates,
         const std::vector<sqz::FilterFunction>& transformed, const sqz::Gramian& gram,
         const std::vector<double>& reference, double band_lo, double band_hi) {
        return sqz::reconstruct(estimates, transformed, gram, reference, band_lo, band_hi);
      },
      "estimates"_a, "transformed"_a, "gram"_a, "reference"_a = std::vector<double>{},
      "band_lo"_a = 0.0, "band_hi"_a = -1.0);

  // --- campaigns ---
  py::class_<sqz::CampaignConfig>(m, "CampaignConfig")
      .def(py::init<>())
      .def_static("from_file", &sqz::CampaignConfig::from_file, "path"_a)
      .def_readwrite("noise", &sqz::CampaignConfig::noise)
      .def_readwrite("delta", &sqz::CampaignConfig::delta)
      .def_readwrite("n_measurements", &sqz::CampaignConfig::n_measurements)
      .def_readwrite("interval", &sqz::CampaignConfig::interval)
      .def_readwrite("bank_size", &sqz::CampaignConfig::bank_size)
      .def_readwrite("band_lo", &sqz::CampaignConfig::band_lo)
      .def_readwrite("band_hi", &sqz::CampaignConfig::band_hi)
      .def_readwrite("amplitude", &sqz::CampaignConfig::amplitude)
      .def_readwrite("repetitions", &sqz::CampaignConfig::repetitions)
      .def_readwrite("mode", &sqz::CampaignConfig::mode)
      .def_readwrite("master_seed", &sqz::CampaignConfig::master_seed)
      .def_readwrite("output_dir", &sqz::CampaignConfig::output_dir);

  py::class_<sqz::CampaignSummary>(m, "CampaignSummary")
      .def_readonly("artifact_dir", &sqz::CampaignSummary::artifact_dir)
      .def_readonly("estimates", &sqz::CampaignSummary::estimates)
      .def_readonly("reconstruction", &sqz::CampaignSummary::reconstruction)
      .def_readonly("weak_noise_violations", &sqz::CampaignSummary::weak_noise_violations)
      .def_readonly("invalid_runs", &sqz::CampaignSummary::invalid_runs);

  m.def("run_campaign", &sqz::run_campaign, "config"_a,
        py::call_guard<py::gil_scoped_release>());
  m.def("reconstruct_from_artifacts", &sqz::reconstruct_from_artifacts, "artifact_dir"_a);
  m.def("write_report", &sqz::write_report, "artifact_dir"_a);
}

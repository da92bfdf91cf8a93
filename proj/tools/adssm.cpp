// adssm: altitude-dependent spectrum analysis pipeline.
//
// Exit codes: 0 success, 1 internal error, 2 user or input error.

#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adssm/pipeline.hpp"

namespace {

adssm::TransitionFractions parse_q(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(adssm::io::parse_double(item, "--q"));
  if (v.size() != 3) throw adssm::InputError("--q expects three comma-separated fractions");
  adssm::TransitionFractions q{v[0], v[1], v[2]};
  try {
    adssm::validate_fractions(q);
  } catch (const adssm::ConfigError& e) {
    throw adssm::InputError(std::string("--q: ") + e.what());
  }
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Altitude-dependent spectral structure analysis"};
  app.require_subcommand(1);

  std::string scenario, out, sweeps, bands, grid, metrics, binned, config, capture, q_text = "0.1,0.5,0.9";
  std::optional<std::uint64_t> seed;
  adssm::ThresholdSpec threshold;
  adssm::BinningOptions binning;
  adssm::FitOptions fit;
  adssm::WelchConfig welch;
  std::string window = "hann";

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic sweep dataset from a scenario");
  sim->add_option("--scenario", scenario, "Scenario JSON")->required();
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_option("--seed", seed, "Override the scenario seed");

  auto* met = app.add_subcommand("metrics", "Compute per-snapshot band metrics");
  met->add_option("--sweeps", sweeps, "Sweep CSV")->required();
  met->add_option("--bands", bands, "Band registry JSON")->required();
  met->add_option("--grid", grid, "Grid JSON (default: grid.json next to the sweeps)");
  met->add_option("--out", out, "Output directory")->required();
  met->add_option("--percentile", threshold.percentile, "Noise floor percentile")->capture_default_str();
  met->add_option("--margin-db", threshold.margin_db, "Detection margin above the noise floor")->capture_default_str();

  auto* bin = app.add_subcommand("bin", "Aggregate metrics into altitude bins");
  bin->add_option("--metrics", metrics, "Metric CSV")->required();
  bin->add_option("--delta-h", binning.delta_h, "Bin size in meters")->capture_default_str();
  bin->add_option("--min-count", binning.min_count, "Minimum samples per bin")->capture_default_str();
  bin->add_option("--out", out, "Output directory")->required();

  auto* fitc = app.add_subcommand("fit", "Fit altitude models to binned series");
  fitc->add_option("--binned", binned, "Binned CSV")->required();
  fitc->add_option("--out", out, "Output directory")->required();
  fitc->add_option("--q", q_text, "Transition fractions")->capture_default_str();
  fitc->add_option("--max-iters", fit.max_iters)->capture_default_str();
  fitc->add_option("--restarts", fit.restarts)->capture_default_str();

  auto* psd = app.add_subcommand("psd", "Welch PSD of a raw I/Q capture");
  psd->add_option("--capture", capture, "Interleaved float32 I/Q file (sidecar <file>.json)")->required();
  psd->add_option("--out", out, "Output directory")->required();
  psd->add_option("--fft-size", welch.fft_size)->capture_default_str();
  psd->add_option("--overlap", welch.overlap_fraction)->capture_default_str();
  psd->add_option("--window", window)->capture_default_str();

  auto* all = app.add_subcommand("run-all", "Run every stage from a pipeline config");
  all->add_option("--config", config, "Pipeline config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      const auto o = adssm::cmd_simulate(scenario, out, seed);
      std::printf("wrote %s\n", o.sweeps.string().c_str());
    } else if (*met) {
      std::optional<std::filesystem::path> g;
      if (!grid.empty()) g = grid;
      const auto o = adssm::cmd_metrics(sweeps, bands, out, threshold, g);
      std::printf("wrote %s\n", o.string().c_str());
    } else if (*bin) {
      const auto o = adssm::cmd_bin(metrics, out, binning);
      std::printf("wrote %s\n", o.string().c_str());
    } else if (*fitc) {
      const auto r = adssm::cmd_fit(binned, out, fit, parse_q(q_text));
      for (const auto& o : r.outcomes)
        if (!o.report) std::fprintf(stderr, "not fitted: %s/%s: %s\n", o.band.c_str(), adssm::to_string(o.metric).c_str(), o.note.c_str());
      std::printf("wrote %s\n", r.table.string().c_str());
    } else if (*psd) {
      welch.window = adssm::parse_window(window);
      const auto o = adssm::cmd_psd(capture, out, welch);
      std::printf("wrote %s\n", o.string().c_str());
    } else if (*all) {
      const auto r = adssm::cmd_run_all(adssm::read_pipeline_config(config));
      std::printf("wrote %s\n", r.table.string().c_str());
    }
  } catch (const adssm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "adssm/io.hpp"
#include "adssm/random.hpp"

using namespace adssm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "adssm_io_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, -30.0 + 60.0 * rng.uniform());
    EXPECT_EQ(io::parse_double(io::format_double(v), "t"), v);
  }
  EXPECT_EQ(io::format_fixed(-12.8, 2), "-12.80");
  EXPECT_THROW(io::parse_double("1.5x", "t"), InputError);
  EXPECT_THROW(io::parse_size("-1", "t"), InputError);
}

TEST(BandRegistry, RoundTrip) {
  const auto dir = scratch("bands");
  io::write_band_registry(dir / "bands.json", default_band_registry());
  const auto back = io::read_band_registry(dir / "bands.json");
  ASSERT_EQ(back.size(), default_band_registry().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].name, default_band_registry()[i].name);
    EXPECT_EQ(back[i].f_low_hz, default_band_registry()[i].f_low_hz);
  }
  write_text(dir / "bad.json", R"([{"name": "a,b", "f_low_hz": 1, "f_high_hz": 2}])");
  EXPECT_THROW(io::read_band_registry(dir / "bad.json"), InputError);
  write_text(dir / "broken.json", "[{");
  EXPECT_THROW(io::read_band_registry(dir / "broken.json"), InputError);
}

TEST(SweepCsv, RoundTripIsExact) {
  const auto dir = scratch("sweeps");
  const FrequencyGrid grid(1e6, 1e3, 7);
  std::vector<SweepRecord> recs;
  Rng rng(8);
  for (int s = 0; s < 3; ++s) {
    SweepRecord r;
    r.timestamp_s = 2.0 * s;
    r.altitude_m = 1.5 * s;
    for (int i = 0; i < 7; ++i) r.psd.push_back(rng.exponential() * 1e-11);
    recs.push_back(r);
  }
  io::write_sweep_csv(dir / "s.csv", recs);
  io::write_grid_json(dir / "grid.json", grid, 0.0);
  const auto g = io::read_grid_json(dir / "grid.json");
  EXPECT_TRUE(g.grid == grid);
  const auto back = io::read_sweep_csv(dir / "s.csv", g);
  ASSERT_EQ(back.size(), 3u);
  for (int s = 0; s < 3; ++s) EXPECT_EQ(back[s].psd, recs[s].psd);
}

TEST(SweepCsv, StructuralErrors) {
  const auto dir = scratch("sweeps_bad");
  const io::GridFile g{FrequencyGrid(0.0, 1.0, 2), 0.0};
  write_text(dir / "hdr.csv", "t,h,i,p\n");
  EXPECT_THROW(io::read_sweep_csv(dir / "hdr.csv", g), InputError);
  write_text(dir / "short.csv", std::string(io::kSweepHeader) + "\n0,0,0,1\n");
  EXPECT_THROW(io::read_sweep_csv(dir / "short.csv", g), InputError);
  write_text(dir / "dup.csv", std::string(io::kSweepHeader) + "\n0,0,0,1\n0,0,0,1\n");
  EXPECT_THROW(io::read_sweep_csv(dir / "dup.csv", g), InputError);
  write_text(dir / "neg.csv", std::string(io::kSweepHeader) + "\n0,0,0,-1\n0,0,1,1\n");
  EXPECT_THROW(io::read_sweep_csv(dir / "neg.csv", g), InputError);
  EXPECT_THROW(io::read_sweep_csv(dir / "missing.csv", g), InputError);
}

TEST(RawCapture, RoundTripFloat32) {
  const auto dir = scratch("raw");
  io::RawCapture cap;
  cap.fs_hz = 30.72e6;
  cap.center_freq_hz = 751e6;
  for (int i = 0; i < 100; ++i) cap.iq.emplace_back(0.25 * i, -0.5 * i);
  io::write_raw_capture(dir / "c.bin", cap);
  EXPECT_EQ(fs::file_size(dir / "c.bin"), 800u);
  const auto back = io::read_raw_capture(dir / "c.bin");
  EXPECT_EQ(back.iq, cap.iq);
  EXPECT_EQ(back.fs_hz, cap.fs_hz);
}

TEST(MetricAndBinnedCsv, RoundTrip) {
  const auto dir = scratch("metrics");
  std::vector<MetricRow> rows{{"A", {0.0, 1.0, -50.25, 3.5, 0.7, 0.125}}, {"B", {2.0, 3.0, -60.0, 1.0, 0.2, 0.0}}};
  io::write_metric_csv(dir / "m.csv", rows);
  const auto back = io::read_metric_csv(dir / "m.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].band, "B");
  EXPECT_EQ(back[0].sample.power_db, -50.25);
  EXPECT_EQ(back[0].sample.sparsity, 0.125);

  BinnedMetricSeries s{"A", Metric::sparsity, 10.0, {{5, 0.1, 0.01, 4}, {15, 0.3, 0.02, 5}}};
  io::write_binned_csv(dir / "b.csv", {s});
  const auto bs = io::read_binned_csv(dir / "b.csv");
  ASSERT_EQ(bs.size(), 1u);
  EXPECT_EQ(bs[0].metric, Metric::sparsity);
  EXPECT_EQ(bs[0].means(), s.means());
  EXPECT_EQ(bs[0].bins[1].count, 5u);
}

TEST(FitReportJson, RoundTrip) {
  FitReport r;
  r.band = "LTE Band 13 DL";
  r.metric = Metric::power;
  r.model = ModelKind::exp;
  r.params = ExpModelParams{-12.8, -55.66, 21.5};
  r.rmse = 0.88;
  r.r2 = 0.97;
  r.transitions = transition_heights_exp(r.exp_params());
  r.n_bins = 20;
  r.band_bins = 167;
  r.flags = {"x"};
  const auto back = io::parse_fit_report(io::fit_report_json(r), "t");
  EXPECT_EQ(back.band, r.band);
  EXPECT_EQ(back.exp_params().tau, 21.5);
  EXPECT_EQ(*back.r2, 0.97);
  EXPECT_EQ(back.transitions->h50, r.transitions->h50);
  EXPECT_EQ(*back.band_bins, 167u);
  EXPECT_EQ(back.flags, r.flags);
}

TEST(TableRow, MissingFitsLeaveEmptyFields) {
  EXPECT_EQ(io::render_table_row("X", nullptr, nullptr, nullptr), "X,,,,,,,,,,");
  FitReport p;
  p.params = ExpModelParams{-20.0, -60.0, 30.0};
  p.rmse = 1.234;
  EXPECT_EQ(io::render_table_row("X", &p, nullptr, nullptr), "X,-20.00,-60.00,,,,,1.23,,,");
}

TEST(Scenario, ParsesAscentAndBinRange) {
  const auto j = nlohmann::json::parse(R"({
    "sweep": {"f_start_hz": 740e6, "f_stop_hz": 760e6},
    "seed": 5,
    "trajectory": {"h_max_m": 10, "rate_mps": 1, "interval_s": 5},
    "bands": [{"name": "LTE Band 13 DL", "f_low_hz": 746e6, "f_high_hz": 756e6,
               "power": {"x_inf": -20, "x_zero": -60, "tau": 30},
               "emitters": [{"bin_range": [10, 20], "activation_h50_m": 40, "activation_k": 0.2}]}]
  })");
  const auto s = io::parse_scenario(j, "t");
  EXPECT_EQ(s.seed, 5u);
  EXPECT_EQ(s.trajectory.size(), 3u);
  ASSERT_EQ(s.bands.size(), 1u);
  EXPECT_EQ(s.bands[0].emitters[0].bins.size(), 10u);
  EXPECT_EQ(s.bands[0].power.tau, 30.0);
  EXPECT_THROW(io::parse_scenario(nlohmann::json::parse(R"({"bands": []})"), "t"), InputError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "adssm/pipeline.hpp"

using namespace adssm;
namespace fs = std::filesystem;

namespace {

const fs::path kData = ADSSM_DATA_DIR;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "adssm_pipeline_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Pipeline, NoiselessSingleEmitterRecoversPlantedPower) {
  const auto dir = scratch("single");
  const auto sim = cmd_simulate(kData / "scenario_single_emitter.json", dir / "simulate");
  const auto metrics = cmd_metrics(sim.sweeps, sim.bands, dir / "metrics");
  const auto binned = cmd_bin(metrics, dir / "binned");
  const auto fit = cmd_fit(binned, dir / "fit");

  const FitReport* power = nullptr;
  for (const auto& o : fit.outcomes)
    if (o.metric == Metric::power && o.report) power = &*o.report;
  ASSERT_NE(power, nullptr);
  EXPECT_NEAR(power->exp_params().tau / 30.0, 1.0, 1e-3);
  EXPECT_NEAR(power->exp_params().x_inf, -20.0, 0.01);
  EXPECT_TRUE(fs::exists(dir / "fit" / "fits" / "LTE_Band_13_DL__power.json"));
  EXPECT_TRUE(fs::exists(dir / "fit" / "table.csv"));
}

TEST(Pipeline, MetricsOnNoiseOnlyBand) {
  ScenarioSpec spec;
  spec.sweep = SweepConfig{740e6, 760e6, 25.68e6, 30.72e6, 512, 42, 500000};
  BandScenario b;
  b.band = {"LTE Band 13 DL", 746e6, 756e6};
  spec.bands.push_back(b);
  spec.trajectory = AscentProfile{99.0, 1.0, 0.0, 2.0, false}.sample();
  const auto ds = gen_sweep_dataset(spec);
  const auto m = compute_campaign_metrics(ds.records, ds.grid, {b.band}, {});
  ASSERT_EQ(m.rows.size(), ds.records.size());
  for (const auto& r : m.rows) {
    EXPECT_NEAR(r.sample.power_db, -100.0, 0.1);
    EXPECT_LT(r.sample.sparsity, 0.01);
    EXPECT_GT(r.sample.entropy_norm, 0.999);
  }
}

TEST(Pipeline, OutOfRangeBandIsSkippedWithWarning) {
  const FrequencyGrid grid(100.0, 1.0, 10);
  std::vector<SweepRecord> recs(3);
  for (std::size_t i = 0; i < 3; ++i) recs[i] = {static_cast<double>(i), 10.0 * static_cast<double>(i), std::vector<double>(10, 1.0), 0.0};
  const auto m = compute_campaign_metrics(recs, grid, {{"in", 101.0, 105.0}, {"out", 500.0, 600.0}}, {});
  EXPECT_EQ(m.bands.size(), 1u);
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_NE(m.warnings[0].find("out"), std::string::npos);
}

TEST(Pipeline, FlatEntropyUsesReducedModel) {
  BinnedMetricSeries s{"B", Metric::entropy_norm, 10.0, {}};
  for (int i = 0; i < 10; ++i) s.bins.push_back({5.0 + 10.0 * i, 0.9 + 0.001 * (i % 2), 0.0, 5});
  const auto o = fit_series(s, {}, kDefaultTransitionFractions, 167);
  ASSERT_TRUE(o.report);
  EXPECT_EQ(o.report->model, ModelKind::exp_reduced);
  EXPECT_EQ(*o.report->band_bins, 167u);
}

TEST(Pipeline, TooFewBinsGivesNoteNotReport) {
  BinnedMetricSeries s{"B", Metric::power, 10.0, {{5, -50, 0, 5}, {15, -40, 0, 5}}};
  const auto o = fit_series(s, {}, kDefaultTransitionFractions);
  EXPECT_FALSE(o.report);
  EXPECT_FALSE(o.note.empty());
}

TEST(Pipeline, MissingScenarioIsInputError) {
  EXPECT_THROW(cmd_simulate(kData / "does_not_exist.json", scratch("missing")), InputError);
}

TEST(Pipeline, ConfigResolvesRelativePaths) {
  const auto c = read_pipeline_config(kData / "config.json");
  ASSERT_TRUE(c.scenario);
  EXPECT_EQ(c.scenario->filename(), "scenario_staggered.json");
  EXPECT_TRUE(fs::exists(*c.scenario));
  EXPECT_EQ(c.binning.delta_h, 10.0);
}

TEST(Pipeline, FileSlug) {
  EXPECT_EQ(file_slug("5G NR C-Band"), "5G_NR_C_Band");
}

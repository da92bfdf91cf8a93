#include <gtest/gtest.h>

#include <cmath>

#include "adssm/spectrum_core.hpp"
#include "oracles.hpp"

using namespace adssm;

TEST(FrequencyGrid, CampaignConfigurationAbutsExactly) {
  const SweepConfig cfg;  // 30.72 MHz, 512-point FFT, 42-bin trim, 25.68 MHz step
  EXPECT_EQ(cfg.retained_bins(), 428u);
  EXPECT_DOUBLE_EQ(cfg.bin_width_hz(), 60e3);
  EXPECT_NEAR(cfg.retained_span_hz(), 25.68e6, 1e-6);

  const auto grid = build_frequency_grid(cfg);
  EXPECT_EQ(grid.size() % 428, 0u);
  EXPECT_EQ(grid.size(), capture_count(cfg) * 428);
  EXPECT_LE(grid.first_bin_hz(), cfg.f_start_hz);
  EXPECT_GE(grid.last_bin_hz(), cfg.f_stop_hz);
  const auto f = grid.bin_freqs();
  for (std::size_t i = 1; i < f.size(); ++i) {
    ASSERT_GT(f[i], f[i - 1]);
    ASSERT_NEAR(f[i] - f[i - 1], 60e3, 60e3 * 1e-6);
  }
}

TEST(FrequencyGrid, SmallestExactCase) {
  SweepConfig cfg{0.0, 2.0, 1.0, 1.0, 4, 0, 16};
  const auto grid = build_frequency_grid(cfg);
  EXPECT_EQ(capture_count(cfg), 3u);
  EXPECT_EQ(grid.size(), 12u);
  EXPECT_DOUBLE_EQ(grid.bin_width_hz(), 0.25);
  EXPECT_DOUBLE_EQ(grid.freq(0), -0.5);
  EXPECT_DOUBLE_EQ(grid.freq(11), 2.25);
}

TEST(FrequencyGrid, StepMismatchIsAConfigurationError) {
  SweepConfig gap{0.0, 2.0, 2.0, 1.0, 4, 0, 16};
  try {
    build_frequency_grid(gap);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("step_hz"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("gap"), std::string::npos);
  }
  SweepConfig overlap{0.0, 2.0, 0.5, 1.0, 4, 0, 16};
  EXPECT_THROW(build_frequency_grid(overlap), ConfigError);
}

TEST(FrequencyGrid, InvalidConfigRejected) {
  SweepConfig c;
  c.f_stop_hz = c.f_start_hz;
  EXPECT_THROW(build_frequency_grid(c), ConfigError);
  c = SweepConfig{};
  c.edge_trim = 256;
  EXPECT_THROW(build_frequency_grid(c), ConfigError);
  c = SweepConfig{};
  c.sample_rate_hz = 0.0;
  EXPECT_THROW(build_frequency_grid(c), ConfigError);
}

TEST(ResolveBand, FmOnCampaignGridMatchesBruteForceCount) {
  const auto grid = build_frequency_grid(SweepConfig{});
  const auto fm = resolve_band(grid, "FM", 88e6, 108e6);
  const auto expected = oracle::count_bins_in(grid.first_bin_hz(), grid.bin_width_hz(), grid.size(), 88e6, 108e6);
  EXPECT_EQ(fm.n_bins, expected);
  EXPECT_EQ(fm.n_bins, 334u);
  EXPECT_GE(grid.freq(fm.first_bin), 88e6);
  EXPECT_LE(grid.freq(fm.last_bin()), 108e6);
  EXPECT_LT(grid.freq(fm.first_bin - 1), 88e6);
  EXPECT_GT(grid.freq(fm.last_bin() + 1), 108e6);
}

TEST(ResolveBand, AllDefaultBandsResolve) {
  const auto grid = build_frequency_grid(SweepConfig{});
  for (const auto& b : default_band_registry()) {
    const auto def = resolve_band(grid, b);
    EXPECT_EQ(def.n_bins, oracle::count_bins_in(grid.first_bin_hz(), grid.bin_width_hz(), grid.size(), b.f_low_hz,
                                                b.f_high_hz))
        << b.name;
  }
}

TEST(ResolveBand, SingleBinBand) {
  const FrequencyGrid grid(100.0, 10.0, 20);
  const double c = grid.freq(7);
  const auto b = resolve_band(grid, "one", c - 5.0, c + 5.0);
  EXPECT_EQ(b.n_bins, 1u);
  EXPECT_EQ(b.first_bin, 7u);
}

TEST(ResolveBand, OutOfRange) {
  const FrequencyGrid grid(100.0, 10.0, 20);
  EXPECT_THROW(resolve_band(grid, "below", 10.0, 50.0), BandRangeError);
  EXPECT_THROW(resolve_band(grid, "above", 1000.0, 2000.0), BandRangeError);
  EXPECT_THROW(resolve_band(grid, "inverted", 200.0, 150.0), ConfigError);
}

TEST(ExtractBandPsd, ProjectionAndGain) {
  const FrequencyGrid grid(0.0, 1.0, 10);
  SweepRecord rec;
  for (int i = 0; i < 10; ++i) rec.psd.push_back(1.0 + i);
  const auto band = resolve_band(grid, "b", 3.0, 5.0);
  ASSERT_EQ(band.n_bins, 3u);

  EXPECT_EQ(extract_band_psd(rec, band), (std::vector<double>{4.0, 5.0, 6.0}));

  rec.gain_offset_db = 10.0;
  const auto scaled = extract_band_psd(rec, band);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(scaled[i], 10.0 * (4.0 + i), 1e-12);
}

TEST(ExtractBandPsd, GainRoundTrip) {
  const FrequencyGrid grid(0.0, 1.0, 8);
  SweepRecord rec;
  for (int i = 0; i < 8; ++i) rec.psd.push_back(std::pow(1.7, i) * 1e-9);
  const auto band = resolve_band(grid, "all", 0.0, 7.0);
  for (double g : {-37.5, -3.0, 0.1, 12.0, 55.0}) {
    rec.gain_offset_db = g;
    SweepRecord back;
    back.psd = extract_band_psd(rec, band);
    back.gain_offset_db = -g;
    const auto restored = extract_band_psd(back, band);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(restored[i] / (std::pow(1.7, i) * 1e-9), 1.0, 1e-12);
  }
}

TEST(ExtractBandPsd, GridMismatch) {
  const FrequencyGrid grid(0.0, 1.0, 10);
  const auto band = resolve_band(grid, "b", 3.0, 5.0);
  SweepRecord rec;
  rec.psd.assign(12, 1.0);
  EXPECT_THROW(extract_band_psd(rec, band), StructuralError);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "adssm/random.hpp"
#include "adssm/welch.hpp"
#include "oracles.hpp"

using namespace adssm;
using cd = std::complex<double>;

namespace {

std::vector<cd> tone(std::size_t fft_size, std::size_t out_bin, std::size_t n_samples, double amp = 1.0) {
  // Output bin k sits at (k - N/2) cycles per N samples.
  const double cycles = static_cast<double>(out_bin) - static_cast<double>(fft_size / 2);
  std::vector<cd> x(n_samples);
  for (std::size_t t = 0; t < n_samples; ++t)
    x[t] = std::polar(amp, 2.0 * std::numbers::pi * cycles * static_cast<double>(t) / static_cast<double>(fft_size));
  return x;
}

std::vector<cd> white(std::size_t n, double sigma2, std::uint64_t seed) {
  Rng rng(seed);
  const double s = std::sqrt(sigma2 / 2.0);
  std::vector<cd> x(n);
  for (auto& v : x) v = {s * rng.normal(), s * rng.normal()};
  return x;
}

}  // namespace

TEST(Fft, MatchesDirectDft) {
  const auto x = white(64, 1.0, 3);
  std::vector<cd> buf = x;
  detail::fft_inplace(buf);
  const auto direct = oracle::direct_periodogram(x);
  for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(std::norm(buf[k]), direct[(k + 32) % 64], 1e-9);
}

TEST(Welch, SingleToneLandsOnItsBin) {
  WelchConfig cfg{64, 0.5, WindowType::rectangular, PsdScaling::density};
  for (std::size_t k : {0u, 1u, 17u, 32u, 33u, 63u}) {
    const auto psd = welch_psd(tone(64, k, 640), 1.0, cfg);
    EXPECT_EQ(static_cast<std::size_t>(std::max_element(psd.begin(), psd.end()) - psd.begin()), k);
  }
}

TEST(Welch, ZerosInZerosOut) {
  const std::vector<cd> x(2048, cd{});
  for (double v : welch_psd(x, 1e6)) EXPECT_EQ(v, 0.0);
}

TEST(Welch, ParsevalOnWhiteNoise) {
  WelchConfig cfg{256, 0.0, WindowType::hann, PsdScaling::density};
  const double fs = 30.72e6;
  const auto x = white(256 * 100, 2.5, 11);
  const auto psd = welch_psd(x, fs, cfg);
  double sum = 0.0;
  for (double v : psd) sum += v;
  const double estimate = sum * fs / 256.0;
  EXPECT_NEAR(estimate / oracle::time_domain_power(x), 1.0, 0.05);
}

TEST(Welch, RectangularSingleSegmentEqualsDirectPeriodogram) {
  WelchConfig cfg{32, 0.0, WindowType::rectangular, PsdScaling::spectrum};
  const auto x = white(32, 1.0, 5);
  const auto psd = welch_psd(x, 1.0, cfg);
  const auto direct = oracle::direct_periodogram(x);
  for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(psd[k], direct[k] / (32.0 * 32.0), 1e-12);
}

TEST(Welch, PhaseRotationAndAmplitudeScaling) {
  const auto x = white(4096, 1.0, 21);
  const auto base = welch_psd(x, 1e6);
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    auto rotated = x;
    for (auto& v : rotated) v *= std::polar(1.0, phi);
    auto doubled = x;
    for (auto& v : doubled) v *= 2.0;
    const auto pr = welch_psd(rotated, 1e6);
    const auto pd = welch_psd(doubled, 1e6);
    for (std::size_t k = 0; k < base.size(); ++k) {
      EXPECT_NEAR(pr[k], base[k], 1e-10 * base[k]);
      EXPECT_NEAR(pd[k], 4.0 * base[k], 1e-10 * base[k]);
    }
  }
}

TEST(Welch, SegmentCountForCampaignCapture) {
  EXPECT_EQ(welch_segment_count(500'000, WelchConfig{}), 1952u);
}

TEST(Welch, InputErrors) {
  EXPECT_THROW(welch_psd(std::vector<cd>(100), 1.0), InputError);
  std::vector<cd> bad(1024);
  bad[5] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  EXPECT_THROW(welch_psd(bad, 1.0), InputError);
  WelchConfig cfg;
  cfg.fft_size = 500;
  EXPECT_THROW(welch_psd(std::vector<cd>(1000), 1.0, cfg), ConfigError);
  cfg = WelchConfig{};
  cfg.overlap_fraction = 1.0;
  EXPECT_THROW(welch_psd(std::vector<cd>(1000), 1.0, cfg), ConfigError);
}

TEST(TrimAndPlace, NoTrimPlacesEverything) {
  SweepConfig cfg{0.0, 2.0, 1.0, 1.0, 4, 0, 16};
  const auto grid = build_frequency_grid(cfg);
  const std::vector<double> psd{1, 2, 3, 4};
  const auto rec = trim_and_place(psd, 1.0, cfg, grid, SweepRecord{});
  EXPECT_EQ(rec.psd, (std::vector<double>{0, 0, 0, 0, 1, 2, 3, 4, 0, 0, 0, 0}));
}

TEST(TrimAndPlace, CampaignTrimDropsEdges) {
  const SweepConfig cfg;
  const auto grid = build_frequency_grid(cfg);
  std::vector<double> psd(512);
  for (std::size_t k = 0; k < 512; ++k) psd[k] = static_cast<double>(k + 1);
  const auto rec = trim_and_place(psd, capture_center_hz(cfg, 2), cfg, grid, SweepRecord{});
  std::size_t placed = 0;
  for (double v : rec.psd) placed += v != 0.0;
  EXPECT_EQ(placed, 428u);
  EXPECT_EQ(rec.psd[2 * 428], 43.0);        // first retained bin (index 42)
  EXPECT_EQ(rec.psd[2 * 428 + 427], 470.0);  // last retained bin (index 469)
  // Placed frequencies coincide with the capture's own bin frequencies.
  EXPECT_NEAR(grid.freq(2 * 428), capture_center_hz(cfg, 2) + (42.0 - 256.0) * 60e3, 1e-3);
}

TEST(TrimAndPlace, PreviouslyWrittenPositionsUntouched) {
  SweepConfig cfg{0.0, 2.0, 1.0, 1.0, 4, 0, 16};
  const auto grid = build_frequency_grid(cfg);
  auto rec = trim_and_place(std::vector<double>{1, 1, 1, 1}, 0.0, cfg, grid, SweepRecord{});
  rec = trim_and_place(std::vector<double>{2, 2, 2, 2}, 1.0, cfg, grid, rec);
  EXPECT_EQ(rec.psd, (std::vector<double>{1, 1, 1, 1, 2, 2, 2, 2, 0, 0, 0, 0}));
}

TEST(TrimAndPlace, OffScheduleCenter) {
  SweepConfig cfg{0.0, 2.0, 1.0, 1.0, 4, 0, 16};
  const auto grid = build_frequency_grid(cfg);
  EXPECT_THROW(trim_and_place(std::vector<double>(4), 0.5, cfg, grid, SweepRecord{}), PlacementError);
  EXPECT_THROW(trim_and_place(std::vector<double>(4), 5.0, cfg, grid, SweepRecord{}), PlacementError);
}

TEST(SweepAssembler, FullScheduleCoversGridWithoutDoubleWrites) {
  SweepConfig cfg{100e6, 130e6, 2.56e6, 3.072e6, 64, 6, 4096};  // 52 retained bins * 48 kHz = 2.496 MHz
  cfg.step_hz = cfg.retained_span_hz();
  const auto grid = build_frequency_grid(cfg);
  SweepAssembler a(cfg, grid, 0.0, 10.0);
  std::vector<double> psd(64, 1.0);
  for (std::size_t c = 0; c < capture_count(cfg); ++c) {
    a.place(psd, capture_center_hz(cfg, c));
  }
  EXPECT_EQ(a.unwritten(), 0u);
  EXPECT_THROW(a.place(psd, capture_center_hz(cfg, 0)), PlacementError);
  SweepAssembler b(cfg, grid, 0.0, 10.0);
  b.place(psd, capture_center_hz(cfg, 0));
  EXPECT_THROW(std::move(b).finish(), PlacementError);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "adssm/binning.hpp"
#include "adssm/random.hpp"

using namespace adssm;

TEST(BinByAltitude, SmallExample) {
  const std::vector<AltitudeSample> s{{3, 1}, {7, 3}, {12, 10}};
  const auto b = bin_by_altitude(s, 10.0, 1);
  ASSERT_EQ(b.bins.size(), 2u);
  EXPECT_EQ(b.bins[0].center_m, 5.0);
  EXPECT_EQ(b.bins[0].mean, 2.0);
  EXPECT_EQ(b.bins[0].std, 1.0);
  EXPECT_EQ(b.bins[0].count, 2u);
  EXPECT_EQ(b.bins[1].center_m, 15.0);
  EXPECT_EQ(b.bins[1].mean, 10.0);
  EXPECT_EQ(b.bins[1].count, 1u);

  const auto only = bin_by_altitude(s, 10.0, 2);
  ASSERT_EQ(only.bins.size(), 1u);
  EXPECT_EQ(only.bins[0].center_m, 5.0);
}

TEST(BinByAltitude, SingleSample) {
  const std::vector<AltitudeSample> s{{42.0, -7.5}};
  const auto b = bin_by_altitude(s, 10.0, 1);
  ASSERT_EQ(b.bins.size(), 1u);
  EXPECT_EQ(b.bins[0].center_m, 45.0);
  EXPECT_EQ(b.bins[0].std, 0.0);
}

TEST(BinByAltitude, HalfOpenIntervals) {
  const std::vector<AltitudeSample> s{{10.0, 1}, {9.999, 2}};
  const auto b = bin_by_altitude(s, 10.0, 1);
  ASSERT_EQ(b.bins.size(), 2u);
  EXPECT_EQ(b.bins[0].mean, 2.0);
  EXPECT_EQ(b.bins[1].mean, 1.0);
}

TEST(BinByAltitude, NonFiniteValuesDropped) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<AltitudeSample> s{{1, ninf}, {2, 4.0}, {3, 6.0}};
  const auto b = bin_by_altitude(s, 10.0, 1);
  EXPECT_EQ(b.bins[0].count, 2u);
  EXPECT_EQ(b.bins[0].mean, 5.0);
}

TEST(BinByAltitude, Errors) {
  const std::vector<AltitudeSample> s{{3, 1}, {7, 3}};
  EXPECT_THROW(bin_by_altitude(s, 10.0, 5), InsufficientDataError);
  EXPECT_THROW(bin_by_altitude(s, 0.0, 1), ConfigError);
  const std::vector<AltitudeSample> neg{{-1, 1}};
  EXPECT_THROW(bin_by_altitude(neg, 10.0, 1), InputError);
}

TEST(BinByAltitude, RandomizedProperties) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AltitudeSample> s(50 + static_cast<std::size_t>(rng.uniform() * 200));
    for (auto& x : s) x = {250.0 * rng.uniform(), rng.normal()};
    const std::size_t min_count = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    const auto a = bin_by_altitude(s, 10.0, min_count);

    // Counts account for every sample that was not in a dropped bin.
    std::size_t kept = 0;
    for (const auto& x : s) {
      const double c = (std::floor(x.altitude_m / 10.0) + 0.5) * 10.0;
      const auto it = std::find_if(a.bins.begin(), a.bins.end(), [&](const AltitudeBin& b) { return b.center_m == c; });
      if (it != a.bins.end()) ++kept;
    }
    std::size_t total = 0;
    for (const auto& b : a.bins) {
      EXPECT_GE(b.count, min_count);
      total += b.count;
    }
    EXPECT_EQ(total, kept);
    for (std::size_t i = 1; i < a.bins.size(); ++i) EXPECT_GT(a.bins[i].center_m, a.bins[i - 1].center_m);

    // Order invariance, bit-exact.
    auto shuffled = s;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i)
      std::swap(shuffled[i], shuffled[static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1))]);
    const auto b = bin_by_altitude(shuffled, 10.0, min_count);
    ASSERT_EQ(a.bins.size(), b.bins.size());
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
      EXPECT_EQ(a.bins[i].mean, b.bins[i].mean);
      EXPECT_EQ(a.bins[i].std, b.bins[i].std);
    }

    // Constant values.
    auto constant = s;
    for (auto& x : constant) x.value = 3.25;
    for (const auto& bin : bin_by_altitude(constant, 10.0, min_count).bins) {
      EXPECT_EQ(bin.mean, 3.25);
      EXPECT_EQ(bin.std, 0.0);
    }
  }
}

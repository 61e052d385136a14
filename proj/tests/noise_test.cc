// Copyright 2026 The dpagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpagg/noise.h"

#include <cmath>
#include <vector>

#include "dpagg/worked_example.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dpagg {
namespace {

Date Monday(int i) {
  return Date{std::chrono::year{2021} / 1 / 4} + std::chrono::days{7 * i};
}

TEST(SigmaForTest, ProductionScales) {
  struct Case {
    RegionType type;
    GeoLevel level;
    Category category;
    double sigma;
  };
  const Case cases[] = {
      {RegionType::kLarge, GeoLevel::kPostalCode, Category::kAny, 35.0},
      {RegionType::kLarge, GeoLevel::kPostalCode, Category::kOther, 3.25},
      {RegionType::kLarge, GeoLevel::kCounty, Category::kAny, 180.0},
      {RegionType::kLarge, GeoLevel::kCounty, Category::kIntent, 20.0},
      {RegionType::kMedium, GeoLevel::kPostalCode, Category::kAny, 40.0},
      {RegionType::kMedium, GeoLevel::kPostalCode, Category::kSafety, 3.5},
      {RegionType::kMedium, GeoLevel::kCounty, Category::kAny, 100.0},
      {RegionType::kMedium, GeoLevel::kCounty, Category::kSafety, 8.0},
      {RegionType::kSmall, GeoLevel::kCounty, Category::kAny, 28.0},
      {RegionType::kSmall, GeoLevel::kCounty, Category::kIntent, 3.21},
      {RegionType::kNotApplicable, GeoLevel::kState, Category::kAny, 450.0},
      {RegionType::kNotApplicable, GeoLevel::kState, Category::kOther, 35.0},
  };
  for (const Case& c : cases) {
    auto sigma = SigmaFor(c.type, c.level, c.category);
    ASSERT_TRUE(sigma.ok()) << sigma.status();
    EXPECT_DOUBLE_EQ(*sigma, c.sigma);
  }
  EXPECT_EQ(SigmaTable::Default().entries().size(), 12u);
}

TEST(SigmaForTest, SmallPostalStratumIsInvalid) {
  EXPECT_EQ(SigmaFor(RegionType::kSmall, GeoLevel::kPostalCode, Category::kAny)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(SigmaFor(RegionType::kLarge, GeoLevel::kState, Category::kAny).ok());
  EXPECT_FALSE(
      SigmaFor(RegionType::kNotApplicable, GeoLevel::kCounty, Category::kAny).ok());
}

TEST(SigmaTableTest, CsvRoundTripAndErrors) {
  const SigmaTable table = SigmaTable::Default();
  auto parsed = SigmaTable::ParseCsv(table.ToCsv());
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(parsed->entries(), table.entries());

  const std::string header = "population,level,category_group,sigma\n";
  EXPECT_FALSE(SigmaTable::ParseCsv(header + "small,postal_code,A0,1\n").ok());
  EXPECT_FALSE(SigmaTable::ParseCsv(header + "large,county,A0,0\n").ok());
  EXPECT_FALSE(SigmaTable::ParseCsv(header + "large,county,A0,-1\n").ok());
  EXPECT_FALSE(
      SigmaTable::ParseCsv(header + "large,county,A0,1\nlarge,county,A0,2\n").ok());
  EXPECT_FALSE(SigmaTable::ParseCsv("sigma\n").ok());
}

TEST(SigmaTableTest, ScaledMultipliesEverySigma) {
  const SigmaTable doubled = SigmaTable::Default().Scaled(2.0);
  EXPECT_DOUBLE_EQ(
      *doubled.Lookup({RegionType::kNotApplicable, GeoLevel::kState,
                       CategoryGroup::kAny}),
      900.0);
}

TEST(NoiseCalibrationTest, SampleMomentsMatchEveryStratum) {
  // The acceptance gate repeats this at 1e5 draws and 1 %.
  constexpr int kDraws = 40'000;
  const SigmaTable table = SigmaTable::Default();
  for (const auto& [stratum, sigma] : table.entries()) {
    const Category category =
        stratum.group == CategoryGroup::kAny ? Category::kAny : Category::kSafety;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      const CountKey key{WeekOf(Monday(i)), "region", stratum.level, category};
      std::mt19937_64 engine = CellEngine(17, key);
      const double noise = AddNoise(0, sigma, engine);
      sum += noise;
      sum_sq += noise * noise;
    }
    const double mean = sum / kDraws;
    const double sd = std::sqrt(sum_sq / kDraws - mean * mean);
    EXPECT_NEAR(sd, sigma, 0.02 * sigma) << StratumName(stratum);
    EXPECT_LT(std::abs(mean), 3.0 * sigma / std::sqrt(kDraws))
        << StratumName(stratum);
  }
}

TEST(NoiseTest, ZeroSigmaLeavesCountsUnchanged) {
  std::mt19937_64 engine(1);
  EXPECT_EQ(AddNoise(42, 0.0, engine), 42.0);
}

RawCountTable ExampleCounts() {
  RawCountTable table;
  const WeekId week = WeekOf(Monday(9));
  table.Add({week, "California", GeoLevel::kState, Category::kAny}, 2);
  table.Add({week, "San Benito", GeoLevel::kCounty, Category::kSafety});
  table.Add({week, "94103", GeoLevel::kPostalCode, Category::kAny});
  return table;
}

TEST(NoiseAllTest, DeterministicPerSeedAndKey) {
  const RegionRegistry registry = WorkedExampleRegistry();
  const RawCountTable table = ExampleCounts();
  auto first = NoiseAll(table, SigmaTable::Default(), registry, {.seed = 7});
  auto second = NoiseAll(table, SigmaTable::Default(), registry, {.seed = 7});
  auto other = NoiseAll(table, SigmaTable::Default(), registry, {.seed = 8});
  ASSERT_TRUE(first.ok() && second.ok() && other.ok());
  ASSERT_EQ(first->size(), 3u);
  for (size_t i = 0; i < first->size(); ++i) {
    EXPECT_EQ((*first)[i].noisy_value, (*second)[i].noisy_value);
    EXPECT_NE((*first)[i].noisy_value, (*other)[i].noisy_value);
  }
  // Cells come out in key order.
  EXPECT_EQ((*first)[0].key.region, "94103");
  EXPECT_EQ((*first)[0].region_type, RegionType::kLarge);
  EXPECT_EQ((*first)[0].sigma, 35.0);
  EXPECT_EQ((*first)[1].key.region, "California");
  EXPECT_EQ((*first)[1].sigma, 450.0);
  EXPECT_EQ((*first)[2].region_type, RegionType::kSmall);
  EXPECT_EQ((*first)[2].sigma, 3.21);
  EXPECT_FALSE((*first)[0].raw_hidden.has_value());
}

TEST(NoiseAllTest, CellValueDoesNotDependOnOtherCells) {
  const RegionRegistry registry = WorkedExampleRegistry();
  RawCountTable table = ExampleCounts();
  auto before = NoiseAll(table, SigmaTable::Default(), registry, {.seed = 7});
  table.Add({WeekOf(Monday(3)), "San Francisco", GeoLevel::kCounty, Category::kAny});
  auto after = NoiseAll(table, SigmaTable::Default(), registry, {.seed = 7});
  ASSERT_TRUE(before.ok() && after.ok());
  for (const NoisyCell& cell : *before) {
    auto it = std::find_if(after->begin(), after->end(),
                           [&](const NoisyCell& c) { return c.key == cell.key; });
    ASSERT_NE(it, after->end());
    EXPECT_EQ(it->noisy_value, cell.noisy_value);
  }
}

TEST(NoiseAllTest, SmallPostalCellIsRejected) {
  const RegionRegistry registry = WorkedExampleRegistry();
  RawCountTable table;
  table.Add({WeekOf(Monday(9)), "95023", GeoLevel::kPostalCode, Category::kAny});
  EXPECT_FALSE(NoiseAll(table, SigmaTable::Default(), registry, {}).ok());
}

TEST(NoiseAllTest, NeighbouringCellsAreUncorrelated) {
  constexpr int kDraws = 50'000;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const WeekId week = WeekOf(Monday(i));
    std::mt19937_64 a =
        CellEngine(3, {week, "San Benito", GeoLevel::kCounty, Category::kIntent});
    std::mt19937_64 b =
        CellEngine(3, {week, "San Benito", GeoLevel::kCounty, Category::kSafety});
    const double x = AddNoise(0, 1.0, a);
    const double y = AddNoise(0, 1.0, b);
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double correlation = sxy / std::sqrt(sxx * syy);
  EXPECT_LT(std::abs(correlation), 4.0 / std::sqrt(kDraws));
}

TEST(NoiseAllTest, EmptyCellsOptionFillsEveryReleasableKey) {
  const RegionRegistry registry = WorkedExampleRegistry();
  const RawCountTable table = ExampleCounts();
  auto sparse = NoiseAll(table, SigmaTable::Default(), registry, {.seed = 1});
  NoiseOptions options;
  options.seed = 1;
  options.noise_empty_cells = true;
  auto dense = NoiseAll(table, SigmaTable::Default(), registry, options);
  ASSERT_TRUE(sparse.ok() && dense.ok()) << dense.status();
  // One week; California, two counties and 94103 (95023 is Small), four
  // categories each.
  EXPECT_EQ(dense->size(), 16u);
  for (const NoisyCell& cell : *dense) {
    EXPECT_NE(cell.key.region, "95023");
  }
  // Observed cells keep their values.
  for (const NoisyCell& cell : *sparse) {
    auto it = std::find_if(dense->begin(), dense->end(),
                           [&](const NoisyCell& c) { return c.key == cell.key; });
    ASSERT_NE(it, dense->end());
    EXPECT_EQ(it->noisy_value, cell.noisy_value);
  }
}

TEST(AuditedRawCountTest, CountsReads) {
  AuditedRawCount::ResetReads();
  const AuditedRawCount raw(5);
  EXPECT_EQ(raw.Read(), 5);
  EXPECT_EQ(raw.Read(), 5);
  EXPECT_EQ(AuditedRawCount::TotalReads(), 2);
  AuditedRawCount::ResetReads();
  EXPECT_EQ(AuditedRawCount::TotalReads(), 0);
}

}  // namespace
}  // namespace dpagg

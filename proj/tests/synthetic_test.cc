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

#include "dpagg/synthetic.h"

#include <set>

#include "gtest/gtest.h"

namespace dpagg {
namespace {

TEST(SyntheticRegistryTest, DefaultShape) {
  auto registry = GenerateSyntheticRegistry({});
  ASSERT_TRUE(registry.ok()) << registry.status();
  EXPECT_EQ(registry->RecordsAt(GeoLevel::kState).size(), 2u);
  EXPECT_EQ(registry->RecordsAt(GeoLevel::kCounty).size(), 6u);
  EXPECT_EQ(registry->RecordsAt(GeoLevel::kPostalCode).size(), 12u);
  EXPECT_EQ(*registry->TypeOf("ST01C01"), RegionType::kSmall);
  EXPECT_EQ(*registry->TypeOf("ST01C02"), RegionType::kMedium);
  EXPECT_EQ(*registry->TypeOf("ST01C03"), RegionType::kLarge);
  EXPECT_EQ(*registry->CountryOf("ST02"), "US");
}

TEST(SyntheticRegistryTest, InadmissiblePostalCodes) {
  SyntheticRegistryParams params;
  params.inadmissible_postal_every = 3;
  auto registry = GenerateSyntheticRegistry(params);
  ASSERT_TRUE(registry.ok());
  int inadmissible = 0;
  for (const RegionRecord* r : registry->RecordsAt(GeoLevel::kPostalCode)) {
    inadmissible += !Admissible(*r);
  }
  EXPECT_EQ(inadmissible, 4);
}

TEST(SyntheticEventsTest, OneUserDailyIntent) {
  SyntheticRegistryParams registry_params;
  registry_params.states = 1;
  registry_params.counties_per_state = 1;
  registry_params.postal_codes_per_county = 1;
  registry_params.county_populations = {100};
  auto registry = GenerateSyntheticRegistry(registry_params);
  ASSERT_TRUE(registry.ok());
  SyntheticCorpusParams params;
  params.users_per_capita = 0.01;
  params.rate_none = 0.0;
  params.rate_intent = 1.0;
  params.rate_safety = 0.0;
  params.rate_other = 0.0;
  auto events = GenerateSyntheticEvents(*registry, params);
  ASSERT_TRUE(events.ok()) << events.status();
  ASSERT_EQ(events->size(), 7u);
  std::set<Date> days;
  for (const SearchEvent& e : *events) {
    EXPECT_EQ(e.label, Label::kIntent);
    EXPECT_EQ(e.postal_code, "ST01C01P01");
    days.insert(e.date);
  }
  EXPECT_EQ(days.size(), 7u);
}

TEST(SyntheticEventsTest, DeterministicForSeed) {
  auto registry = GenerateSyntheticRegistry({});
  ASSERT_TRUE(registry.ok());
  SyntheticCorpusParams params;
  params.seed = 9;
  params.travel_rate = 0.1;
  auto a = GenerateSyntheticEvents(*registry, params);
  auto b = GenerateSyntheticEvents(*registry, params);
  params.seed = 10;
  auto c = GenerateSyntheticEvents(*registry, params);
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  EXPECT_FALSE(a->empty());
  EXPECT_EQ(*a, *b);
  EXPECT_NE(*a, *c);
}

TEST(SyntheticEventsTest, RejectsBadRates) {
  auto registry = GenerateSyntheticRegistry({});
  ASSERT_TRUE(registry.ok());
  SyntheticCorpusParams params;
  params.rate_intent = 1.5;
  EXPECT_FALSE(GenerateSyntheticEvents(*registry, params).ok());
}

}  // namespace
}  // namespace dpagg

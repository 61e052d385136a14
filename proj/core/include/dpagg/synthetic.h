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

// Synthetic registries and search logs for tests, benchmarks and demos.

#ifndef DPAGG_SYNTHETIC_H_
#define DPAGG_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpagg/geo.h"
#include "dpagg/model.h"

namespace dpagg {

struct SyntheticRegistryParams {
  std::string country = "US";
  int states = 2;
  int counties_per_state = 3;
  int postal_codes_per_county = 2;
  // Assigned to counties round-robin. The default cycles Small, Medium and
  // Large.
  std::vector<int64_t> county_populations = {60'000, 250'000, 900'000};
  double postal_area_km2 = 10.0;
  // Every n-th postal code gets an area below the admissibility threshold;
  // zero disables.
  int inadmissible_postal_every = 0;
};

absl::StatusOr<RegionRegistry> GenerateSyntheticRegistry(
    const SyntheticRegistryParams& params);

struct SyntheticCorpusParams {
  Date first_day = Date{std::chrono::year{2021} / 1 / 4};
  int weeks = 1;
  // Users per county = round(population * users_per_capita).
  double users_per_capita = 0.01;
  // Daily Bernoulli rate, per user, of one search with each label.
  double rate_none = 0.9;
  double rate_intent = 0.05;
  double rate_safety = 0.05;
  double rate_other = 0.05;
  // Probability that a search is issued from a random postal code instead of
  // the user's home postal code.
  double travel_rate = 0.0;
  uint64_t seed = 0;
};

// Events ordered by day, then user. Each user-day is drawn independently.
absl::StatusOr<std::vector<SearchEvent>> GenerateSyntheticEvents(
    const RegionRegistry& registry, const SyntheticCorpusParams& params);

}  // namespace dpagg

#endif  // DPAGG_SYNTHETIC_H_

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

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "str_util.h"

namespace dpagg {

namespace {

std::string Numbered(std::string_view prefix, int n) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%02d", n);
  return internal::StrCat(prefix, buffer);
}

}  // namespace

absl::StatusOr<RegionRegistry> GenerateSyntheticRegistry(
    const SyntheticRegistryParams& params) {
  if (params.states <= 0 || params.counties_per_state <= 0 ||
      params.postal_codes_per_county < 0 || params.county_populations.empty()) {
    return absl::InvalidArgumentError(
        "synthetic registry needs states, counties and populations");
  }
  std::vector<RegionRecord> records;
  int county_index = 0;
  int postal_index = 0;
  for (int s = 1; s <= params.states; ++s) {
    const std::string state = Numbered("ST", s);
    records.push_back({state, GeoLevel::kState, params.country, std::nullopt,
                       50'000.0, std::nullopt});
    for (int c = 1; c <= params.counties_per_state; ++c) {
      const std::string county = internal::StrCat(state, Numbered("C", c));
      const int64_t population =
          params.county_populations[county_index++ %
                                    params.county_populations.size()];
      records.push_back({county, GeoLevel::kCounty, state, population, 1'000.0,
                         std::nullopt});
      for (int p = 1; p <= params.postal_codes_per_county; ++p) {
        ++postal_index;
        const bool inadmissible = params.inadmissible_postal_every > 0 &&
                                  postal_index % params.inadmissible_postal_every == 0;
        records.push_back({internal::StrCat(county, Numbered("P", p)),
                           GeoLevel::kPostalCode, county, std::nullopt,
                           inadmissible ? 1.0 : params.postal_area_km2,
                           std::nullopt});
      }
    }
  }
  return RegionRegistry::Create(std::move(records));
}

absl::StatusOr<std::vector<SearchEvent>> GenerateSyntheticEvents(
    const RegionRegistry& registry, const SyntheticCorpusParams& params) {
  const std::array<double, 4> rates = {params.rate_none, params.rate_intent,
                                       params.rate_safety, params.rate_other};
  for (double rate : rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      return absl::InvalidArgumentError("search rates must lie in [0, 1]");
    }
  }
  if (!(params.travel_rate >= 0.0 && params.travel_rate <= 1.0)) {
    return absl::InvalidArgumentError("travel rate must lie in [0, 1]");
  }
  if (params.weeks < 0 || !(params.users_per_capita >= 0.0)) {
    return absl::InvalidArgumentError("weeks and users per capita must be >= 0");
  }

  std::map<std::string, std::vector<std::string>> postal_by_county;
  std::vector<std::string> all_postal;
  for (const RegionRecord* postal : registry.RecordsAt(GeoLevel::kPostalCode)) {
    postal_by_county[*postal->parent_id].push_back(postal->region_id);
    all_postal.push_back(postal->region_id);
  }

  struct User {
    std::string id;
    const std::string* home;
  };
  std::vector<User> users;
  for (const RegionRecord* county : registry.RecordsAt(GeoLevel::kCounty)) {
    const auto count = static_cast<int64_t>(
        std::llround(static_cast<double>(*county->population) *
                     params.users_per_capita));
    if (count == 0) continue;
    auto it = postal_by_county.find(county->region_id);
    if (it == postal_by_county.end()) {
      return absl::InvalidArgumentError(internal::StrCat(
          "county '", county->region_id, "' has users but no postal codes"));
    }
    for (int64_t u = 0; u < count; ++u) {
      users.push_back({internal::StrCat(county->region_id, "-u", u),
                       &it->second[static_cast<size_t>(u) % it->second.size()]});
    }
  }

  constexpr std::array<Label, 4> kLabels = {Label::kNone, Label::kIntent,
                                            Label::kSafety, Label::kOther};
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<size_t> pick_postal(
      0, all_postal.empty() ? 0 : all_postal.size() - 1);

  std::vector<SearchEvent> events;
  const int days = params.weeks * 7;
  for (int d = 0; d < days; ++d) {
    const Date date = params.first_day + std::chrono::days{d};
    for (const User& user : users) {
      for (size_t l = 0; l < kLabels.size(); ++l) {
        if (unit(rng) >= rates[l]) continue;
        const std::string* postal = user.home;
        if (params.travel_rate > 0.0 && unit(rng) < params.travel_rate) {
          postal = &all_postal[pick_postal(rng)];
        }
        events.push_back(SearchEvent{user.id, date, *postal, kLabels[l]});
      }
    }
  }
  return events;
}

}  // namespace dpagg

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

#include "dpagg/geo.h"

#include <set>

#include "absl/status/status.h"
#include "str_util.h"
#include "csv_util.h"
#include "dpagg/status_macros.h"

namespace dpagg {

namespace {

constexpr std::string_view kRegistryHeader =
    "region_id,level,parent_id,population,area_km2,address_share_county";

absl::Status ExpectParentLevel(
    const std::map<std::string, RegionRecord, std::less<>>& records,
    const RegionRecord& record, GeoLevel parent_level) {
  if (!record.parent_id.has_value() || record.parent_id->empty()) {
    return absl::InvalidArgumentError(
        internal::StrCat(GeoLevelName(record.level), " '", record.region_id,
                     "' has no parent"));
  }
  auto it = records.find(*record.parent_id);
  if (it == records.end()) {
    return absl::InvalidArgumentError(
        internal::StrCat("broken parent chain: '", record.region_id,
                     "' points to unknown region '", *record.parent_id, "'"));
  }
  if (it->second.level != parent_level) {
    return absl::InvalidArgumentError(internal::StrCat(
        "'", record.region_id, "' has parent '", *record.parent_id,
        "' at level ", GeoLevelName(it->second.level), ", expected ",
        GeoLevelName(parent_level)));
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view RegionTypeName(RegionType type) {
  switch (type) {
    case RegionType::kSmall:
      return "small";
    case RegionType::kMedium:
      return "medium";
    case RegionType::kLarge:
      return "large";
    case RegionType::kNotApplicable:
      return "na";
  }
  return "?";
}

RegionType CountyType(int64_t population) {
  if (population < kSmallCountyLimit) return RegionType::kSmall;
  if (population <= kLargeCountyLimit) return RegionType::kMedium;
  return RegionType::kLarge;
}

bool Admissible(const RegionRecord& region) {
  return region.area_km2 >= kMinimumRegionAreaKm2;
}

absl::StatusOr<RegionRegistry> RegionRegistry::Create(
    std::vector<RegionRecord> records) {
  std::map<std::string, RegionRecord, std::less<>> by_id;
  for (RegionRecord& record : records) {
    if (record.region_id.empty()) {
      return absl::InvalidArgumentError("region with empty id");
    }
    if (record.level == GeoLevel::kCountry) {
      return absl::InvalidArgumentError(internal::StrCat(
          "'", record.region_id, "': country regions are derived, not listed"));
    }
    if (!(record.area_km2 >= 0.0)) {
      return absl::InvalidArgumentError(
          internal::StrCat("'", record.region_id, "' has negative area"));
    }
    if (record.population.has_value() && *record.population < 0) {
      return absl::InvalidArgumentError(
          internal::StrCat("'", record.region_id, "' has negative population"));
    }
    std::string id = record.region_id;
    if (by_id.contains(id)) {
      return absl::InvalidArgumentError(
          internal::StrCat("duplicate region id '", id, "'"));
    }
    by_id.emplace(std::move(id), std::move(record));
  }

  for (const auto& [id, record] : by_id) {
    switch (record.level) {
      case GeoLevel::kPostalCode:
        RETURN_IF_ERROR(ExpectParentLevel(by_id, record, GeoLevel::kCounty));
        if (record.address_share_county.has_value()) {
          auto it = by_id.find(*record.address_share_county);
          if (it == by_id.end() || it->second.level != GeoLevel::kCounty) {
            return absl::InvalidArgumentError(
                internal::StrCat("postal code '", id,
                             "' has address share county '",
                             *record.address_share_county,
                             "' which is not a known county"));
          }
        }
        break;
      case GeoLevel::kCounty:
        RETURN_IF_ERROR(ExpectParentLevel(by_id, record, GeoLevel::kState));
        if (!record.population.has_value()) {
          return absl::InvalidArgumentError(
              internal::StrCat("county '", id, "' has no population"));
        }
        break;
      case GeoLevel::kState:
        if (!record.parent_id.has_value() || record.parent_id->empty()) {
          return absl::InvalidArgumentError(
              internal::StrCat("state '", id, "' has no parent country"));
        }
        if (by_id.contains(*record.parent_id)) {
          return absl::InvalidArgumentError(
              internal::StrCat("state '", id, "' has parent '", *record.parent_id,
                           "' which is a listed region, expected a country"));
        }
        break;
      case GeoLevel::kCountry:
        break;
    }
  }
  return RegionRegistry(std::move(by_id));
}

absl::StatusOr<RegionRegistry> RegionRegistry::ParseCsv(std::string_view text) {
  std::vector<RegionRecord> records;
  const std::vector<std::string_view> lines = internal::SplitLines(text);
  if (lines.empty() ||
      internal::StripCarriageReturn(lines.front()) != kRegistryHeader) {
    return absl::InvalidArgumentError(
        internal::StrCat("registry header must be '", kRegistryHeader, "'"));
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    if (internal::IsBlank(lines[i])) continue;
    const std::vector<std::string_view> fields = internal::SplitFields(lines[i]);
    const std::string where = internal::StrCat("registry line ", i + 1, ": ");
    if (fields.size() != 6) {
      return absl::InvalidArgumentError(
          internal::StrCat(where, "expected 6 fields, got ", fields.size()));
    }
    RegionRecord record;
    record.region_id = std::string(fields[0]);
    auto level = ParseGeoLevel(fields[1]);
    if (!level.ok() || *level == GeoLevel::kCountry) {
      return absl::InvalidArgumentError(
          internal::StrCat(where, "level must be postal_code, county or state"));
    }
    record.level = *level;
    if (!fields[2].empty()) record.parent_id = std::string(fields[2]);
    if (!fields[3].empty()) {
      int64_t population = 0;
      if (!internal::ParseNumber(fields[3], population)) {
        return absl::InvalidArgumentError(
            internal::StrCat(where, "bad population '", fields[3], "'"));
      }
      record.population = population;
    }
    if (!internal::ParseNumber(fields[4], record.area_km2)) {
      return absl::InvalidArgumentError(
          internal::StrCat(where, "bad area '", fields[4], "'"));
    }
    if (!fields[5].empty()) record.address_share_county = std::string(fields[5]);
    records.push_back(std::move(record));
  }
  return Create(std::move(records));
}

absl::StatusOr<RegionRegistry> RegionRegistry::LoadCsv(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, internal::ReadFile(path));
  return ParseCsv(text);
}

std::string RegionRegistry::ToCsv() const {
  std::string out = internal::StrCat(kRegistryHeader, "\n");
  for (const auto& [id, r] : records_) {
    internal::StrAppend(&out, id, ",", GeoLevelName(r.level), ",",
                    r.parent_id.value_or(""), ",",
                    r.population ? internal::StrCat(*r.population) : "", ",",
                    internal::FormatDouble(r.area_km2), ",",
                    r.address_share_county.value_or(""), "\n");
  }
  return out;
}

const RegionRecord* RegionRegistry::Find(std::string_view region_id) const {
  auto it = records_.find(region_id);
  return it == records_.end() ? nullptr : &it->second;
}

absl::StatusOr<RegionType> RegionRegistry::PostalType(
    std::string_view postal_code) const {
  const RegionRecord* postal = Find(postal_code);
  if (postal == nullptr || postal->level != GeoLevel::kPostalCode) {
    return absl::NotFoundError(
        internal::StrCat("unknown postal code '", postal_code, "'"));
  }
  const std::string& county_id =
      postal->address_share_county.value_or(*postal->parent_id);
  const RegionRecord* county = Find(county_id);
  if (county == nullptr || !county->population.has_value()) {
    return absl::InternalError(
        internal::StrCat("postal code '", postal_code, "' has no typed county"));
  }
  return CountyType(*county->population);
}

absl::StatusOr<RegionType> RegionRegistry::TypeOf(
    std::string_view region_id) const {
  const RegionRecord* record = Find(region_id);
  if (record == nullptr) {
    return absl::NotFoundError(internal::StrCat("unknown region '", region_id, "'"));
  }
  switch (record->level) {
    case GeoLevel::kPostalCode:
      return PostalType(region_id);
    case GeoLevel::kCounty:
      return CountyType(*record->population);
    case GeoLevel::kState:
    case GeoLevel::kCountry:
      return RegionType::kNotApplicable;
  }
  return RegionType::kNotApplicable;
}

absl::StatusOr<RegionPath> RegionRegistry::Resolve(
    std::string_view postal_code) const {
  const RegionRecord* postal = Find(postal_code);
  if (postal == nullptr || postal->level != GeoLevel::kPostalCode) {
    return absl::NotFoundError(
        internal::StrCat("unknown postal code '", postal_code, "'"));
  }
  const RegionRecord* county = postal->parent_id ? Find(*postal->parent_id) : nullptr;
  if (county == nullptr || county->level != GeoLevel::kCounty) {
    return absl::InternalError(
        internal::StrCat("broken parent chain at postal code '", postal_code, "'"));
  }
  const RegionRecord* state = county->parent_id ? Find(*county->parent_id) : nullptr;
  if (state == nullptr || state->level != GeoLevel::kState) {
    return absl::InternalError(
        internal::StrCat("broken parent chain at county '", county->region_id, "'"));
  }
  return RegionPath{postal->region_id, county->region_id, state->region_id};
}

absl::StatusOr<std::string> RegionRegistry::CountryOf(
    std::string_view state_id) const {
  const RegionRecord* state = Find(state_id);
  if (state == nullptr || state->level != GeoLevel::kState) {
    return absl::NotFoundError(internal::StrCat("unknown state '", state_id, "'"));
  }
  return *state->parent_id;
}

std::vector<const RegionRecord*> RegionRegistry::Records() const {
  std::vector<const RegionRecord*> out;
  out.reserve(records_.size());
  for (const auto& [id, record] : records_) out.push_back(&record);
  return out;
}

std::vector<const RegionRecord*> RegionRegistry::RecordsAt(GeoLevel level) const {
  std::vector<const RegionRecord*> out;
  for (const auto& [id, record] : records_) {
    if (record.level == level) out.push_back(&record);
  }
  return out;
}

std::vector<std::string> RegionRegistry::Countries() const {
  std::set<std::string> countries;
  for (const auto& [id, record] : records_) {
    if (record.level == GeoLevel::kState) countries.insert(*record.parent_id);
  }
  return {countries.begin(), countries.end()};
}

}  // namespace dpagg

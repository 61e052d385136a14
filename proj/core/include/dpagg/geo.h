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

#ifndef DPAGG_GEO_H_
#define DPAGG_GEO_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpagg/model.h"

namespace dpagg {

// Population class of a county; postal codes inherit the class of their
// county. States and countries are kNotApplicable.
enum class RegionType { kSmall = 0, kMedium = 1, kLarge = 2, kNotApplicable = 3 };

std::string_view RegionTypeName(RegionType type);

inline constexpr int64_t kSmallCountyLimit = 100'000;
inline constexpr int64_t kLargeCountyLimit = 500'000;
inline constexpr double kMinimumRegionAreaKm2 = 3.0;

// Below 100,000 is Small, above 500,000 is Large. Both boundary values are
// Medium.
RegionType CountyType(int64_t population);

struct RegionRecord {
  std::string region_id;
  GeoLevel level = GeoLevel::kState;
  std::optional<std::string> parent_id;
  std::optional<int64_t> population;  // Counties only.
  double area_km2 = 0.0;
  // Postal codes spanning several counties: the county holding most of the
  // postal code's addresses.
  std::optional<std::string> address_share_county;
};

// Only regions of at least 3 km^2 get their own cells.
bool Admissible(const RegionRecord& region);

struct RegionPath {
  std::string postal;
  std::string county;
  std::string state;

  friend bool operator==(const RegionPath&, const RegionPath&) = default;
};

// Immutable postal code -> county -> state -> country hierarchy.
class RegionRegistry {
 public:
  // Validates the hierarchy: every postal code has a county parent, every
  // county a state parent and a population, every state a country parent.
  static absl::StatusOr<RegionRegistry> Create(std::vector<RegionRecord> records);

  // Header: region_id,level,parent_id,population,area_km2,address_share_county
  static absl::StatusOr<RegionRegistry> ParseCsv(std::string_view text);
  static absl::StatusOr<RegionRegistry> LoadCsv(const std::string& path);
  std::string ToCsv() const;

  const RegionRecord* Find(std::string_view region_id) const;

  absl::StatusOr<RegionType> PostalType(std::string_view postal_code) const;
  // Type of any region: county class, inherited class for postal codes,
  // kNotApplicable otherwise.
  absl::StatusOr<RegionType> TypeOf(std::string_view region_id) const;
  absl::StatusOr<RegionPath> Resolve(std::string_view postal_code) const;
  absl::StatusOr<std::string> CountryOf(std::string_view state_id) const;

  // Records in region_id order.
  std::vector<const RegionRecord*> Records() const;
  std::vector<const RegionRecord*> RecordsAt(GeoLevel level) const;
  std::vector<std::string> Countries() const;

  size_t size() const { return records_.size(); }

 private:
  explicit RegionRegistry(std::map<std::string, RegionRecord, std::less<>> records)
      : records_(std::move(records)) {}

  std::map<std::string, RegionRecord, std::less<>> records_;
};

}  // namespace dpagg

#endif  // DPAGG_GEO_H_

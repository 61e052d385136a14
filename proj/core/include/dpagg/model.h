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

// Shared vocabulary for every stage of the aggregation pipeline: search
// events, query categories, ISO weeks, geographic levels and count keys.

#ifndef DPAGG_MODEL_H_
#define DPAGG_MODEL_H_

#include <array>
#include <chrono>
#include <compare>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace dpagg {

// Calendar day as already localized by the log producer. No timezone
// arithmetic is ever applied to it.
using Date = std::chrono::sys_days;

absl::StatusOr<Date> ParseDate(std::string_view iso_date);
std::string FormatDate(Date date);

// Vaccine-related classification attached to a query. kNone still counts
// towards the all-queries category.
enum class Label { kNone, kIntent, kSafety, kOther };

absl::StatusOr<Label> ParseLabel(std::string_view text);
std::string_view LabelName(Label label);

// Mutually exclusive categories used for counting. kAny holds every query;
// the three vaccine categories partition the vaccine-related ones.
enum class Category { kAny = 0, kIntent = 1, kSafety = 2, kOther = 3 };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::kAny, Category::kIntent, Category::kSafety, Category::kOther};

std::string_view CategoryName(Category category);
absl::StatusOr<Category> ParseCategory(std::string_view text);

// Categories published in the release. kVaccination is the union of the
// three vaccine counting categories.
enum class ReleasedCategory { kIntent = 0, kSafety = 1, kVaccination = 2 };

std::string_view ReleasedCategoryName(ReleasedCategory category);

// kCountry only exists after post-processing; it never receives noise.
enum class GeoLevel { kCountry = 0, kState = 1, kCounty = 2, kPostalCode = 3 };

std::string_view GeoLevelName(GeoLevel level);
absl::StatusOr<GeoLevel> ParseGeoLevel(std::string_view text);

struct SearchEvent {
  std::string user_id;
  Date date;
  std::string postal_code;
  Label label = Label::kNone;

  friend bool operator==(const SearchEvent&, const SearchEvent&) = default;
};

// Counting category of a labeled query, or kAny for unlabeled ones.
Category CategoryOf(Label label);

// ISO-8601 week. `monday` is always derived from (iso_year, iso_week).
struct WeekId {
  int iso_year = 0;
  int iso_week = 0;
  Date monday;

  friend auto operator<=>(const WeekId&, const WeekId&) = default;
};

WeekId WeekOf(Date date);
absl::StatusOr<WeekId> MakeWeekId(int iso_year, int iso_week);

// <week, region, category> cell at one geographic level.
struct CountKey {
  WeekId week;
  std::string region;
  GeoLevel level = GeoLevel::kState;
  Category category = Category::kAny;

  friend auto operator<=>(const CountKey&, const CountKey&) = default;
};

std::string DebugString(const CountKey& key);

}  // namespace dpagg

#endif  // DPAGG_MODEL_H_

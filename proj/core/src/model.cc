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

#include "dpagg/model.h"

#include <charconv>
#include <cstdio>

#include "absl/status/status.h"
#include "str_util.h"

namespace dpagg {

namespace {

using std::chrono::day;
using std::chrono::days;
using std::chrono::month;
using std::chrono::year;
using std::chrono::year_month_day;

bool ParseInt(std::string_view text, int& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

absl::StatusOr<Date> ParseDate(std::string_view iso_date) {
  // YYYY-MM-DD only.
  if (iso_date.size() != 10 || iso_date[4] != '-' || iso_date[7] != '-') {
    return absl::InvalidArgumentError(
        internal::StrCat("expected YYYY-MM-DD date, got '", iso_date, "'"));
  }
  int y = 0, m = 0, d = 0;
  if (!ParseInt(iso_date.substr(0, 4), y) || !ParseInt(iso_date.substr(5, 2), m) ||
      !ParseInt(iso_date.substr(8, 2), d)) {
    return absl::InvalidArgumentError(
        internal::StrCat("malformed date '", iso_date, "'"));
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    return absl::InvalidArgumentError(
        internal::StrCat("invalid calendar date '", iso_date, "'"));
  }
  return Date{ymd};
}

std::string FormatDate(Date date) {
  const year_month_day ymd{date};
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buffer;
}

absl::StatusOr<Label> ParseLabel(std::string_view text) {
  if (text == "none") return Label::kNone;
  if (text == "A1") return Label::kIntent;
  if (text == "A2") return Label::kSafety;
  if (text == "A3") return Label::kOther;
  return absl::InvalidArgumentError(internal::StrCat("unknown label '", text, "'"));
}

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kNone:
      return "none";
    case Label::kIntent:
      return "A1";
    case Label::kSafety:
      return "A2";
    case Label::kOther:
      return "A3";
  }
  return "?";
}

std::string_view CategoryName(Category category) {
  switch (category) {
    case Category::kAny:
      return "A0";
    case Category::kIntent:
      return "A1";
    case Category::kSafety:
      return "A2";
    case Category::kOther:
      return "A3";
  }
  return "?";
}

absl::StatusOr<Category> ParseCategory(std::string_view text) {
  for (Category c : kAllCategories) {
    if (CategoryName(c) == text) return c;
  }
  return absl::InvalidArgumentError(
      internal::StrCat("unknown category '", text, "'"));
}

std::string_view ReleasedCategoryName(ReleasedCategory category) {
  switch (category) {
    case ReleasedCategory::kIntent:
      return "C1";
    case ReleasedCategory::kSafety:
      return "C2";
    case ReleasedCategory::kVaccination:
      return "C3";
  }
  return "?";
}

std::string_view GeoLevelName(GeoLevel level) {
  switch (level) {
    case GeoLevel::kCountry:
      return "country";
    case GeoLevel::kState:
      return "state";
    case GeoLevel::kCounty:
      return "county";
    case GeoLevel::kPostalCode:
      return "postal_code";
  }
  return "?";
}

absl::StatusOr<GeoLevel> ParseGeoLevel(std::string_view text) {
  if (text == "state") return GeoLevel::kState;
  if (text == "county") return GeoLevel::kCounty;
  if (text == "postal_code") return GeoLevel::kPostalCode;
  if (text == "country") return GeoLevel::kCountry;
  return absl::InvalidArgumentError(
      internal::StrCat("unknown geographic level '", text, "'"));
}

Category CategoryOf(Label label) {
  switch (label) {
    case Label::kNone:
      return Category::kAny;
    case Label::kIntent:
      return Category::kIntent;
    case Label::kSafety:
      return Category::kSafety;
    case Label::kOther:
      return Category::kOther;
  }
  return Category::kAny;
}

WeekId WeekOf(Date date) {
  const std::chrono::weekday wd{date};
  const Date monday = date - days{wd.iso_encoding() - 1};
  // The ISO year is the calendar year of the week's Thursday.
  const Date thursday = monday + days{3};
  const year iso_year = year_month_day{thursday}.year();
  const Date jan1 = Date{iso_year / 1 / 1};
  const int week = static_cast<int>((thursday - jan1).count() / 7) + 1;
  return WeekId{static_cast<int>(iso_year), week, monday};
}

absl::StatusOr<WeekId> MakeWeekId(int iso_year, int iso_week) {
  if (iso_week < 1 || iso_week > 53) {
    return absl::InvalidArgumentError(
        internal::StrCat("ISO week out of range: ", iso_week));
  }
  // January 4th always lies in ISO week 1.
  const Date jan4 = Date{year{iso_year} / 1 / 4};
  const WeekId first = WeekOf(jan4);
  const WeekId result = WeekOf(first.monday + days{7 * (iso_week - 1)});
  if (result.iso_year != iso_year || result.iso_week != iso_week) {
    return absl::InvalidArgumentError(
        internal::StrCat(iso_year, " has no ISO week ", iso_week));
  }
  return result;
}

std::string DebugString(const CountKey& key) {
  return internal::StrCat("<", key.week.iso_year, "-W", key.week.iso_week, ", ",
                      CategoryName(key.category), ", ", key.region, "@",
                      GeoLevelName(key.level), ">");
}

}  // namespace dpagg

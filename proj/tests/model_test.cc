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

#include <ctime>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dpagg {
namespace {

using ::std::chrono::days;
using ::std::chrono::year;

Date D(int y, unsigned m, unsigned d) {
  return Date{year{y} / static_cast<int>(m) / static_cast<int>(d)};
}

// ISO year and week as the C library computes them.
std::pair<int, int> LibcIsoWeek(Date date) {
  const std::time_t seconds =
      static_cast<std::time_t>(date.time_since_epoch().count()) * 86400;
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buffer[16];
  std::strftime(buffer, sizeof(buffer), "%G %V", &tm);
  int iso_year = 0;
  int iso_week = 0;
  std::sscanf(buffer, "%d %d", &iso_year, &iso_week);
  return {iso_year, iso_week};
}

TEST(DateTest, ParseAndFormatRoundTrip) {
  auto date = ParseDate("2021-03-09");
  ASSERT_TRUE(date.ok()) << date.status();
  EXPECT_EQ(*date, D(2021, 3, 9));
  EXPECT_EQ(FormatDate(*date), "2021-03-09");
}

TEST(DateTest, RejectsMalformedDates) {
  for (const char* text : {"", "2021-3-9", "2021/03/09", "2021-02-30",
                           "2021-13-01", "abcd-ef-gh", "2021-03-09x"}) {
    EXPECT_FALSE(ParseDate(text).ok()) << text;
  }
}

TEST(LabelTest, ParsesKnownLabels) {
  EXPECT_EQ(*ParseLabel("none"), Label::kNone);
  EXPECT_EQ(*ParseLabel("A1"), Label::kIntent);
  EXPECT_EQ(*ParseLabel("A2"), Label::kSafety);
  EXPECT_EQ(*ParseLabel("A3"), Label::kOther);
  EXPECT_FALSE(ParseLabel("A0").ok());
  EXPECT_FALSE(ParseLabel("A4").ok());
}

TEST(LabelTest, CategoryOfLabel) {
  EXPECT_EQ(CategoryOf(Label::kIntent), Category::kIntent);
  EXPECT_EQ(CategoryOf(Label::kSafety), Category::kSafety);
  EXPECT_EQ(CategoryOf(Label::kOther), Category::kOther);
}

TEST(WeekTest, MidMarch2021) {
  const WeekId week = WeekOf(D(2021, 3, 9));
  EXPECT_EQ(week.iso_year, 2021);
  EXPECT_EQ(week.iso_week, 10);
  EXPECT_EQ(week.monday, D(2021, 3, 8));
  EXPECT_EQ(WeekOf(D(2021, 3, 11)), week);
}

TEST(WeekTest, NewYearBelongsToPreviousIsoYear) {
  const WeekId week = WeekOf(D(2021, 1, 1));
  EXPECT_EQ(week.iso_year, 2020);
  EXPECT_EQ(week.iso_week, 53);
  EXPECT_EQ(week.monday, D(2020, 12, 28));
}

TEST(WeekTest, MatchesLibcOverTwentyYears) {
  for (Date date = D(2010, 1, 1); date < D(2030, 1, 1); date += days{1}) {
    const WeekId week = WeekOf(date);
    const auto [iso_year, iso_week] = LibcIsoWeek(date);
    ASSERT_EQ(week.iso_year, iso_year) << FormatDate(date);
    ASSERT_EQ(week.iso_week, iso_week) << FormatDate(date);
    ASSERT_EQ(std::chrono::weekday{week.monday}, std::chrono::Monday);
    ASSERT_LE(week.monday, date);
    ASSERT_GT(week.monday + days{7}, date);
  }
}

TEST(WeekTest, MakeWeekIdInvertsWeekOf) {
  for (Date date = D(2015, 1, 1); date < D(2025, 1, 1); date += days{7}) {
    const WeekId week = WeekOf(date);
    auto made = MakeWeekId(week.iso_year, week.iso_week);
    ASSERT_TRUE(made.ok()) << made.status();
    EXPECT_EQ(*made, week);
  }
  EXPECT_TRUE(MakeWeekId(2020, 53).ok());
  EXPECT_FALSE(MakeWeekId(2021, 53).ok());
  EXPECT_FALSE(MakeWeekId(2021, 0).ok());
}

TEST(CountKeyTest, OrdersByWeekFirst) {
  const CountKey early{WeekOf(D(2021, 3, 1)), "Z", GeoLevel::kPostalCode,
                       Category::kOther};
  const CountKey late{WeekOf(D(2021, 3, 8)), "A", GeoLevel::kCountry,
                      Category::kAny};
  EXPECT_LT(early, late);
  EXPECT_THAT(DebugString(late), ::testing::HasSubstr("2021-W10"));
}

}  // namespace
}  // namespace dpagg

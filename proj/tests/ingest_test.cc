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

#include "dpagg/ingest.h"

#include <filesystem>
#include <string>

#include "gtest/gtest.h"

namespace dpagg {
namespace {

TEST(ParseEventLineTest, ValidLine) {
  auto event = ParseEventLine("u1,2021-03-09,95023,A2");
  ASSERT_TRUE(event.ok()) << event.status();
  EXPECT_EQ(event->user_id, "u1");
  EXPECT_EQ(FormatDate(event->date), "2021-03-09");
  EXPECT_EQ(event->postal_code, "95023");
  EXPECT_EQ(event->label, Label::kSafety);
}

TEST(ParseEventLineTest, MalformedLines) {
  for (const char* line : {"u1,2021-03-09,95023", "u1,2021-03-09,95023,A2,x",
                           ",2021-03-09,95023,A2", "u1,2021-03-32,95023,A2",
                           "u1,2021-03-09,,A2", "u1,2021-03-09,95023,A5"}) {
    EXPECT_FALSE(ParseEventLine(line).ok()) << line;
  }
}

TEST(ParseEventsCsvTest, CountsMalformedLinesAndSkipsBlanks) {
  const std::string text =
      "user_id,date,postal_code,label\r\n"
      "u1,2021-03-09,94103,none\r\n"
      "\n"
      "u1,2021-03-09,95023,A2\n"
      "garbage\n";
  auto result = ParseEventsCsv(text);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_EQ(result->lines, 3);
  EXPECT_EQ(result->malformed, 1);
  ASSERT_EQ(result->events.size(), 2u);
  EXPECT_EQ(result->events[0].label, Label::kNone);
}

TEST(ParseEventsCsvTest, StrictModeFailsAboveThreshold) {
  std::string text = "user_id,date,postal_code,label\n";
  for (int i = 0; i < 99; ++i) text += "u,2021-03-09,1,A1\n";
  text += "bad\n";
  EXPECT_TRUE(ParseEventsCsv(text, {.strict = true}).ok());
  text += "bad\n";
  EXPECT_FALSE(ParseEventsCsv(text, {.strict = true}).ok());
  EXPECT_TRUE(ParseEventsCsv(text, {.strict = false}).ok());
}

TEST(ParseEventsCsvTest, HeaderRequiredUnlessEmpty) {
  EXPECT_TRUE(ParseEventsCsv("").ok());
  EXPECT_EQ(ParseEventsCsv("")->lines, 0);
  EXPECT_FALSE(ParseEventsCsv("user,date\nu,2021-03-09,1,A1\n").ok());
}

TEST(EventsFileTest, WriteThenIngestRoundTrips) {
  const std::vector<SearchEvent> events = {
      {"a", Date{std::chrono::year{2021} / 3 / 9}, "94103", Label::kNone},
      {"b", Date{std::chrono::year{2021} / 3 / 11}, "95023", Label::kOther},
  };
  const std::string path =
      (std::filesystem::temp_directory_path() / "dpagg_ingest_test.csv").string();
  ASSERT_TRUE(WriteEventsCsv(path, events).ok());
  auto result = IngestEvents(path);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_EQ(result->events, events);
  std::filesystem::remove(path);
  EXPECT_EQ(IngestEvents(path).status().code(), absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace dpagg

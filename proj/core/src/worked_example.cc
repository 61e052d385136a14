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

#include "dpagg/worked_example.h"

#include <cstdlib>
#include <iostream>
#include <map>
#include <set>

#include "str_util.h"

namespace dpagg {

namespace {

template <typename T>
T ValueOrDie(absl::StatusOr<T> value) {
  if (!value.ok()) {
    std::cerr << "worked example fixture is invalid: " << value.status() << "\n";
    std::abort();
  }
  return *std::move(value);
}

std::string CategoryLabel(Category category) {
  switch (category) {
    case Category::kAny:
      return "Any";
    case Category::kIntent:
      return "Vaccination Intent";
    case Category::kSafety:
      return "Safety and Side Effects";
    case Category::kOther:
      return "Other";
  }
  return "?";
}

}  // namespace

RegionRegistry WorkedExampleRegistry() {
  std::vector<RegionRecord> records = {
      {"California", GeoLevel::kState, "US", std::nullopt, 423'970.0, std::nullopt},
      {"San Francisco", GeoLevel::kCounty, "California", 881'549, 600.6, std::nullopt},
      {"San Benito", GeoLevel::kCounty, "California", 62'808, 3'602.0, std::nullopt},
      {"94103", GeoLevel::kPostalCode, "San Francisco", std::nullopt, 4.6, std::nullopt},
      {"95023", GeoLevel::kPostalCode, "San Benito", std::nullopt, 1'030.0, std::nullopt},
  };
  return ValueOrDie(RegionRegistry::Create(std::move(records)));
}

std::vector<SearchEvent> WorkedExampleEvents() {
  const Date march9 = Date{std::chrono::year{2021} / 3 / 9};
  const Date march11 = Date{std::chrono::year{2021} / 3 / 11};
  return {
      {"user", march9, "94103", Label::kNone},
      {"user", march9, "95023", Label::kSafety},
      {"user", march11, "95023", Label::kIntent},
  };
}

WorkedExampleReplay ReplayWorkedExample(const DropPolicy& policy) {
  const RegionRegistry registry = WorkedExampleRegistry();
  const std::vector<SearchEvent> events = WorkedExampleEvents();
  WorkedExampleReplay replay;

  // Group by day; searches keep their global number for display.
  std::map<Date, std::vector<size_t>> by_day;
  for (size_t i = 0; i < events.size(); ++i) by_day[events[i].date].push_back(i);

  for (const auto& [date, searches] : by_day) {
    std::vector<Candidate> day_candidates;
    for (size_t local = 0; local < searches.size(); ++local) {
      std::vector<Candidate> expanded =
          ValueOrDie(Expand(events[searches[local]], local, registry));
      for (Candidate& c : expanded) {
        day_candidates.push_back(c);
        c.search_index = searches[local];
        replay.expanded.push_back(c);
      }
    }
    UserDayResult result = BoundUserDay("user", date, day_candidates, policy);
    for (BoundedContribution& kept : result.kept) {
      kept.search_index = searches[kept.search_index];
      replay.counts.Add(kept.key);
      replay.kept.push_back(std::move(kept));
    }
  }
  return replay;
}

std::string FormatWorkedExample(const WorkedExampleReplay& replay) {
  auto table = [](const auto& rows, auto key_of, auto search_of, auto type_of) {
    std::map<CountKey, std::pair<std::set<size_t>, RegionType>> grouped;
    for (const auto& row : rows) {
      auto& entry = grouped[key_of(row)];
      entry.first.insert(search_of(row) + 1);
      entry.second = type_of(row);
    }
    std::string out;
    for (const auto& [key, entry] : grouped) {
      internal::StrAppend(&out, "  <", key.week.iso_week, ", ",
                      CategoryLabel(key.category), ", ", key.region, ">  searches ",
                      internal::StrJoin(entry.first, ","), "  ",
                      GeoLevelName(key.level), "  ",
                      RegionTypeName(entry.second), "\n");
    }
    return out;
  };
  std::string out = "Before bounding:\n";
  out += table(
      replay.expanded, [](const Candidate& c) { return c.key; },
      [](const Candidate& c) { return c.search_index; },
      [](const Candidate& c) { return c.region_type; });
  out += "After bounding:\n";
  out += table(
      replay.kept, [](const BoundedContribution& c) { return c.key; },
      [](const BoundedContribution& c) { return c.search_index; },
      [](const BoundedContribution& c) { return c.region_type; });
  out += "Counts:\n";
  for (const auto& [key, count] : replay.counts.counts()) {
    internal::StrAppend(&out, "  ", DebugString(key), " = ", count, "\n");
  }
  return out;
}

}  // namespace dpagg

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

#include "dpagg/bounding.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>

#include "str_util.h"
#include "dpagg/status_macros.h"

namespace dpagg {

namespace {

bool IsTypedLevel(GeoLevel level) {
  return level == GeoLevel::kCounty || level == GeoLevel::kPostalCode;
}

// Working state for one user-day. Candidates are visited in their given
// order, which is search order followed by expansion order.
class UserDayPruner {
 public:
  explicit UserDayPruner(std::span<const Candidate> candidates)
      : candidates_(candidates), alive_(candidates.size(), true) {}

  void Apply(Constraint constraint, TypePreference preference) {
    switch (constraint) {
      case Constraint::kCrossCount:
        CrossCount();
        break;
      case Constraint::kPerCount:
        PerCount();
        break;
      case Constraint::kSmallPostal:
        SmallPostal();
        break;
      case Constraint::kTypeSync:
        TypeSync(preference);
        break;
    }
  }

  bool alive(size_t i) const { return alive_[i]; }
  std::vector<DroppedCandidate>& dropped() { return dropped_; }

 private:
  void Drop(size_t i, Constraint constraint) {
    alive_[i] = false;
    dropped_.push_back({candidates_[i], constraint});
  }

  // The earliest search wins each (level, category) slot.
  void CrossCount() {
    std::map<std::pair<GeoLevel, Category>, const std::string*> winner;
    for (size_t i : SearchOrder()) {
      if (!alive_[i]) continue;
      const CountKey& key = candidates_[i].key;
      auto [it, inserted] =
          winner.try_emplace({key.level, key.category}, &key.region);
      if (!inserted && *it->second != key.region) {
        Drop(i, Constraint::kCrossCount);
      }
    }
  }

  void PerCount() {
    std::map<CountKey, size_t> seen;
    for (size_t i : SearchOrder()) {
      if (!alive_[i]) continue;
      if (!seen.try_emplace(candidates_[i].key, i).second) {
        Drop(i, Constraint::kPerCount);
      }
    }
  }

  void SmallPostal() {
    for (size_t i = 0; i < candidates_.size(); ++i) {
      if (alive_[i] && candidates_[i].key.level == GeoLevel::kPostalCode &&
          candidates_[i].region_type == RegionType::kSmall) {
        Drop(i, Constraint::kSmallPostal);
      }
    }
  }

  void TypeSync(TypePreference preference) {
    std::optional<RegionType> keep;
    for (size_t i : SearchOrder()) {
      if (!alive_[i] || !IsTypedLevel(candidates_[i].key.level)) continue;
      const RegionType type = candidates_[i].region_type;
      if (!keep.has_value()) {
        keep = type;
        continue;
      }
      switch (preference) {
        case TypePreference::kSmallest:
          keep = std::min(*keep, type);
          break;
        case TypePreference::kLargest:
          keep = std::max(*keep, type);
          break;
        case TypePreference::kEarliest:
          break;
      }
    }
    if (!keep.has_value()) return;
    for (size_t i = 0; i < candidates_.size(); ++i) {
      if (alive_[i] && IsTypedLevel(candidates_[i].key.level) &&
          candidates_[i].region_type != *keep) {
        Drop(i, Constraint::kTypeSync);
      }
    }
  }

  // Indices ordered by search index, ties broken by position.
  std::vector<size_t> SearchOrder() const {
    std::vector<size_t> order(candidates_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return candidates_[a].search_index < candidates_[b].search_index;
    });
    return order;
  }

  std::span<const Candidate> candidates_;
  std::vector<bool> alive_;
  std::vector<DroppedCandidate> dropped_;
};

}  // namespace

std::string_view ConstraintName(Constraint constraint) {
  switch (constraint) {
    case Constraint::kCrossCount:
      return "X1";
    case Constraint::kPerCount:
      return "X2";
    case Constraint::kSmallPostal:
      return "X3";
    case Constraint::kTypeSync:
      return "X4";
  }
  return "?";
}

absl::Status DropPolicy::Validate() const {
  std::array<bool, kNumConstraints> present{};
  for (Constraint c : order) {
    const auto index = static_cast<size_t>(c);
    if (index >= kNumConstraints || present[index]) {
      return absl::InvalidArgumentError(
          "drop policy order must list each of X1..X4 exactly once");
    }
    present[index] = true;
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Candidate>> Expand(const SearchEvent& event,
                                              size_t search_index,
                                              const RegionRegistry& registry,
                                              const ExpandOptions& options) {
  ASSIGN_OR_RETURN(const RegionPath path, registry.Resolve(event.postal_code));
  ASSIGN_OR_RETURN(const RegionType postal_type,
                   registry.PostalType(event.postal_code));
  ASSIGN_OR_RETURN(const RegionType county_type, registry.TypeOf(path.county));

  const WeekId week = WeekOf(event.date);
  struct Level {
    const std::string* region;
    GeoLevel level;
    RegionType type;
  };
  const std::array<Level, 3> levels = {{
      {&path.postal, GeoLevel::kPostalCode, postal_type},
      {&path.county, GeoLevel::kCounty, county_type},
      {&path.state, GeoLevel::kState, RegionType::kNotApplicable},
  }};

  std::vector<Category> categories = {Category::kAny};
  if (event.label != Label::kNone) categories.push_back(CategoryOf(event.label));

  std::vector<Candidate> out;
  for (Category category : categories) {
    for (const Level& level : levels) {
      if (!Admissible(*registry.Find(*level.region))) continue;
      if (options.drop_small_postal && level.level == GeoLevel::kPostalCode &&
          level.type == RegionType::kSmall) {
        continue;
      }
      out.push_back(Candidate{
          search_index, CountKey{week, *level.region, level.level, category},
          level.type});
    }
  }
  return out;
}

UserDayResult BoundUserDay(std::string_view user_id, Date date,
                           std::span<const Candidate> candidates,
                           const DropPolicy& policy) {
  UserDayPruner pruner(candidates);
  for (Constraint constraint : policy.order) {
    pruner.Apply(constraint, policy.type_preference);
  }
  UserDayResult result;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (!pruner.alive(i)) continue;
    result.kept.push_back(BoundedContribution{
        std::string(user_id), date, candidates[i].key,
        candidates[i].region_type, candidates[i].search_index});
  }
  result.dropped = std::move(pruner.dropped());
  return result;
}

void RawCountTable::Add(const CountKey& key, int64_t increment) {
  counts_[key] += increment;
}

void RawCountTable::Merge(const RawCountTable& other) {
  for (const auto& [key, count] : other.counts_) counts_[key] += count;
}

int64_t RawCountTable::Get(const CountKey& key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

RawCountTable Aggregate(std::span<const BoundedContribution> contributions) {
  RawCountTable table;
  for (const BoundedContribution& c : contributions) table.Add(c.key);
  return table;
}

absl::StatusOr<BoundingResult> BoundAndAggregate(
    std::span<const SearchEvent> events, const RegionRegistry& registry,
    const DropPolicy& policy, const ExpandOptions& expand_options) {
  RETURN_IF_ERROR(policy.Validate());

  std::vector<size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::tie(events[a].user_id, events[a].date) <
           std::tie(events[b].user_id, events[b].date);
  });

  BoundingResult result;
  BoundingStats& stats = result.stats;
  stats.events = static_cast<int64_t>(events.size());

  std::vector<Candidate> candidates;
  std::vector<int> alive_per_search;
  size_t begin = 0;
  while (begin < order.size()) {
    const SearchEvent& first = events[order[begin]];
    size_t end = begin;
    while (end < order.size() && events[order[end]].user_id == first.user_id &&
           events[order[end]].date == first.date) {
      ++end;
    }
    ++stats.user_days;

    candidates.clear();
    alive_per_search.assign(end - begin, 0);
    for (size_t i = begin; i < end; ++i) {
      const size_t search_index = i - begin;
      auto expanded =
          Expand(events[order[i]], search_index, registry, expand_options);
      if (!expanded.ok()) {
        if (expanded.status().code() == absl::StatusCode::kNotFound) {
          ++stats.unresolved;
          continue;
        }
        return expanded.status();
      }
      if (expanded->empty()) {
        ++stats.inadmissible;
        continue;
      }
      alive_per_search[search_index] = static_cast<int>(expanded->size());
      candidates.insert(candidates.end(), expanded->begin(), expanded->end());
    }
    stats.candidates += static_cast<int64_t>(candidates.size());

    UserDayResult day =
        BoundUserDay(first.user_id, first.date, candidates, policy);
    for (const DroppedCandidate& d : day.dropped) {
      const auto constraint = static_cast<size_t>(d.constraint);
      ++stats.candidates_dropped[constraint];
      if (--alive_per_search[d.candidate.search_index] == 0) {
        ++stats.events_dropped[constraint];
      }
    }
    for (int alive : alive_per_search) {
      if (alive > 0) ++stats.events_used;
    }
    for (const BoundedContribution& c : day.kept) result.table.Add(c.key);
    stats.contributions += static_cast<int64_t>(day.kept.size());
    begin = end;
  }
  return result;
}

}  // namespace dpagg

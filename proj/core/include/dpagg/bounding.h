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

// Per-user, per-day contribution bounding.
//
// A user's searches on one day are expanded into candidate cells (one per
// geographic level and category the search touches) and then pruned until
// the surviving contributions satisfy four constraints:
//
//   X1  cross-count: at most one cell per (level, category).
//   X2  per-count: at most one increment per cell.
//   X3  small postal: no postal code cell of a Small county.
//   X4  type sync: all county and postal code cells share one RegionType.
//
// Every constraint is closed under removal, so processing them in any order
// yields an output satisfying all four. Bounds never span more than a day, so
// user-days are independent units of work.

#ifndef DPAGG_BOUNDING_H_
#define DPAGG_BOUNDING_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpagg/geo.h"
#include "dpagg/model.h"

namespace dpagg {

enum class Constraint {
  kCrossCount = 0,   // X1
  kPerCount = 1,     // X2
  kSmallPostal = 2,  // X3
  kTypeSync = 3,     // X4
};

inline constexpr size_t kNumConstraints = 4;

std::string_view ConstraintName(Constraint constraint);

// Which RegionType survives an X4 conflict.
enum class TypePreference {
  kSmallest,  // Small over Medium over Large.
  kLargest,
  kEarliest,  // Type of the earliest surviving county or postal cell.
};

// Conflict resolution. X1 and X2 always keep the earliest search of the day
// (input order), so the policy is fully deterministic.
struct DropPolicy {
  std::array<Constraint, kNumConstraints> order = {
      Constraint::kCrossCount, Constraint::kPerCount, Constraint::kSmallPostal,
      Constraint::kTypeSync};
  TypePreference type_preference = TypePreference::kSmallest;

  absl::Status Validate() const;
};

struct Candidate {
  // Position of the originating search within its user-day.
  size_t search_index = 0;
  CountKey key;
  RegionType region_type = RegionType::kNotApplicable;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct ExpandOptions {
  // Omit Small postal code cells up front instead of leaving them to X3.
  bool drop_small_postal = false;
};

// Candidate cells for one search: A0 at postal, county and state level plus
// the labeled category at the same levels. Inadmissible regions get no cell.
absl::StatusOr<std::vector<Candidate>> Expand(const SearchEvent& event,
                                              size_t search_index,
                                              const RegionRegistry& registry,
                                              const ExpandOptions& options = {});

struct BoundedContribution {
  std::string user_id;
  Date date;
  CountKey key;
  RegionType region_type = RegionType::kNotApplicable;
  size_t search_index = 0;
};

struct DroppedCandidate {
  Candidate candidate;
  Constraint constraint;
};

struct UserDayResult {
  std::vector<BoundedContribution> kept;
  // In removal order.
  std::vector<DroppedCandidate> dropped;
};

// `candidates` must all come from searches by `user_id` on `date`.
UserDayResult BoundUserDay(std::string_view user_id, Date date,
                           std::span<const Candidate> candidates,
                           const DropPolicy& policy = {});

// Exact integer counts per cell. Merging is associative and commutative.
class RawCountTable {
 public:
  void Add(const CountKey& key, int64_t increment = 1);
  void Merge(const RawCountTable& other);
  int64_t Get(const CountKey& key) const;

  size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  const std::map<CountKey, int64_t>& counts() const { return counts_; }

  friend bool operator==(const RawCountTable&, const RawCountTable&) = default;

 private:
  std::map<CountKey, int64_t> counts_;
};

RawCountTable Aggregate(std::span<const BoundedContribution> contributions);

struct BoundingStats {
  int64_t events = 0;
  int64_t user_days = 0;
  // Events whose postal code is not in the registry.
  int64_t unresolved = 0;
  // Events whose every region is below the area threshold.
  int64_t inadmissible = 0;
  // Events with at least one surviving contribution.
  int64_t events_used = 0;
  // Events that lost their last candidate to the given constraint.
  std::array<int64_t, kNumConstraints> events_dropped{};
  int64_t candidates = 0;
  std::array<int64_t, kNumConstraints> candidates_dropped{};
  int64_t contributions = 0;
};

struct BoundingResult {
  RawCountTable table;
  BoundingStats stats;
};

// Groups events into user-days, bounds each and aggregates the survivors.
// Within a user-day, searches keep their input order.
absl::StatusOr<BoundingResult> BoundAndAggregate(
    std::span<const SearchEvent> events, const RegionRegistry& registry,
    const DropPolicy& policy = {}, const ExpandOptions& expand_options = {});

}  // namespace dpagg

#endif  // DPAGG_BOUNDING_H_

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

// Turns noisy cells into released rows.
//
//   1. Country cells are summed from state cells.
//   2. Released categories are derived: C1 = A1, C2 = A2, C3 = A1 + A2 + A3.
//   3. Each released count is divided by the A0 count of its region-week.
//   4. Ratios whose confidence interval is too wide are dropped.
//   5. Regions with too few surviving C3 points in the reference window are
//      dropped entirely.
//   6. Ratios are multiplied by a scaling factor fixed at the first release.
//
// Every step only reads noisy values and public noise scales.

#ifndef DPAGG_POSTPROCESS_H_
#define DPAGG_POSTPROCESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpagg/geo.h"
#include "dpagg/model.h"
#include "dpagg/noise.h"

namespace dpagg {

struct NoisyValue {
  double value = 0.0;
  double sigma = 0.0;
};

// Sum of independent noisy values: variances add.
NoisyValue SumIndependent(std::span<const NoisyValue> values);

struct ReleasedValues {
  std::optional<NoisyValue> intent;       // C1
  std::optional<NoisyValue> safety;       // C2
  std::optional<NoisyValue> vaccination;  // C3

  const std::optional<NoisyValue>& Get(ReleasedCategory category) const;
};

// C3 is only derivable when all three vaccine cells are present.
ReleasedValues DeriveReleasedCategories(const std::optional<NoisyValue>& intent,
                                        const std::optional<NoisyValue>& safety,
                                        const std::optional<NoisyValue>& other);

// Empty input yields no country value.
std::optional<NoisyValue> CountryRollup(std::span<const NoisyValue> state_values);

// Country cells for every (week, country, category) with at least one state
// cell. Non-state cells are ignored.
absl::StatusOr<std::vector<NoisyCell>> RollupCountries(
    std::span<const NoisyCell> cells, const RegionRegistry& registry);

struct NormalizedPoint {
  WeekId week;
  std::string region;
  GeoLevel level = GeoLevel::kState;
  ReleasedCategory category = ReleasedCategory::kVaccination;
  double numerator = 0.0;
  double denominator = 0.0;
  double numerator_sigma = 0.0;
  double denominator_sigma = 0.0;
  double ratio = 0.0;
};

NormalizedPoint Normalize(const WeekId& week, const std::string& region,
                          GeoLevel level, ReleasedCategory category,
                          const NoisyValue& numerator,
                          const NoisyValue& denominator);

struct ReliabilityParams {
  double confidence = 0.80;
  double relative_tolerance = 0.15;

  absl::Status Validate() const;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Critical value of each per-coordinate interval: two independent intervals
// at level sqrt(confidence) jointly cover with probability `confidence`.
double RatioIntervalZ(double confidence);

// Interval containing x*/y* with probability at least `confidence`, built
// from independent Gaussian intervals on X and Y. nullopt means unbounded:
// the denominator interval reaches zero.
std::optional<ConfidenceInterval> RatioConfidenceInterval(double x, double y,
                                                          double sigma_x,
                                                          double sigma_y,
                                                          double confidence);

// Keep iff ratio > 0, the interval is bounded, ratio - l <= tol * ratio and
// r - ratio <= tol * ratio.
bool PassesReliabilityFilter(const NormalizedPoint& point,
                             const ReliabilityParams& params);

struct SparsityParams {
  Date window_first_monday = Date{std::chrono::year{2021} / 1 / 4};
  Date window_last_monday = Date{std::chrono::year{2021} / 5 / 31};
  // Regions with this many retained points or fewer are dropped.
  int max_sparse_points = 3;
};

bool PassesSparsityFilter(std::span<const WeekId> retained_weeks,
                          const SparsityParams& params);

struct ScalingState {
  double factor = 1.0;
  std::string fixed_at;
  // National maximum the factor was derived from. When known, scaling
  // divides by it so the maximum itself maps to exactly 100.
  std::optional<double> reference_max;
};

// 100 / max(series).
absl::StatusOr<ScalingState> ComputeScalingFactor(
    std::span<const double> national_series, std::string fixed_at);

inline double ApplyScaling(double ratio, const ScalingState& state) {
  if (state.reference_max.has_value()) {
    return ratio / *state.reference_max * 100.0;
  }
  return ratio * state.factor;
}

// scaling_state.json: {"factor": ..., "fixed_at": ..., "reference_max": ...}
// with reference_max optional. A missing file reads
// as nullopt.
absl::StatusOr<std::optional<ScalingState>> ReadScalingState(
    const std::string& path);
absl::Status WriteScalingState(const std::string& path,
                               const ScalingState& state);

struct PostprocessOptions {
  ReliabilityParams reliability;
  SparsityParams sparsity;
  // Missing A cells count as a noiseless zero with the scale the cell would
  // have had, so C3 is derivable from partial data.
  bool absent_as_zero = false;
};

struct PostprocessStats {
  int64_t country_cells = 0;
  int64_t points_evaluated = 0;
  int64_t points_dropped_reliability = 0;
  int64_t regions_evaluated = 0;
  int64_t regions_dropped_sparsity = 0;
  int64_t points_dropped_sparsity = 0;
  int64_t points_retained = 0;
};

struct FilteredRelease {
  // Sorted by (week, level, region, category).
  std::vector<NormalizedPoint> points;
  PostprocessStats stats;
};

// Steps 1-5. `sigmas` is only consulted when absent_as_zero is set.
absl::StatusOr<FilteredRelease> FilterRelease(std::span<const NoisyCell> cells,
                                              const RegionRegistry& registry,
                                              const SigmaTable& sigmas,
                                              const PostprocessOptions& options);

// Retained C3 ratios of one country, in week order.
std::vector<double> NationalSeries(const FilteredRelease& release,
                                   const std::string& country);

struct ReleaseRow {
  Date week_start;
  std::string country;
  std::string state;
  std::string county;
  std::string postal_code;
  std::optional<double> vaccination;
  std::optional<double> intent;
  std::optional<double> safety;

  friend bool operator==(const ReleaseRow&, const ReleaseRow&) = default;
};

// Step 6. One row per region-week with at least one retained value.
absl::StatusOr<std::vector<ReleaseRow>> BuildRows(const FilteredRelease& release,
                                                  const ScalingState& scaling,
                                                  const RegionRegistry& registry);

// Header: week_start,country,state,county,postal_code,
// sni_covid19_vaccination,sni_vaccination_intent,sni_safety_side_effects
std::string ReleaseCsv(std::span<const ReleaseRow> rows);

}  // namespace dpagg

#endif  // DPAGG_POSTPROCESS_H_

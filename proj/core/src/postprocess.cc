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

#include "dpagg/postprocess.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "str_util.h"
#include "boost/math/distributions/normal.hpp"
#include "csv_util.h"
#include "dpagg/status_macros.h"

namespace dpagg {

namespace {

constexpr std::array<ReleasedCategory, 3> kReleasedCategories = {
    ReleasedCategory::kIntent, ReleasedCategory::kSafety,
    ReleasedCategory::kVaccination};

using RegionWeek = std::tuple<WeekId, GeoLevel, std::string>;

struct RegionWeekCells {
  RegionType region_type = RegionType::kNotApplicable;
  std::array<std::optional<NoisyValue>, 4> by_category;
};

// Scale a missing vaccine cell would have been released with.
absl::StatusOr<double> AbsentCellSigma(const RegionWeek& region_week,
                                       RegionType type,
                                       const RegionRegistry& registry,
                                       const SigmaTable& sigmas) {
  const auto& [week, level, region] = region_week;
  if (level != GeoLevel::kCountry) {
    return sigmas.Lookup(Stratum{type, level, CategoryGroup::kVaccine});
  }
  ASSIGN_OR_RETURN(const double state_sigma,
                   sigmas.Lookup(Stratum{RegionType::kNotApplicable,
                                         GeoLevel::kState,
                                         CategoryGroup::kVaccine}));
  int64_t states = 0;
  for (const RegionRecord* state : registry.RecordsAt(GeoLevel::kState)) {
    if (state->parent_id == region) ++states;
  }
  return state_sigma * std::sqrt(static_cast<double>(states));
}

bool PointOrder(const NormalizedPoint& a, const NormalizedPoint& b) {
  return std::tie(a.week, a.level, a.region, a.category) <
         std::tie(b.week, b.level, b.region, b.category);
}

}  // namespace

NoisyValue SumIndependent(std::span<const NoisyValue> values) {
  NoisyValue sum;
  double variance = 0.0;
  for (const NoisyValue& v : values) {
    sum.value += v.value;
    variance += v.sigma * v.sigma;
  }
  sum.sigma = std::sqrt(variance);
  return sum;
}

const std::optional<NoisyValue>& ReleasedValues::Get(
    ReleasedCategory category) const {
  switch (category) {
    case ReleasedCategory::kIntent:
      return intent;
    case ReleasedCategory::kSafety:
      return safety;
    case ReleasedCategory::kVaccination:
      return vaccination;
  }
  return vaccination;
}

ReleasedValues DeriveReleasedCategories(const std::optional<NoisyValue>& intent,
                                        const std::optional<NoisyValue>& safety,
                                        const std::optional<NoisyValue>& other) {
  ReleasedValues out;
  out.intent = intent;
  out.safety = safety;
  if (intent && safety && other) {
    const std::array<NoisyValue, 3> parts = {*intent, *safety, *other};
    out.vaccination = SumIndependent(parts);
  }
  return out;
}

std::optional<NoisyValue> CountryRollup(std::span<const NoisyValue> state_values) {
  if (state_values.empty()) return std::nullopt;
  return SumIndependent(state_values);
}

absl::StatusOr<std::vector<NoisyCell>> RollupCountries(
    std::span<const NoisyCell> cells, const RegionRegistry& registry) {
  std::map<CountKey, std::vector<NoisyValue>> by_country;
  for (const NoisyCell& cell : cells) {
    if (cell.key.level != GeoLevel::kState) continue;
    ASSIGN_OR_RETURN(std::string country, registry.CountryOf(cell.key.region));
    CountKey key{cell.key.week, std::move(country), GeoLevel::kCountry,
                 cell.key.category};
    by_country[key].push_back({cell.noisy_value, cell.sigma});
  }
  std::vector<NoisyCell> out;
  out.reserve(by_country.size());
  for (const auto& [key, values] : by_country) {
    const std::optional<NoisyValue> total = CountryRollup(values);
    NoisyCell cell;
    cell.key = key;
    cell.region_type = RegionType::kNotApplicable;
    cell.noisy_value = total->value;
    cell.sigma = total->sigma;
    out.push_back(std::move(cell));
  }
  return out;
}

NormalizedPoint Normalize(const WeekId& week, const std::string& region,
                          GeoLevel level, ReleasedCategory category,
                          const NoisyValue& numerator,
                          const NoisyValue& denominator) {
  NormalizedPoint point;
  point.week = week;
  point.region = region;
  point.level = level;
  point.category = category;
  point.numerator = numerator.value;
  point.denominator = denominator.value;
  point.numerator_sigma = numerator.sigma;
  point.denominator_sigma = denominator.sigma;
  point.ratio = numerator.value / denominator.value;
  return point;
}

absl::Status ReliabilityParams::Validate() const {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  if (!(relative_tolerance > 0.0)) {
    return absl::InvalidArgumentError("relative tolerance must be positive");
  }
  return absl::OkStatus();
}

double RatioIntervalZ(double confidence) {
  const double per_coordinate = std::sqrt(confidence);
  const boost::math::normal standard_normal;
  return boost::math::quantile(standard_normal, (1.0 + per_coordinate) / 2.0);
}

std::optional<ConfidenceInterval> RatioConfidenceInterval(double x, double y,
                                                          double sigma_x,
                                                          double sigma_y,
                                                          double confidence) {
  const double z = RatioIntervalZ(confidence);
  const double y_low = y - z * sigma_y;
  const double y_high = y + z * sigma_y;
  if (!(y_low > 0.0)) return std::nullopt;
  const double x_low = x - z * sigma_x;
  const double x_high = x + z * sigma_x;
  // x / y over the box [x_low, x_high] x [y_low, y_high] with y > 0.
  ConfidenceInterval interval;
  interval.lower = x_low >= 0.0 ? x_low / y_high : x_low / y_low;
  interval.upper = x_high >= 0.0 ? x_high / y_low : x_high / y_high;
  return interval;
}

bool PassesReliabilityFilter(const NormalizedPoint& point,
                             const ReliabilityParams& params) {
  const double ratio = point.ratio;
  if (!(ratio > 0.0)) return false;
  const std::optional<ConfidenceInterval> interval = RatioConfidenceInterval(
      point.numerator, point.denominator, point.numerator_sigma,
      point.denominator_sigma, params.confidence);
  if (!interval.has_value()) return false;
  return ratio - interval->lower <= params.relative_tolerance * ratio &&
         interval->upper - ratio <= params.relative_tolerance * ratio;
}

bool PassesSparsityFilter(std::span<const WeekId> retained_weeks,
                          const SparsityParams& params) {
  const auto in_window = std::count_if(
      retained_weeks.begin(), retained_weeks.end(), [&](const WeekId& week) {
        return week.monday >= params.window_first_monday &&
               week.monday <= params.window_last_monday;
      });
  return in_window > params.max_sparse_points;
}

absl::StatusOr<ScalingState> ComputeScalingFactor(
    std::span<const double> national_series, std::string fixed_at) {
  if (national_series.empty()) {
    return absl::FailedPreconditionError(
        "national series is empty; cannot fix a scaling factor");
  }
  const double maximum =
      *std::max_element(national_series.begin(), national_series.end());
  if (!(maximum > 0.0) || !std::isfinite(maximum)) {
    return absl::OutOfRangeError(internal::StrCat(
        "national maximum must be positive and finite, got ", maximum));
  }
  return ScalingState{100.0 / maximum, std::move(fixed_at), maximum};
}

absl::StatusOr<FilteredRelease> FilterRelease(std::span<const NoisyCell> cells,
                                              const RegionRegistry& registry,
                                              const SigmaTable& sigmas,
                                              const PostprocessOptions& options) {
  RETURN_IF_ERROR(options.reliability.Validate());
  FilteredRelease release;
  PostprocessStats& stats = release.stats;

  ASSIGN_OR_RETURN(const std::vector<NoisyCell> country_cells,
                   RollupCountries(cells, registry));
  stats.country_cells = static_cast<int64_t>(country_cells.size());

  std::map<RegionWeek, RegionWeekCells> groups;
  for (std::span<const NoisyCell> source : {cells, std::span<const NoisyCell>(country_cells)}) {
    for (const NoisyCell& cell : source) {
      RegionWeekCells& group =
          groups[RegionWeek{cell.key.week, cell.key.level, cell.key.region}];
      group.region_type = cell.region_type;
      group.by_category[static_cast<size_t>(cell.key.category)] =
          NoisyValue{cell.noisy_value, cell.sigma};
    }
  }

  std::vector<NormalizedPoint> reliable;
  for (auto& [region_week, group] : groups) {
    const std::optional<NoisyValue>& any = group.by_category[0];
    if (!any.has_value()) continue;
    if (options.absent_as_zero) {
      for (size_t c = 1; c < group.by_category.size(); ++c) {
        if (group.by_category[c].has_value()) continue;
        ASSIGN_OR_RETURN(const double sigma,
                         AbsentCellSigma(region_week, group.region_type,
                                         registry, sigmas));
        group.by_category[c] = NoisyValue{0.0, sigma};
      }
    }
    const ReleasedValues released = DeriveReleasedCategories(
        group.by_category[1], group.by_category[2], group.by_category[3]);
    const auto& [week, level, region] = region_week;
    for (ReleasedCategory category : kReleasedCategories) {
      const std::optional<NoisyValue>& numerator = released.Get(category);
      if (!numerator.has_value()) continue;
      ++stats.points_evaluated;
      NormalizedPoint point =
          Normalize(week, region, level, category, *numerator, *any);
      if (PassesReliabilityFilter(point, options.reliability)) {
        reliable.push_back(std::move(point));
      } else {
        ++stats.points_dropped_reliability;
      }
    }
  }

  std::map<std::pair<GeoLevel, std::string>, std::vector<WeekId>> c3_weeks;
  for (const NormalizedPoint& point : reliable) {
    std::vector<WeekId>& weeks = c3_weeks[{point.level, point.region}];
    if (point.category == ReleasedCategory::kVaccination) {
      weeks.push_back(point.week);
    }
  }
  std::set<std::pair<GeoLevel, std::string>> sparse;
  for (const auto& [region, weeks] : c3_weeks) {
    ++stats.regions_evaluated;
    if (!PassesSparsityFilter(weeks, options.sparsity)) sparse.insert(region);
  }
  stats.regions_dropped_sparsity = static_cast<int64_t>(sparse.size());

  for (NormalizedPoint& point : reliable) {
    if (sparse.contains({point.level, point.region})) {
      ++stats.points_dropped_sparsity;
      continue;
    }
    release.points.push_back(std::move(point));
  }
  std::sort(release.points.begin(), release.points.end(), PointOrder);
  stats.points_retained = static_cast<int64_t>(release.points.size());
  return release;
}

std::vector<double> NationalSeries(const FilteredRelease& release,
                                   const std::string& country) {
  std::vector<double> series;
  for (const NormalizedPoint& point : release.points) {
    if (point.level == GeoLevel::kCountry && point.region == country &&
        point.category == ReleasedCategory::kVaccination) {
      series.push_back(point.ratio);
    }
  }
  return series;
}

absl::StatusOr<std::vector<ReleaseRow>> BuildRows(const FilteredRelease& release,
                                                  const ScalingState& scaling,
                                                  const RegionRegistry& registry) {
  std::map<RegionWeek, ReleaseRow> rows;
  for (const NormalizedPoint& point : release.points) {
    const RegionWeek region_week{point.week, point.level, point.region};
    auto it = rows.find(region_week);
    if (it == rows.end()) {
      ReleaseRow row;
      row.week_start = point.week.monday;
      switch (point.level) {
        case GeoLevel::kCountry:
          row.country = point.region;
          break;
        case GeoLevel::kState: {
          row.state = point.region;
          ASSIGN_OR_RETURN(row.country, registry.CountryOf(row.state));
          break;
        }
        case GeoLevel::kCounty: {
          const RegionRecord* county = registry.Find(point.region);
          if (county == nullptr || !county->parent_id.has_value()) {
            return absl::NotFoundError(
                internal::StrCat("unknown county '", point.region, "'"));
          }
          row.county = point.region;
          row.state = *county->parent_id;
          ASSIGN_OR_RETURN(row.country, registry.CountryOf(row.state));
          break;
        }
        case GeoLevel::kPostalCode: {
          ASSIGN_OR_RETURN(const RegionPath path, registry.Resolve(point.region));
          row.postal_code = path.postal;
          row.county = path.county;
          row.state = path.state;
          ASSIGN_OR_RETURN(row.country, registry.CountryOf(row.state));
          break;
        }
      }
      it = rows.emplace(region_week, std::move(row)).first;
    }
    const double scaled = ApplyScaling(point.ratio, scaling);
    switch (point.category) {
      case ReleasedCategory::kIntent:
        it->second.intent = scaled;
        break;
      case ReleasedCategory::kSafety:
        it->second.safety = scaled;
        break;
      case ReleasedCategory::kVaccination:
        it->second.vaccination = scaled;
        break;
    }
  }

  std::vector<ReleaseRow> out;
  out.reserve(rows.size());
  for (auto& [key, row] : rows) out.push_back(std::move(row));
  std::stable_sort(out.begin(), out.end(),
                   [](const ReleaseRow& a, const ReleaseRow& b) {
                     return std::tie(a.week_start, a.country, a.state, a.county,
                                     a.postal_code) <
                            std::tie(b.week_start, b.country, b.state, b.county,
                                     b.postal_code);
                   });
  return out;
}

std::string ReleaseCsv(std::span<const ReleaseRow> rows) {
  std::string out =
      "week_start,country,state,county,postal_code,sni_covid19_vaccination,"
      "sni_vaccination_intent,sni_safety_side_effects\n";
  auto field = [](const std::optional<double>& v) {
    return v.has_value() ? internal::FormatDouble(*v) : std::string();
  };
  for (const ReleaseRow& row : rows) {
    internal::StrAppend(&out, FormatDate(row.week_start), ",", row.country, ",",
                    row.state, ",", row.county, ",", row.postal_code, ",",
                    field(row.vaccination), ",", field(row.intent), ",",
                    field(row.safety), "\n");
  }
  return out;
}

}  // namespace dpagg

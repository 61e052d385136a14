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

#include "dpagg/noise.h"

#include <cmath>
#include <map>
#include <set>

#include "str_util.h"
#include "csv_util.h"
#include "dpagg/status_macros.h"

namespace dpagg {

namespace {

constexpr std::string_view kSigmaHeader = "population,level,category_group,sigma";

absl::StatusOr<RegionType> ParseRegionType(std::string_view text) {
  if (text == "small") return RegionType::kSmall;
  if (text == "medium") return RegionType::kMedium;
  if (text == "large") return RegionType::kLarge;
  if (text == "na") return RegionType::kNotApplicable;
  return absl::InvalidArgumentError(
      internal::StrCat("unknown population class '", text, "'"));
}

absl::StatusOr<CategoryGroup> ParseCategoryGroup(std::string_view text) {
  if (text == "A0") return CategoryGroup::kAny;
  if (text == "A123") return CategoryGroup::kVaccine;
  return absl::InvalidArgumentError(
      internal::StrCat("unknown category group '", text, "'"));
}

// SplitMix64 finalizer.
uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a(std::string_view bytes, uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

CategoryGroup GroupOf(Category category) {
  return category == Category::kAny ? CategoryGroup::kAny
                                    : CategoryGroup::kVaccine;
}

std::string_view CategoryGroupName(CategoryGroup group) {
  return group == CategoryGroup::kAny ? "A0" : "A123";
}

std::string StratumName(const Stratum& stratum) {
  return internal::StrCat(RegionTypeName(stratum.region_type), "/",
                      GeoLevelName(stratum.level), "/",
                      CategoryGroupName(stratum.group));
}

absl::Status ValidateStratum(const Stratum& stratum) {
  switch (stratum.level) {
    case GeoLevel::kState:
      if (stratum.region_type != RegionType::kNotApplicable) {
        return absl::InvalidArgumentError(
            internal::StrCat("state strata are untyped: ", StratumName(stratum)));
      }
      return absl::OkStatus();
    case GeoLevel::kCounty:
    case GeoLevel::kPostalCode:
      if (stratum.region_type == RegionType::kNotApplicable) {
        return absl::InvalidArgumentError(internal::StrCat(
            "county and postal strata need a population class: ",
            StratumName(stratum)));
      }
      if (stratum.level == GeoLevel::kPostalCode &&
          stratum.region_type == RegionType::kSmall) {
        return absl::InvalidArgumentError(
            "small postal codes are never released and have no noise scale");
      }
      return absl::OkStatus();
    case GeoLevel::kCountry:
      return absl::InvalidArgumentError(
          "country cells are derived from states and receive no noise");
  }
  return absl::InvalidArgumentError("unknown level");
}

SigmaTable SigmaTable::Default() {
  using enum RegionType;
  constexpr auto kPostal = GeoLevel::kPostalCode;
  constexpr auto kCounty = GeoLevel::kCounty;
  constexpr auto kState = GeoLevel::kState;
  constexpr auto kAny = CategoryGroup::kAny;
  constexpr auto kVaccine = CategoryGroup::kVaccine;
  SigmaTable table;
  table.sigmas_ = {
      {{kLarge, kPostal, kAny}, 35.0},
      {{kLarge, kPostal, kVaccine}, 3.25},
      {{kLarge, kCounty, kAny}, 180.0},
      {{kLarge, kCounty, kVaccine}, 20.0},
      {{kMedium, kPostal, kAny}, 40.0},
      {{kMedium, kPostal, kVaccine}, 3.5},
      {{kMedium, kCounty, kAny}, 100.0},
      {{kMedium, kCounty, kVaccine}, 8.0},
      {{kSmall, kCounty, kAny}, 28.0},
      {{kSmall, kCounty, kVaccine}, 3.21},
      {{kNotApplicable, kState, kAny}, 450.0},
      {{kNotApplicable, kState, kVaccine}, 35.0},
  };
  return table;
}

absl::StatusOr<SigmaTable> SigmaTable::ParseCsv(std::string_view text) {
  const std::vector<std::string_view> lines = internal::SplitLines(text);
  if (lines.empty() ||
      internal::StripCarriageReturn(lines.front()) != kSigmaHeader) {
    return absl::InvalidArgumentError(
        internal::StrCat("sigma table header must be '", kSigmaHeader, "'"));
  }
  SigmaTable table;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (internal::IsBlank(lines[i])) continue;
    const auto fields = internal::SplitFields(lines[i]);
    const std::string where = internal::StrCat("sigma table line ", i + 1, ": ");
    if (fields.size() != 4) {
      return absl::InvalidArgumentError(
          internal::StrCat(where, "expected 4 fields, got ", fields.size()));
    }
    Stratum stratum;
    ASSIGN_OR_RETURN(stratum.region_type, ParseRegionType(fields[0]));
    ASSIGN_OR_RETURN(stratum.level, ParseGeoLevel(fields[1]));
    ASSIGN_OR_RETURN(stratum.group, ParseCategoryGroup(fields[2]));
    double sigma = 0.0;
    if (!internal::ParseNumber(fields[3], sigma) || !(sigma > 0.0)) {
      return absl::InvalidArgumentError(
          internal::StrCat(where, "sigma must be a positive number"));
    }
    if (table.Contains(stratum)) {
      return absl::InvalidArgumentError(
          internal::StrCat(where, "duplicate stratum ", StratumName(stratum)));
    }
    absl::Status status = table.Set(stratum, sigma);
    if (!status.ok()) {
      return absl::InvalidArgumentError(internal::StrCat(where, status.message()));
    }
  }
  return table;
}

absl::StatusOr<SigmaTable> SigmaTable::LoadCsv(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, internal::ReadFile(path));
  return ParseCsv(text);
}

std::string SigmaTable::ToCsv() const {
  std::string out = internal::StrCat(kSigmaHeader, "\n");
  for (const auto& [stratum, sigma] : sigmas_) {
    internal::StrAppend(&out, RegionTypeName(stratum.region_type), ",",
                    GeoLevelName(stratum.level), ",",
                    CategoryGroupName(stratum.group), ",",
                    internal::FormatDouble(sigma), "\n");
  }
  return out;
}

absl::Status SigmaTable::Set(const Stratum& stratum, double sigma) {
  RETURN_IF_ERROR(ValidateStratum(stratum));
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be finite and non-negative");
  }
  sigmas_[stratum] = sigma;
  return absl::OkStatus();
}

bool SigmaTable::Contains(const Stratum& stratum) const {
  return sigmas_.contains(stratum);
}

absl::StatusOr<double> SigmaTable::Lookup(const Stratum& stratum) const {
  RETURN_IF_ERROR(ValidateStratum(stratum));
  auto it = sigmas_.find(stratum);
  if (it == sigmas_.end()) {
    return absl::NotFoundError(
        internal::StrCat("no noise scale for stratum ", StratumName(stratum)));
  }
  return it->second;
}

SigmaTable SigmaTable::Scaled(double factor) const {
  SigmaTable scaled = *this;
  for (auto& [stratum, sigma] : scaled.sigmas_) sigma *= factor;
  return scaled;
}

absl::StatusOr<double> SigmaFor(RegionType region_type, GeoLevel level,
                                Category category, const SigmaTable& table) {
  return table.Lookup(Stratum{region_type, level, GroupOf(category)});
}

std::mt19937_64 CellEngine(uint64_t master_seed, const CountKey& key) {
  uint64_t h = Fnv1a(key.region);
  h = Mix(h ^ static_cast<uint64_t>(key.week.monday.time_since_epoch().count()));
  h = Mix(h ^ (static_cast<uint64_t>(key.level) << 8 |
               static_cast<uint64_t>(key.category)));
  std::seed_seq seq{static_cast<uint32_t>(master_seed),
                    static_cast<uint32_t>(master_seed >> 32),
                    static_cast<uint32_t>(h), static_cast<uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

namespace {

// Observed counts plus a zero for every other releasable key in the same
// weeks. Small postal codes and inadmissible regions have no cells.
std::map<CountKey, int64_t> WithEmptyCells(const RawCountTable& table,
                                           const RegionRegistry& registry) {
  std::map<CountKey, int64_t> dense = table.counts();
  std::set<WeekId> weeks;
  for (const auto& [key, raw] : table.counts()) weeks.insert(key.week);
  for (const RegionRecord* region : registry.Records()) {
    if (!Admissible(*region)) continue;
    if (region->level == GeoLevel::kPostalCode) {
      auto type = registry.PostalType(region->region_id);
      if (!type.ok() || *type == RegionType::kSmall) continue;
    }
    for (const WeekId& week : weeks) {
      for (Category category : kAllCategories) {
        dense.try_emplace(CountKey{week, region->region_id, region->level, category},
                          0);
      }
    }
  }
  return dense;
}

}  // namespace

absl::StatusOr<std::vector<NoisyCell>> NoiseAll(const RawCountTable& table,
                                                const SigmaTable& sigmas,
                                                const RegionRegistry& registry,
                                                const NoiseOptions& options) {
  std::random_device entropy;
  std::map<CountKey, int64_t> dense;
  if (options.noise_empty_cells) dense = WithEmptyCells(table, registry);
  const std::map<CountKey, int64_t>& counts =
      options.noise_empty_cells ? dense : table.counts();
  std::vector<NoisyCell> cells;
  cells.reserve(counts.size());
  for (const auto& [key, raw] : counts) {
    ASSIGN_OR_RETURN(const RegionType type, registry.TypeOf(key.region));
    ASSIGN_OR_RETURN(const double sigma,
                     SigmaFor(type, key.level, key.category, sigmas));
    NoisyCell cell;
    cell.key = key;
    cell.region_type = type;
    cell.sigma = sigma;
    if (options.secure_rng) {
      cell.noisy_value = AddNoise(raw, sigma, entropy);
    } else {
      std::mt19937_64 engine = CellEngine(options.seed, key);
      cell.noisy_value = AddNoise(raw, sigma, engine);
    }
    if (options.retain_raw_for_audit) cell.raw_hidden.emplace(raw);
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace dpagg

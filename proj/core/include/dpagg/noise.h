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

// Gaussian noise for bounded counts. The noise scale of a cell depends on
// its region's population class, its geographic level and whether it counts
// all queries (A0) or one vaccine category (A1..A3).

#ifndef DPAGG_NOISE_H_
#define DPAGG_NOISE_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/status/statusor.h"
#include "dpagg/bounding.h"
#include "dpagg/geo.h"
#include "dpagg/model.h"

namespace dpagg {

enum class CategoryGroup { kAny = 0, kVaccine = 1 };

CategoryGroup GroupOf(Category category);
std::string_view CategoryGroupName(CategoryGroup group);

struct Stratum {
  RegionType region_type = RegionType::kNotApplicable;
  GeoLevel level = GeoLevel::kState;
  CategoryGroup group = CategoryGroup::kAny;

  friend auto operator<=>(const Stratum&, const Stratum&) = default;
};

std::string StratumName(const Stratum& stratum);

// Checks the structural rules for a stratum: states are untyped, counties
// and postal codes are typed, Small postal codes never exist.
absl::Status ValidateStratum(const Stratum& stratum);

// Standard deviation per stratum, in query-count units.
class SigmaTable {
 public:
  // The twelve production noise scales.
  static SigmaTable Default();

  // CSV with header `population,level,category_group,sigma`; population is
  // one of small|medium|large|na and category_group one of A0|A123.
  static absl::StatusOr<SigmaTable> ParseCsv(std::string_view text);
  static absl::StatusOr<SigmaTable> LoadCsv(const std::string& path);
  std::string ToCsv() const;

  // Sigma must be non-negative; zero is only meaningful for noise-free test
  // runs.
  absl::Status Set(const Stratum& stratum, double sigma);
  bool Contains(const Stratum& stratum) const;
  absl::StatusOr<double> Lookup(const Stratum& stratum) const;

  // Every sigma multiplied by `factor` (>= 0).
  SigmaTable Scaled(double factor) const;

  const std::map<Stratum, double>& entries() const { return sigmas_; }

 private:
  std::map<Stratum, double> sigmas_;
};

absl::StatusOr<double> SigmaFor(RegionType region_type, GeoLevel level,
                                Category category,
                                const SigmaTable& table = SigmaTable::Default());

// raw + N(0, sigma^2). Not rounded, not clamped. sigma == 0 returns raw.
template <typename Urbg>
double AddNoise(int64_t raw, double sigma, Urbg& rng) {
  if (sigma == 0.0) return static_cast<double>(raw);
  std::normal_distribution<double> gaussian(0.0, sigma);
  return static_cast<double>(raw) + gaussian(rng);
}

// Engine for one cell. Depends only on the master seed and the key, so the
// draw for a cell does not depend on scheduling or on other cells.
std::mt19937_64 CellEngine(uint64_t master_seed, const CountKey& key);

// Wraps a pre-noise count kept for audits. Every read is counted so tests can
// prove that no post-noise stage looks at raw data.
class AuditedRawCount {
 public:
  explicit AuditedRawCount(int64_t value) : value_(value) {}

  int64_t Read() const {
    reads_.fetch_add(1, std::memory_order_relaxed);
    return value_;
  }

  static int64_t TotalReads() { return reads_.load(); }
  static void ResetReads() { reads_.store(0); }

 private:
  int64_t value_;
  static inline std::atomic<int64_t> reads_{0};
};

struct NoisyCell {
  CountKey key;
  RegionType region_type = RegionType::kNotApplicable;
  double noisy_value = 0.0;
  double sigma = 0.0;
  // Only populated when NoiseOptions::retain_raw_for_audit is set.
  std::optional<AuditedRawCount> raw_hidden;
};

struct NoiseOptions {
  uint64_t seed = 0;
  // Draw from the operating system's entropy source instead of seeded
  // per-cell engines. Output is then not reproducible.
  bool secure_rng = false;
  bool retain_raw_for_audit = false;
  // Also release zero counts for every admissible region, level and category
  // in each week that has any data, instead of only the observed keys.
  bool noise_empty_cells = false;
};

// One cell per key in `table`, in key order; keys absent from the table get
// no cell.
absl::StatusOr<std::vector<NoisyCell>> NoiseAll(const RawCountTable& table,
                                                const SigmaTable& sigmas,
                                                const RegionRegistry& registry,
                                                const NoiseOptions& options);

}  // namespace dpagg

#endif  // DPAGG_NOISE_H_

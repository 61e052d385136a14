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

// End-to-end release: ingest -> bound -> noise -> certify -> post-process ->
// emit. Runs are deterministic for a fixed seed.

#ifndef DPAGG_PIPELINE_H_
#define DPAGG_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpagg/accountant.h"
#include "dpagg/bounding.h"
#include "dpagg/geo.h"
#include "dpagg/noise.h"
#include "dpagg/postprocess.h"

namespace dpagg {

struct PipelineConfig {
  std::string registry_path;
  std::string events_path;
  // Empty means the built-in production scales.
  std::string sigma_table_path;
  double delta = 1e-5;
  // Multiplies every sigma before noising and certification. Zero disables
  // noise; the certificate then reports an infinite epsilon.
  double sigma_scale = 1.0;
  ReliabilityParams reliability;
  SparsityParams sparsity;
  DropPolicy drop_policy;
  // Required unless secure_rng is set.
  std::optional<uint64_t> seed;
  bool absent_as_zero = false;
  bool secure_rng = false;
  bool strict = false;
  // Empty skips writing the CSV.
  std::string output_path;
  // Present file: reuse its factor. Absent file: compute and write. Empty
  // path: compute without persisting.
  std::string scaling_state_path;
  // Recorded as `fixed_at` when a new scaling factor is computed.
  std::string release_id = "initial";
  // Country whose C3 series fixes the scaling factor. Empty picks the only
  // country in the registry.
  std::string national_region;
  // Keeps pre-noise counts in the noisy cells so audits can check that
  // nothing downstream reads them.
  bool retain_raw_for_audit = false;
  // Noise zero counts for unobserved keys too; see NoiseOptions.
  bool noise_empty_cells = false;

  absl::Status Validate() const;
};

struct RunReport {
  int64_t events_in = 0;
  int64_t malformed = 0;
  BoundingStats bounding;
  std::map<std::string, int64_t> cells_per_stratum;
  int64_t cells_noised = 0;
  PostprocessStats postprocess;
  int64_t rows_emitted = 0;
  Certificate certificate;
  ScalingState scaling;
  bool scaling_reused = false;
  // Reads of retained raw counts between the end of noising and emission.
  int64_t raw_reads_after_noise = 0;

  // events_in == malformed + unresolved + inadmissible + used + dropped.
  bool Conserved() const;
  std::string ToJson(int indent = 2) const;
};

struct PipelineOutput {
  RunReport report;
  std::vector<NoisyCell> cells;
  std::vector<ReleaseRow> rows;
  std::string csv;
};

// Runs every stage on in-memory inputs. Does not touch the filesystem except
// for the scaling state file.
absl::StatusOr<PipelineOutput> RunPipeline(const PipelineConfig& config,
                                           const RegionRegistry& registry,
                                           std::span<const SearchEvent> events,
                                           const SigmaTable& sigmas,
                                           int64_t malformed_lines = 0);

// Loads inputs named in `config`, runs, and writes the CSV if requested.
// Errors carry the failing stage as a "[stage] " message prefix.
absl::StatusOr<PipelineOutput> Run(const PipelineConfig& config);

// Exit code for a failed run: 3 for numerical failures, 2 otherwise.
int ExitCodeFor(const absl::Status& status);

}  // namespace dpagg

#endif  // DPAGG_PIPELINE_H_

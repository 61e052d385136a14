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

#include "dpagg/pipeline.h"

#include <cmath>
#include <numeric>

#include "str_util.h"
#include "csv_util.h"
#include "dpagg/ingest.h"
#include "dpagg/status_macros.h"
#include "json.hpp"

namespace dpagg {

namespace {

absl::Status Tagged(std::string_view stage, const absl::Status& status) {
  if (status.ok()) return status;
  return absl::Status(status.code(),
                      internal::StrCat("[", stage, "] ", status.message()));
}

#define RETURN_IF_ERROR_AT(stage, expr) RETURN_IF_ERROR(Tagged(stage, (expr)))

template <typename T>
absl::StatusOr<T> TaggedOr(std::string_view stage, absl::StatusOr<T> value) {
  if (value.ok()) return value;
  return Tagged(stage, value.status());
}

absl::StatusOr<std::string> NationalRegion(const PipelineConfig& config,
                                           const RegionRegistry& registry) {
  if (!config.national_region.empty()) return config.national_region;
  const std::vector<std::string> countries = registry.Countries();
  if (countries.size() != 1) {
    return absl::InvalidArgumentError(internal::StrCat(
        "registry has ", countries.size(),
        " countries; choose the national region explicitly"));
  }
  return countries.front();
}

}  // namespace

absl::Status PipelineConfig::Validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (!(sigma_scale >= 0.0) || !std::isfinite(sigma_scale)) {
    return absl::InvalidArgumentError("sigma scale must be finite and >= 0");
  }
  if (!secure_rng && !seed.has_value()) {
    return absl::InvalidArgumentError("a seed is required unless secure_rng is set");
  }
  if (sparsity.max_sparse_points < 0 ||
      sparsity.window_last_monday < sparsity.window_first_monday) {
    return absl::InvalidArgumentError("invalid sparsity window");
  }
  RETURN_IF_ERROR(reliability.Validate());
  return drop_policy.Validate();
}

bool RunReport::Conserved() const {
  const int64_t dropped = std::accumulate(bounding.events_dropped.begin(),
                                          bounding.events_dropped.end(),
                                          int64_t{0});
  return events_in == malformed + bounding.unresolved + bounding.inadmissible +
                          bounding.events_used + dropped &&
         bounding.events + malformed == events_in;
}

std::string RunReport::ToJson(int indent) const {
  nlohmann::ordered_json json;
  json["events_in"] = events_in;
  json["malformed"] = malformed;
  json["unresolved"] = bounding.unresolved;
  json["inadmissible"] = bounding.inadmissible;
  json["events_used"] = bounding.events_used;
  nlohmann::ordered_json events_dropped, candidates_dropped;
  for (size_t i = 0; i < kNumConstraints; ++i) {
    const std::string name(ConstraintName(static_cast<Constraint>(i)));
    events_dropped[name] = bounding.events_dropped[i];
    candidates_dropped[name] = bounding.candidates_dropped[i];
  }
  json["events_dropped"] = events_dropped;
  json["user_days"] = bounding.user_days;
  json["candidates"] = bounding.candidates;
  json["candidates_dropped"] = candidates_dropped;
  json["contributions"] = bounding.contributions;
  json["cells_noised"] = cells_noised;
  json["cells_per_stratum"] = cells_per_stratum;
  json["country_cells"] = postprocess.country_cells;
  json["points_evaluated"] = postprocess.points_evaluated;
  json["points_dropped_reliability"] = postprocess.points_dropped_reliability;
  json["regions_evaluated"] = postprocess.regions_evaluated;
  json["regions_dropped_sparsity"] = postprocess.regions_dropped_sparsity;
  json["points_dropped_sparsity"] = postprocess.points_dropped_sparsity;
  json["points_retained"] = postprocess.points_retained;
  json["rows_emitted"] = rows_emitted;
  json["scaling"] = {{"factor", scaling.factor},
                     {"fixed_at", scaling.fixed_at},
                     {"reused", scaling_reused}};
  json["raw_reads_after_noise"] = raw_reads_after_noise;
  json["guarantee"] = nlohmann::ordered_json::parse(CertificateToJson(certificate));
  return json.dump(indent);
}

absl::StatusOr<PipelineOutput> RunPipeline(const PipelineConfig& config,
                                           const RegionRegistry& registry,
                                           std::span<const SearchEvent> events,
                                           const SigmaTable& base_sigmas,
                                           int64_t malformed_lines) {
  RETURN_IF_ERROR_AT("config", config.Validate());
  PipelineOutput output;
  RunReport& report = output.report;
  report.events_in = static_cast<int64_t>(events.size()) + malformed_lines;
  report.malformed = malformed_lines;

  const SigmaTable sigmas = base_sigmas.Scaled(config.sigma_scale);
  ASSIGN_OR_RETURN(report.certificate,
                   TaggedOr("accounting", Certify(sigmas, config.delta)));

  {
    ASSIGN_OR_RETURN(
        BoundingResult bounded,
        TaggedOr("bounding", BoundAndAggregate(events, registry,
                                               config.drop_policy)));
    report.bounding = bounded.stats;

    NoiseOptions noise_options;
    noise_options.seed = config.seed.value_or(0);
    noise_options.secure_rng = config.secure_rng;
    noise_options.retain_raw_for_audit = config.retain_raw_for_audit;
    noise_options.noise_empty_cells = config.noise_empty_cells;
    ASSIGN_OR_RETURN(output.cells,
                     TaggedOr("noise", NoiseAll(bounded.table, sigmas, registry,
                                                noise_options)));
  }  // Raw counts go out of scope here.

  report.cells_noised = static_cast<int64_t>(output.cells.size());
  for (const NoisyCell& cell : output.cells) {
    ++report.cells_per_stratum[StratumName(Stratum{
        cell.region_type, cell.key.level, GroupOf(cell.key.category)})];
  }
  const int64_t reads_before = AuditedRawCount::TotalReads();

  PostprocessOptions post_options;
  post_options.reliability = config.reliability;
  post_options.sparsity = config.sparsity;
  post_options.absent_as_zero = config.absent_as_zero;
  ASSIGN_OR_RETURN(
      const FilteredRelease release,
      TaggedOr("postprocess",
               FilterRelease(output.cells, registry, sigmas, post_options)));
  report.postprocess = release.stats;

  std::optional<ScalingState> persisted;
  if (!config.scaling_state_path.empty()) {
    ASSIGN_OR_RETURN(persisted, TaggedOr("scaling", ReadScalingState(
                                                        config.scaling_state_path)));
  }
  if (persisted.has_value()) {
    report.scaling = *persisted;
    report.scaling_reused = true;
  } else {
    ASSIGN_OR_RETURN(const std::string national,
                     TaggedOr("scaling", NationalRegion(config, registry)));
    const std::vector<double> series = NationalSeries(release, national);
    ASSIGN_OR_RETURN(report.scaling,
                     TaggedOr("scaling",
                              ComputeScalingFactor(series, config.release_id)));
    if (!config.scaling_state_path.empty()) {
      RETURN_IF_ERROR_AT("scaling",
                         WriteScalingState(config.scaling_state_path,
                                           report.scaling));
    }
  }

  ASSIGN_OR_RETURN(output.rows, TaggedOr("emit", BuildRows(release, report.scaling,
                                                           registry)));
  output.csv = ReleaseCsv(output.rows);
  report.rows_emitted = static_cast<int64_t>(output.rows.size());
  report.raw_reads_after_noise = AuditedRawCount::TotalReads() - reads_before;
  return output;
}

absl::StatusOr<PipelineOutput> Run(const PipelineConfig& config) {
  RETURN_IF_ERROR_AT("config", config.Validate());
  ASSIGN_OR_RETURN(const RegionRegistry registry,
                   TaggedOr("registry", RegionRegistry::LoadCsv(config.registry_path)));
  SigmaTable sigmas = SigmaTable::Default();
  if (!config.sigma_table_path.empty()) {
    ASSIGN_OR_RETURN(sigmas, TaggedOr("sigma-table",
                                      SigmaTable::LoadCsv(config.sigma_table_path)));
  }
  IngestOptions ingest_options;
  ingest_options.strict = config.strict;
  ASSIGN_OR_RETURN(const IngestResult ingested,
                   TaggedOr("ingest", IngestEvents(config.events_path, ingest_options)));
  ASSIGN_OR_RETURN(PipelineOutput output,
                   RunPipeline(config, registry, ingested.events, sigmas,
                               ingested.malformed));
  if (!config.output_path.empty()) {
    RETURN_IF_ERROR_AT("emit", internal::WriteFile(config.output_path, output.csv));
  }
  return output;
}

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kInternal:
    case absl::StatusCode::kFailedPrecondition:
      return 3;
    default:
      return 2;
  }
}

}  // namespace dpagg

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

#ifndef DPAGG_INGEST_H_
#define DPAGG_INGEST_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpagg/model.h"

namespace dpagg {

inline constexpr std::string_view kEventsHeader = "user_id,date,postal_code,label";

struct IngestOptions {
  // Fail when more than `max_malformed_fraction` of the lines are malformed.
  bool strict = false;
  double max_malformed_fraction = 0.01;
};

struct IngestResult {
  std::vector<SearchEvent> events;
  int64_t lines = 0;  // Data lines, excluding header and blank lines.
  int64_t malformed = 0;
};

absl::StatusOr<SearchEvent> ParseEventLine(std::string_view line);

absl::StatusOr<IngestResult> ParseEventsCsv(std::string_view text,
                                            const IngestOptions& options = {});
absl::StatusOr<IngestResult> IngestEvents(const std::string& path,
                                          const IngestOptions& options = {});

std::string EventsToCsv(std::span<const SearchEvent> events);
absl::Status WriteEventsCsv(const std::string& path,
                            std::span<const SearchEvent> events);

}  // namespace dpagg

#endif  // DPAGG_INGEST_H_

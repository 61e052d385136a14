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

#include "dpagg/ingest.h"

#include "str_util.h"
#include "csv_util.h"
#include "dpagg/status_macros.h"

namespace dpagg {

absl::StatusOr<SearchEvent> ParseEventLine(std::string_view line) {
  const std::vector<std::string_view> fields = internal::SplitFields(line);
  if (fields.size() != 4) {
    return absl::InvalidArgumentError(
        internal::StrCat("expected 4 fields, got ", fields.size()));
  }
  if (fields[0].empty()) return absl::InvalidArgumentError("empty user id");
  if (fields[2].empty()) return absl::InvalidArgumentError("empty postal code");
  SearchEvent event;
  event.user_id = std::string(fields[0]);
  ASSIGN_OR_RETURN(event.date, ParseDate(fields[1]));
  event.postal_code = std::string(fields[2]);
  ASSIGN_OR_RETURN(event.label, ParseLabel(fields[3]));
  return event;
}

absl::StatusOr<IngestResult> ParseEventsCsv(std::string_view text,
                                            const IngestOptions& options) {
  IngestResult result;
  const std::vector<std::string_view> lines = internal::SplitLines(text);
  size_t first = 0;
  while (first < lines.size() && internal::IsBlank(lines[first])) ++first;
  if (first == lines.size()) return result;
  if (internal::StripCarriageReturn(lines[first]) != kEventsHeader) {
    return absl::InvalidArgumentError(
        internal::StrCat("events header must be '", kEventsHeader, "'"));
  }
  for (size_t i = first + 1; i < lines.size(); ++i) {
    if (internal::IsBlank(lines[i])) continue;
    ++result.lines;
    auto event = ParseEventLine(lines[i]);
    if (!event.ok()) {
      ++result.malformed;
      continue;
    }
    result.events.push_back(*std::move(event));
  }
  if (options.strict && result.lines > 0 &&
      static_cast<double>(result.malformed) >
          options.max_malformed_fraction * static_cast<double>(result.lines)) {
    return absl::InvalidArgumentError(
        internal::StrCat(result.malformed, " of ", result.lines,
                     " event lines are malformed"));
  }
  return result;
}

absl::StatusOr<IngestResult> IngestEvents(const std::string& path,
                                          const IngestOptions& options) {
  ASSIGN_OR_RETURN(const std::string text, internal::ReadFile(path));
  return ParseEventsCsv(text, options);
}

std::string EventsToCsv(std::span<const SearchEvent> events) {
  std::string out = internal::StrCat(kEventsHeader, "\n");
  for (const SearchEvent& e : events) {
    internal::StrAppend(&out, e.user_id, ",", FormatDate(e.date), ",",
                    e.postal_code, ",", LabelName(e.label), "\n");
  }
  return out;
}

absl::Status WriteEventsCsv(const std::string& path,
                            std::span<const SearchEvent> events) {
  return internal::WriteFile(path, EventsToCsv(events));
}

}  // namespace dpagg

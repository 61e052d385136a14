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

// Minimal helpers for the unquoted comma-separated files the pipeline reads.
// None of the input formats allow embedded commas or quotes.

#ifndef DPAGG_SRC_CSV_UTIL_H_
#define DPAGG_SRC_CSV_UTIL_H_

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "str_util.h"

namespace dpagg::internal {

inline std::string_view StripCarriageReturn(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::vector<std::string_view> SplitFields(std::string_view line) {
  return internal::StrSplit(StripCarriageReturn(line), ',');
}

inline std::vector<std::string_view> SplitLines(std::string_view text) {
  return internal::StrSplit(text, '\n');
}

inline bool IsBlank(std::string_view line) {
  return StripCarriageReturn(line).find_first_not_of(" \t") ==
         std::string_view::npos;
}

inline absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(internal::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline absl::Status WriteFile(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        internal::StrCat("cannot open ", path, " for writing"));
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) return absl::DataLossError(internal::StrCat("short write to ", path));
  return absl::OkStatus();
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Shortest round-trip decimal form, so emitted files are stable byte-for-byte.
inline std::string FormatDouble(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace dpagg::internal

#endif  // DPAGG_SRC_CSV_UTIL_H_

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

#include <cmath>
#include <filesystem>

#include "str_util.h"
#include "csv_util.h"
#include "dpagg/postprocess.h"
#include "dpagg/status_macros.h"
#include "json.hpp"

namespace dpagg {

absl::StatusOr<std::optional<ScalingState>> ReadScalingState(
    const std::string& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  ASSIGN_OR_RETURN(const std::string text, internal::ReadFile(path));
  const nlohmann::json json = nlohmann::json::parse(text, nullptr, false);
  if (json.is_discarded() || !json.is_object()) {
    return absl::InvalidArgumentError(
        internal::StrCat(path, ": scaling state is not a JSON object"));
  }
  if (!json.contains("factor") || !json["factor"].is_number() ||
      !json.contains("fixed_at") || !json["fixed_at"].is_string()) {
    return absl::InvalidArgumentError(internal::StrCat(
        path, ": scaling state needs a numeric 'factor' and a 'fixed_at'"));
  }
  ScalingState state;
  state.factor = json["factor"].get<double>();
  state.fixed_at = json["fixed_at"].get<std::string>();
  if (json.contains("reference_max")) {
    if (!json["reference_max"].is_number()) {
      return absl::InvalidArgumentError(
          internal::StrCat(path, ": 'reference_max' must be numeric"));
    }
    state.reference_max = json["reference_max"].get<double>();
  }
  if (!(state.factor > 0.0) || !std::isfinite(state.factor) ||
      (state.reference_max && !(*state.reference_max > 0.0))) {
    return absl::InvalidArgumentError(
        internal::StrCat(path, ": scaling factor must be positive and finite"));
  }
  return state;
}

absl::Status WriteScalingState(const std::string& path,
                               const ScalingState& state) {
  nlohmann::ordered_json json;
  json["factor"] = state.factor;
  json["fixed_at"] = state.fixed_at;
  if (state.reference_max.has_value()) json["reference_max"] = *state.reference_max;
  return internal::WriteFile(path, json.dump(2) + "\n");
}

}  // namespace dpagg

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

#include "dpagg/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "str_util.h"
#include "dpagg/status_macros.h"
#include "json.hpp"

namespace dpagg {

namespace {

constexpr double kEpsilonTolerance = 1e-6;
constexpr int kMaxBisectionIterations = 200;
constexpr double kInitialEpsilonUpperBound = 64.0;
// exp(eps) overflows beyond ~709.
constexpr double kMaxEpsilonUpperBound = 512.0;

constexpr std::array<CategoryGroup, 2> kGroups = {CategoryGroup::kAny,
                                                  CategoryGroup::kVaccine};

// One A0 cell and three vaccine cells per level.
size_t CellsPerGroup(CategoryGroup group) {
  return group == CategoryGroup::kAny ? 1 : 3;
}

bool HasTypedScales(const SigmaTable& sigmas, RegionType type) {
  for (GeoLevel level : {GeoLevel::kPostalCode, GeoLevel::kCounty}) {
    for (CategoryGroup group : kGroups) {
      if (sigmas.Contains(Stratum{type, level, group})) return true;
    }
  }
  return false;
}

}  // namespace

double StandardNormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

absl::StatusOr<double> EffectiveSigma(
    std::span<const GaussianMechanism> mechanisms) {
  if (mechanisms.empty()) {
    return absl::InvalidArgumentError("mechanism vector is empty");
  }
  double precision = 0.0;
  for (const GaussianMechanism& m : mechanisms) {
    if (!(m.sigma > 0.0) || !(m.sensitivity > 0.0)) {
      return absl::InvalidArgumentError(
          "mechanism sigma and sensitivity must be positive");
    }
    const double ratio = m.sensitivity / m.sigma;
    precision += ratio * ratio;
  }
  return 1.0 / std::sqrt(precision);
}

double DeltaForEpsilon(double sigma_eff, double epsilon) {
  if (std::isinf(sigma_eff)) return 0.0;
  const double half_shift = 1.0 / (2.0 * sigma_eff);
  const double upper = StandardNormalCdf(half_shift - epsilon * sigma_eff);
  const double lower_tail = StandardNormalCdf(-half_shift - epsilon * sigma_eff);
  // exp(eps) * tail evaluated in log space so large eps does not overflow.
  const double weighted =
      lower_tail > 0.0 ? std::exp(epsilon + std::log(lower_tail)) : 0.0;
  return std::clamp(upper - weighted, 0.0, 1.0);
}

absl::StatusOr<double> EpsilonForDeltaAtSigma(double sigma_eff, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (!(sigma_eff > 0.0)) {
    return absl::InvalidArgumentError("effective sigma must be positive");
  }
  if (DeltaForEpsilon(sigma_eff, 0.0) <= delta) return 0.0;

  double lo = 0.0;
  double hi = kInitialEpsilonUpperBound;
  while (DeltaForEpsilon(sigma_eff, hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxEpsilonUpperBound) {
      return absl::OutOfRangeError(internal::StrCat(
          "epsilon exceeds ", kMaxEpsilonUpperBound, " for delta ", delta));
    }
  }
  // Invariant: delta(lo) > target >= delta(hi).
  for (int i = 0; i < kMaxBisectionIterations; ++i) {
    if (hi - lo <= kEpsilonTolerance) return hi;
    const double mid = 0.5 * (lo + hi);
    if (DeltaForEpsilon(sigma_eff, mid) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return absl::InternalError("epsilon bisection did not converge");
}

absl::StatusOr<double> EpsilonForDelta(
    std::span<const GaussianMechanism> mechanisms, double delta) {
  ASSIGN_OR_RETURN(const double sigma_eff, EffectiveSigma(mechanisms));
  return EpsilonForDeltaAtSigma(sigma_eff, delta);
}

absl::StatusOr<MechanismVector> CaseMechanisms(const SigmaTable& sigmas,
                                               RegionType type) {
  if (type == RegionType::kNotApplicable) {
    return absl::InvalidArgumentError("cases are indexed by a population class");
  }
  MechanismVector mechanisms;
  for (GeoLevel level : {GeoLevel::kPostalCode, GeoLevel::kCounty}) {
    if (level == GeoLevel::kPostalCode && type == RegionType::kSmall) continue;
    for (CategoryGroup group : kGroups) {
      const Stratum stratum{type, level, group};
      if (!sigmas.Contains(stratum)) continue;
      ASSIGN_OR_RETURN(const double sigma, sigmas.Lookup(stratum));
      mechanisms.insert(mechanisms.end(), CellsPerGroup(group),
                        GaussianMechanism{sigma, 1.0});
    }
  }
  if (mechanisms.empty()) {
    return absl::NotFoundError(internal::StrCat(
        "no county or postal scales for class ", RegionTypeName(type)));
  }
  for (CategoryGroup group : kGroups) {
    ASSIGN_OR_RETURN(
        const double sigma,
        sigmas.Lookup(Stratum{RegionType::kNotApplicable, GeoLevel::kState, group}));
    mechanisms.insert(mechanisms.end(), CellsPerGroup(group),
                      GaussianMechanism{sigma, 1.0});
  }
  return mechanisms;
}

absl::StatusOr<Certificate> Certify(const SigmaTable& sigmas, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  Certificate certificate;
  certificate.guarantee.delta = delta;
  for (RegionType type :
       {RegionType::kLarge, RegionType::kMedium, RegionType::kSmall}) {
    // A class without county or postal scales cannot be released at all.
    if (!HasTypedScales(sigmas, type)) continue;
    ASSIGN_OR_RETURN(const MechanismVector mechanisms,
                     CaseMechanisms(sigmas, type));

    CaseGuarantee c;
    c.name = std::string(RegionTypeName(type));
    c.type = type;
    c.mechanism_count = mechanisms.size();
    const bool noiseless = std::any_of(
        mechanisms.begin(), mechanisms.end(),
        [](const GaussianMechanism& m) { return m.sigma == 0.0; });
    if (noiseless) {
      c.effective_sigma = 0.0;
      c.epsilon = std::numeric_limits<double>::infinity();
    } else {
      ASSIGN_OR_RETURN(c.effective_sigma, EffectiveSigma(mechanisms));
      ASSIGN_OR_RETURN(c.epsilon, EpsilonForDeltaAtSigma(c.effective_sigma, delta));
    }
    certificate.guarantee.epsilon =
        std::max(certificate.guarantee.epsilon, c.epsilon);
    certificate.cases.push_back(std::move(c));
  }
  if (certificate.cases.empty()) {
    return absl::InvalidArgumentError(
        "sigma table has no county or postal scales; nothing to certify");
  }
  return certificate;
}

std::string CertificateToJson(const Certificate& certificate, int indent) {
  nlohmann::ordered_json json;
  json["epsilon"] = certificate.guarantee.epsilon;
  json["delta"] = certificate.guarantee.delta;
  json["cases"] = nlohmann::ordered_json::array();
  for (const CaseGuarantee& c : certificate.cases) {
    nlohmann::ordered_json entry;
    entry["name"] = c.name;
    entry["epsilon"] = c.epsilon;
    entry["mechanisms"] = c.mechanism_count;
    entry["effective_sigma"] = c.effective_sigma;
    json["cases"].push_back(std::move(entry));
  }
  return json.dump(indent);
}

}  // namespace dpagg

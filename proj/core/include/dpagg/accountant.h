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

// Privacy accounting for one user-day of contributions.
//
// A user-day touches at most one cell per (level, category), and all of its
// county and postal cells share one population class. Its influence on the
// release is therefore a composition of independent Gaussian mechanisms, one
// per cell, whose noise scales are read off the sigma table for that class.
// Composing Gaussian mechanisms with scales sigma_i and sensitivities s_i is
// exactly as private as a single sensitivity-1 Gaussian mechanism with
//
//   1 / sigma_eff^2 = sum_i (s_i / sigma_i)^2,
//
// whose tight (epsilon, delta) curve is
//
//   delta(eps) = Phi(1 / (2 sigma) - eps sigma)
//                - exp(eps) Phi(-1 / (2 sigma) - eps sigma).
//
// The guarantee of the whole release is the worst case over the three
// population classes, exactly one of which applies to any user-day.

#ifndef DPAGG_ACCOUNTANT_H_
#define DPAGG_ACCOUNTANT_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpagg/geo.h"
#include "dpagg/noise.h"

namespace dpagg {

struct GaussianMechanism {
  double sigma = 1.0;
  double sensitivity = 1.0;
};

using MechanismVector = std::vector<GaussianMechanism>;

struct PrivacyGuarantee {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Standard normal CDF, accurate in both tails.
double StandardNormalCdf(double x);

absl::StatusOr<double> EffectiveSigma(std::span<const GaussianMechanism> mechanisms);

// Tight delta of a sensitivity-1 Gaussian mechanism with scale `sigma_eff`
// at `epsilon` >= 0.
double DeltaForEpsilon(double sigma_eff, double epsilon);

// Smallest epsilon whose delta does not exceed `delta`, within 1e-6. The
// returned value is always on the safe side of the tolerance.
absl::StatusOr<double> EpsilonForDelta(std::span<const GaussianMechanism> mechanisms,
                                       double delta);
absl::StatusOr<double> EpsilonForDeltaAtSigma(double sigma_eff, double delta);

// Mechanisms a single user-day can influence when its county and postal
// contributions have class `type`: postal and county cells if the table has
// scales for them, plus the state cells. Four categories per level.
absl::StatusOr<MechanismVector> CaseMechanisms(const SigmaTable& sigmas,
                                               RegionType type);

struct CaseGuarantee {
  std::string name;  // "large", "medium" or "small".
  RegionType type = RegionType::kLarge;
  size_t mechanism_count = 0;
  double effective_sigma = 0.0;
  double epsilon = 0.0;
};

struct Certificate {
  PrivacyGuarantee guarantee;
  std::vector<CaseGuarantee> cases;
};

// Worst case over the population classes that have at least one county or
// postal scale in `sigmas`. A zero sigma anywhere makes its case (and the
// certificate) infinite.
absl::StatusOr<Certificate> Certify(const SigmaTable& sigmas, double delta);

// {"epsilon":..., "delta":..., "cases":[{"name":"large","epsilon":...},...]}
std::string CertificateToJson(const Certificate& certificate, int indent = -1);

}  // namespace dpagg

#endif  // DPAGG_ACCOUNTANT_H_

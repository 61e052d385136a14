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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "boost/math/quadrature/gauss_kronrod.hpp"
#include "boost/math/tools/roots.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace dpagg {
namespace {

constexpr double kDelta = 1e-5;

// Hockey-stick divergence between N(0, sigma^2) and N(1, sigma^2), integrated
// numerically over the region where the first density dominates.
double QuadratureDelta(double sigma, double epsilon) {
  const double threshold = 0.5 - epsilon * sigma * sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  auto integrand = [&](double x) {
    const double p = norm * std::exp(-x * x / (2.0 * sigma * sigma));
    const double q = norm * std::exp(-(x - 1.0) * (x - 1.0) / (2.0 * sigma * sigma));
    return p - std::exp(epsilon) * q;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -std::numeric_limits<double>::infinity(), threshold, 15, 1e-14);
}

double QuadratureEpsilon(double sigma, double delta) {
  auto f = [&](double epsilon) { return QuadratureDelta(sigma, epsilon) - delta; };
  std::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, 0.0, 60.0, boost::math::tools::eps_tolerance<double>(40), iterations);
  return (lo + hi) / 2.0;
}

// Sensitivity-weighted inverse-variance sum, written out directly.
double CaseSigma(std::vector<std::pair<double, int>> sigma_copies) {
  double precision = 0.0;
  for (const auto& [sigma, copies] : sigma_copies) {
    precision += copies / (sigma * sigma);
  }
  return 1.0 / std::sqrt(precision);
}

const double kLargeSigma =
    CaseSigma({{35, 1}, {3.25, 3}, {180, 1}, {20, 3}, {450, 1}, {35, 3}});
const double kMediumSigma =
    CaseSigma({{40, 1}, {3.5, 3}, {100, 1}, {8, 3}, {450, 1}, {35, 3}});
const double kSmallSigma = CaseSigma({{28, 1}, {3.21, 3}, {450, 1}, {35, 3}});

TEST(EffectiveSigmaTest, SingleAndComposedMechanisms) {
  const std::vector<GaussianMechanism> one = {{2.0, 1.0}};
  EXPECT_DOUBLE_EQ(*EffectiveSigma(one), 2.0);
  const std::vector<GaussianMechanism> two = {{2.0, 1.0}, {2.0, 1.0}};
  EXPECT_NEAR(*EffectiveSigma(two), std::sqrt(2.0), 1e-12);
  const std::vector<GaussianMechanism> scaled = {{4.0, 2.0}};
  EXPECT_DOUBLE_EQ(*EffectiveSigma(scaled), 2.0);
  EXPECT_FALSE(EffectiveSigma(std::vector<GaussianMechanism>{}).ok());
  EXPECT_FALSE(EffectiveSigma(std::vector<GaussianMechanism>{{0.0, 1.0}}).ok());
}

TEST(EffectiveSigmaTest, ProductionCases) {
  const SigmaTable table = SigmaTable::Default();
  const std::pair<RegionType, double> cases[] = {
      {RegionType::kLarge, kLargeSigma},
      {RegionType::kMedium, kMediumSigma},
      {RegionType::kSmall, kSmallSigma}};
  for (const auto& [type, expected] : cases) {
    auto mechanisms = CaseMechanisms(table, type);
    ASSERT_TRUE(mechanisms.ok()) << mechanisms.status();
    EXPECT_EQ(mechanisms->size(), type == RegionType::kSmall ? 8u : 12u);
    EXPECT_NEAR(*EffectiveSigma(*mechanisms), expected, 1e-12);
  }
}

TEST(DeltaTest, ClosedFormMatchesQuadrature) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> sigma_dist(0.5, 10.0);
  std::uniform_real_distribution<double> epsilon_dist(0.1, 5.0);
  for (int i = 0; i < 20; ++i) {
    const double sigma = sigma_dist(rng);
    const double epsilon = epsilon_dist(rng);
    EXPECT_NEAR(DeltaForEpsilon(sigma, epsilon), QuadratureDelta(sigma, epsilon),
                1e-8)
        << "sigma=" << sigma << " epsilon=" << epsilon;
  }
}

TEST(DeltaTest, MonteCarloPrivacyLoss) {
  // delta(eps) = E[(1 - exp(eps - L))_+] with L the privacy loss under P.
  const double sigma = 1.5;
  const double epsilon = 1.0;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, sigma);
  constexpr int kSamples = 400'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double x = noise(rng);
    const double loss = (1.0 - 2.0 * x) / (2.0 * sigma * sigma);
    const double term = std::max(0.0, 1.0 - std::exp(epsilon - loss));
    sum += term;
    sum_sq += term * term;
  }
  const double mean = sum / kSamples;
  const double stderr_mean = std::sqrt((sum_sq / kSamples - mean * mean) / kSamples);
  EXPECT_NEAR(DeltaForEpsilon(sigma, epsilon), mean, 4.0 * stderr_mean);
}

TEST(DeltaTest, DecreasingInEpsilonAndSigma) {
  double previous = 1.0;
  for (double epsilon = 0.0; epsilon <= 6.0; epsilon += 0.25) {
    const double delta = DeltaForEpsilon(1.8, epsilon);
    EXPECT_LE(delta, previous);
    EXPECT_GE(delta, 0.0);
    previous = delta;
  }
  EXPECT_GT(DeltaForEpsilon(1.0, 1.0), DeltaForEpsilon(2.0, 1.0));
}

TEST(EpsilonTest, InvertsDelta) {
  for (double sigma : {0.7, 1.84, 3.0, 8.0}) {
    for (double delta : {1e-3, 1e-5, 1e-9}) {
      auto epsilon = EpsilonForDeltaAtSigma(sigma, delta);
      ASSERT_TRUE(epsilon.ok()) << epsilon.status();
      EXPECT_LE(DeltaForEpsilon(sigma, *epsilon), delta * (1 + 1e-6));
      EXPECT_NEAR(*epsilon, QuadratureEpsilon(sigma, delta), 1e-5)
          << "sigma=" << sigma << " delta=" << delta;
    }
  }
  EXPECT_FALSE(EpsilonForDeltaAtSigma(1.0, 0.0).ok());
  EXPECT_FALSE(EpsilonForDeltaAtSigma(1.0, 1.0).ok());
}

TEST(EpsilonTest, CompositionMatchesEffectiveSigma) {
  const std::vector<GaussianMechanism> mechanisms = {
      {3.0, 1.0}, {5.0, 1.0}, {2.5, 1.0}};
  const double sigma_eff = *EffectiveSigma(mechanisms);
  EXPECT_NEAR(*EpsilonForDelta(mechanisms, kDelta),
              *EpsilonForDeltaAtSigma(sigma_eff, kDelta), 1e-9);
}

TEST(EpsilonTest, ProductionCasesAgainstQuadrature) {
  const std::pair<double, double> cases[] = {
      {kLargeSigma, 2.186}, {kMediumSigma, 2.187}, {kSmallSigma, 2.186}};
  for (const auto& [sigma, published] : cases) {
    const double epsilon = *EpsilonForDeltaAtSigma(sigma, kDelta);
    EXPECT_NEAR(epsilon, published, 0.005);
    EXPECT_NEAR(epsilon, QuadratureEpsilon(sigma, kDelta), 1e-5);
  }
}

TEST(CertifyTest, ProductionTableMeetsAdvertisedBudget) {
  auto certificate = Certify(SigmaTable::Default(), kDelta);
  ASSERT_TRUE(certificate.ok()) << certificate.status();
  EXPECT_LE(certificate->guarantee.epsilon, 2.19);
  EXPECT_EQ(certificate->guarantee.delta, kDelta);
  ASSERT_EQ(certificate->cases.size(), 3u);
  double worst = 0.0;
  for (const CaseGuarantee& c : certificate->cases) worst = std::max(worst, c.epsilon);
  EXPECT_EQ(certificate->guarantee.epsilon, worst);
  EXPECT_EQ(certificate->cases[0].name, "large");
  EXPECT_EQ(certificate->cases[2].mechanism_count, 8u);
}

TEST(CertifyTest, MoreNoiseNeverCostsMore) {
  double previous = std::numeric_limits<double>::infinity();
  for (double factor : {0.5, 1.0, 1.5, 3.0}) {
    auto certificate = Certify(SigmaTable::Default().Scaled(factor), kDelta);
    ASSERT_TRUE(certificate.ok());
    EXPECT_LT(certificate->guarantee.epsilon, previous);
    previous = certificate->guarantee.epsilon;
  }
}

TEST(CertifyTest, ZeroNoiseIsUnbounded) {
  auto certificate = Certify(SigmaTable::Default().Scaled(0.0), kDelta);
  ASSERT_TRUE(certificate.ok()) << certificate.status();
  EXPECT_TRUE(std::isinf(certificate->guarantee.epsilon));
  const auto json = nlohmann::json::parse(CertificateToJson(*certificate));
  EXPECT_TRUE(json["epsilon"].is_null());
}

TEST(CertifyTest, JsonRoundTrip) {
  auto certificate = Certify(SigmaTable::Default(), kDelta);
  ASSERT_TRUE(certificate.ok());
  const auto json = nlohmann::json::parse(CertificateToJson(*certificate, 2));
  EXPECT_DOUBLE_EQ(json["epsilon"].get<double>(), certificate->guarantee.epsilon);
  EXPECT_DOUBLE_EQ(json["delta"].get<double>(), kDelta);
  ASSERT_EQ(json["cases"].size(), 3u);
  EXPECT_EQ(json["cases"][1]["name"], "medium");
  EXPECT_EQ(json["cases"][1]["mechanisms"], 12);
}

}  // namespace
}  // namespace dpagg

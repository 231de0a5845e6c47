// Copyright 2026 The cpesdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cpesdp/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.hpp"

namespace cpesdp {
namespace {

using ::testing::DoubleNear;
using ::testing::HasSubstr;

using testing::RefKl;
using testing::RefTiltedMass;

TEST(KlFromK1Test, MatchesQuadrature) {
  for (auto [b, k1] : std::vector<std::pair<double, double>>{
           {1.0, 2.0}, {1.0, 1.1}, {20.0, 26.0}, {3.0, 300.0}}) {
    EXPECT_THAT(KlFromK1(k1, b), DoubleNear(RefKl(b, k1), 1e-6))
        << "b=" << b << " k1=" << k1;
  }
}

TEST(KlFromK1Test, StrictlyDecreasingInTilt) {
  double previous = KlFromK1(1.0001, 1.0);
  for (double k1 = 1.01; k1 < 1e4; k1 *= 1.3) {
    const double kl = KlFromK1(k1, 1.0);
    EXPECT_LT(kl, previous) << k1;
    EXPECT_GT(kl, 0.0);
    previous = kl;
  }
}

TEST(KlFromK1Test, RejectsTiltAtOrBelowScale) {
  try {
    KlFromK1(1.0, 1.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_THAT(e.what(), HasSubstr("attack distribution undefined"));
  }
  EXPECT_THROW(KlFromK1(0.5, 1.0), DomainError);
  EXPECT_THROW(KlFromK1(2.0, 0.0), DomainError);
}

TEST(AttackPdfTest, PeakValueAtUnitScale) {
  const auto a = AttackProfile::FromTilt(PrivacyParams::FromScale(1.0, 4.0), 2.0);
  EXPECT_THAT(AttackPdf(4.0, a), DoubleNear(1.0 / RefTiltedMass(4.0, 1.0, 2.0), 1e-9));
  EXPECT_DOUBLE_EQ(AttackPdf(4.0, a), 0.375);
}

TEST(AttackPdfTest, IntegratesToOne) {
  const auto a = AttackProfile::FromTilt(PrivacyParams::FromScale(20.0, 33.0), 26.0);
  const double mass = testing::Integrate([&a](double y) { return AttackPdf(y, a); },
                                         33.0 - 1600, 33.0 + 15000, {33.0});
  EXPECT_THAT(mass, DoubleNear(1.0, 1e-9));
}

TEST(AttackPdfTest, WeakTiltApproachesLaplace) {
  const double b = 1.5;
  const auto a = AttackProfile::FromTilt(PrivacyParams::FromScale(b), 1e6 * b);
  for (double y : {-6.0, -1.0, 0.0, 0.5, 4.0}) {
    EXPECT_THAT(AttackPdf(y, a), DoubleNear(testing::RefLaplace(y, 0.0, b), 1e-5)) << y;
  }
}

TEST(SolveK1Test, OperatingPoint) {
  const double k1 = SolveK1(2.0, 20.0);
  EXPECT_THAT(k1, DoubleNear(26.0, 0.5));
  EXPECT_THAT(RefKl(20.0, k1), DoubleNear(2.0, 1e-6));
}

TEST(SolveK1Test, LargeBudgetPushesTiltToScale) {
  const double b = 3.0;
  const double k1 = SolveK1(1e3, b);
  EXPECT_GT(k1, b);
  EXPECT_LT(k1 - b, 1e-3 * b);
}

TEST(SolveK1Test, RoundTrip) {
  for (double b : {0.01, 1.0, 20.0, 500.0}) {
    for (double gamma : {1e-4, 0.1, 2.0, 50.0}) {
      const double k1 = SolveK1(gamma, b);
      EXPECT_THAT(KlFromK1(k1, b), DoubleNear(gamma, 1e-9 * std::max(1.0, gamma)))
          << "b=" << b << " gamma=" << gamma;
    }
  }
}

TEST(SolveK1Test, TiltDecreasesWithBudget) {
  double previous = SolveK1(0.01, 5.0);
  for (double gamma : {0.05, 0.3, 1.0, 4.0, 20.0}) {
    const double k1 = SolveK1(gamma, 5.0);
    EXPECT_LT(k1, previous);
    previous = k1;
  }
}

TEST(SolveK1Test, DegenerateBudgetRejected) {
  for (double gamma : {0.0, -1.0}) {
    try {
      SolveK1(gamma, 1.0);
      FAIL();
    } catch (const DomainError& e) {
      EXPECT_THAT(e.what(), HasSubstr("degenerate stealth budget"));
    }
  }
}

TEST(OptimalImpactTest, OperatingPointDeviation) {
  const auto a = AttackProfile::FromBudget(PrivacyParams::FromScale(20.0, 33.18), 2.0);
  EXPECT_GE(a.deviation(), 72.0);
  EXPECT_LE(a.deviation(), 81.0);
  EXPECT_NEAR(OptimalImpact(a) - 33.18, a.deviation(), 1e-9);
}

TEST(OptimalImpactTest, MatchesQuadratureMean) {
  const double b = 2.0, k1 = 3.5, theta = -7.0;
  const auto a = AttackProfile::FromTilt(PrivacyParams::FromScale(b, theta), k1);
  const double mass = RefTiltedMass(theta, b, k1);
  const double mean = testing::Integrate(
      [=](double y) { return y * testing::RefTiltedUnnormalised(y, theta, b, k1) / mass; },
      theta - 80 * b, theta + 80 * k1 * b / (k1 - b), {theta});
  EXPECT_THAT(OptimalImpact(a), DoubleNear(mean, 1e-7));
}

TEST(OptimalImpactTest, GrowsWithBudgetAndScale) {
  double previous = 0.0;
  for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double dev = AttackProfile::FromBudget(PrivacyParams::FromScale(20.0), gamma).deviation();
    EXPECT_GT(dev, previous);
    previous = dev;
  }
  previous = 0.0;
  for (double b : {1.0, 5.0, 20.0, 100.0}) {
    const double dev = AttackProfile::FromBudget(PrivacyParams::FromScale(b), 2.0).deviation();
    EXPECT_GT(dev, previous);
    previous = dev;
  }
}

TEST(OptimalImpactTest, ShiftsWithLocation) {
  const auto p = PrivacyParams::FromScale(4.0, 0.0);
  const auto a = AttackProfile::FromBudget(p, 0.7);
  for (double c : {-100.0, 3.25, 1e4}) {
    const auto shifted = a.WithTheta(c);
    EXPECT_NEAR(OptimalImpact(shifted), OptimalImpact(a) + c, 1e-9 * (1 + std::abs(c)));
    EXPECT_DOUBLE_EQ(AttackPdf(1.0 + c, shifted), AttackPdf(1.0, a));
  }
}

TEST(SampleAttackNoiseTest, MeanMatchesImpact) {
  const auto a = AttackProfile::FromTilt(PrivacyParams::FromScale(1.0), 2.0);
  Rng rng(17);
  std::vector<double> xs(1'000'000);
  for (double& x : xs) x = SampleAttackNoise(a, rng);
  // Second moment by quadrature sets the 3-sigma band.
  const double mass = RefTiltedMass(0.0, 1.0, 2.0);
  const double m2 = testing::Integrate(
      [=](double y) { return y * y * testing::RefTiltedUnnormalised(y, 0.0, 1.0, 2.0) / mass; },
      -80, 160, {0.0});
  const double sd = std::sqrt((m2 - 16.0 / 9.0) / xs.size());
  EXPECT_THAT(testing::Mean(xs), DoubleNear(4.0 / 3.0, 3 * sd));
}

TEST(SampleAttackNoiseTest, HistogramFitsDensity) {
  const double b = 1.0, k1 = 2.0;
  const auto a = AttackProfile::FromTilt(PrivacyParams::FromScale(b), k1);
  const double mass = RefTiltedMass(0.0, b, k1);
  std::vector<double> edges;
  for (double e = -3.0; e <= 8.0 + 1e-9; e += 0.5) edges.push_back(e);
  Rng rng(99);
  std::vector<double> xs(200'000);
  for (double& x : xs) x = SampleAttackNoise(a, rng);
  const double p = testing::ChiSquareFitPValue(
      xs, edges,
      [=](double y) { return testing::RefTiltedUnnormalised(y, 0.0, b, k1) / mass; },
      -80.0, 0.0);
  EXPECT_GT(p, 0.01);
}

TEST(SampleAttackNoiseTest, DeterministicForSeed) {
  const auto a = AttackProfile::FromBudget(PrivacyParams::FromScale(20.0, 1.0), 2.0);
  EXPECT_EQ(SampleAttackNoise(a, 5), SampleAttackNoise(a, 5));
  EXPECT_NE(SampleAttackNoise(a, 5), SampleAttackNoise(a, 6));
}

TEST(AttackMixtureTest, WeightsAndRates) {
  const auto a = AttackProfile::FromTilt(PrivacyParams::FromScale(1.0), 2.0);
  EXPECT_DOUBLE_EQ(a.mixture().left_weight, 0.25);
  EXPECT_DOUBLE_EQ(a.mixture().right_weight, 0.75);
  EXPECT_DOUBLE_EQ(a.mixture().left_rate, 1.5);
  EXPECT_DOUBLE_EQ(a.mixture().right_rate, 0.5);
}

}  // namespace
}  // namespace cpesdp

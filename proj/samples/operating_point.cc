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

// Picks the privacy loss for a PMU feed whose hourly readings have
// sensitivity 2 KWh, so that an attacker with KL budget 2 cannot move the
// released value more than 76.82 KWh above 33.18 KWh. Then checks the
// forward direction at the chosen epsilon.

#include <cstdio>

#include "cpesdp/cpesdp.hpp"

int main() {
  const double theta = 33.18;
  const auto cal = cpesdp::CalibrateEpsilon(
      {.sensitivity = 2.0, .gamma = 2.0, .theta = theta, .max_deviation = 76.82});
  std::printf("epsilon %.5f  scale %.4f  k1 %.4f  impact %.2f\n", cal.epsilon,
              cal.scale, cal.k1, cal.predicted_impact);

  const auto params = cpesdp::PrivacyParams::Create(2.0, cal.epsilon, theta);
  const auto attack = cpesdp::AttackProfile::FromBudget(params, 2.0);
  std::printf("forward check: impact %.2f  deviation %.2f\n", attack.mu_star(),
              attack.deviation());

  cpesdp::Rng rng(cpesdp::DeriveSeed(1, "sample"));
  double sum = 0.0;
  constexpr int kDraws = 100'000;
  for (int i = 0; i < kDraws; ++i) sum += cpesdp::SampleAttackNoise(attack, rng);
  std::printf("empirical mean of %d attack draws: %.2f\n", kDraws, sum / kDraws);
  return 0;
}

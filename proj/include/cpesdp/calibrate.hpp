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

// Defender-side parameter design. Given the query sensitivity, an assumed
// attacker stealth budget gamma and the largest mean shift d the system can
// tolerate, find the privacy loss epsilon whose optimal attack shifts the
// result by exactly d.
//
// Eliminating b from the attacker's KL constraint and impact formula gives
//
//   d / k1 + ln(2 k1 / (2 k1 + d)) = gamma,        b^2 = k1^2 d / (2 k1 + d),
//
// and epsilon = sensitivity / b.

#pragma once

#include <cmath>
#include <limits>

#include "cpesdp/adversary.hpp"
#include "cpesdp/laplace.hpp"
#include "cpesdp/solver.hpp"

namespace cpesdp {

struct DesignSpec {
  double sensitivity = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
  double max_deviation = 0.0;
};

struct DesignResult {
  double k1 = 0.0;
  double scale = 0.0;
  double epsilon = 0.0;
  // Mean under the optimal attack at the calibrated epsilon, recomputed
  // through the attacker model.
  double predicted_impact = 0.0;
};

// Left-hand side of the design equation as a function of k1.
inline double DesignResidualLhs(double k1, double d) {
  const double x = d / k1;
  return x - std::log1p(0.5 * x);
}

inline double SolveDesignK1(double d, double gamma) {
  if (!(d > 0.0) || !(gamma > 0.0) || !std::isfinite(d) ||
      !std::isfinite(gamma)) {
    throw DomainError("boundary case; use limit analysis");
  }
  // Decreasing in k1: +inf at 0+, 0 at infinity. The root scales with d.
  const auto residual = [d, gamma](double k1) {
    return DesignResidualLhs(k1, d) - gamma;
  };
  double lo = d * 1e-9;
  while (residual(lo) <= 0.0) {
    lo *= 1e-3;
    if (!(lo > 0.0)) throw DomainError("could not bracket design k1");
  }
  const double hi = ExpandUpperBracket(residual, lo, d * 1e9);
  return Bisect(residual, lo, hi, {.x_tolerance = 0.0});
}

inline double DesignScale(double k1, double d) {
  return std::sqrt(k1 * k1 * d / (2.0 * k1 + d));
}

inline DesignResult CalibrateEpsilon(const DesignSpec& spec) {
  if (!(spec.sensitivity >= 0.0) || !std::isfinite(spec.sensitivity)) {
    throw DomainError("sensitivity must be non-negative and finite");
  }
  if (spec.sensitivity == 0.0) {
    throw DomainError("zero-sensitivity query needs no noise");
  }
  if (!std::isfinite(spec.theta)) throw DomainError("theta must be finite");

  DesignResult r;
  r.k1 = SolveDesignK1(spec.max_deviation, spec.gamma);
  r.scale = DesignScale(r.k1, spec.max_deviation);
  r.epsilon = spec.sensitivity / r.scale;

  const auto base =
      PrivacyParams::Create(spec.sensitivity, r.epsilon, spec.theta);
  r.predicted_impact =
      OptimalImpact(AttackProfile::FromBudget(base, spec.gamma));
  return r;
}

enum class BoundaryRegime {
  // d -> 0, gamma -> 0: b -> 0, epsilon -> infinity.
  kNoNoiseLimit,
  // d -> infinity, gamma -> infinity: b -> infinity, epsilon -> 0.
  kUnboundedImpactLimit,
};

struct BoundaryLimits {
  BoundaryRegime regime;
  double scale_limit;
  double epsilon_limit;
};

// Classifies a degenerate design request instead of solving it. Accepts
// d == 0, or an infinite gamma or d.
inline BoundaryLimits BoundaryReport(double max_deviation, double gamma) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (max_deviation == 0.0) {
    return {BoundaryRegime::kNoNoiseLimit, 0.0, kInf};
  }
  if (std::isinf(gamma) || std::isinf(max_deviation)) {
    return {BoundaryRegime::kUnboundedImpactLimit, kInf, 0.0};
  }
  throw DomainError("use calibrate_epsilon");
}

inline const char* ToString(BoundaryRegime r) {
  return r == BoundaryRegime::kNoNoiseLimit ? "NoNoiseLimit"
                                            : "UnboundedImpactLimit";
}

}  // namespace cpesdp

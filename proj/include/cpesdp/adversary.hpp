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

// Optimal false-data-injection attacker against a Laplace mechanism.
//
// The attacker draws its injected value from an exponentially tilted
// Laplace density
//
//   f_a(y) = (k1^2 - b^2) / (2 b k1^2) * exp(-|y - theta| / b + (y - theta) / k1)
//
// where k1 > b is chosen so that KL(f_a || f_0) equals the attacker's stealth
// budget gamma. The resulting mean shift is 2 b^2 k1 / (k1^2 - b^2).

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpesdp/laplace.hpp"
#include "cpesdp/rng.hpp"
#include "cpesdp/solver.hpp"

namespace cpesdp {

namespace internal {

inline void RequireTilt(double k1, double b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError("attack distribution undefined: scale must be positive");
  }
  if (!(k1 > b)) throw DomainError("attack distribution undefined: k1 <= b");
}

}  // namespace internal

// KL(f_a || f_0) as a function of the tilt k1:
//   2 b^2 / (k1^2 - b^2) + ln(1 - b^2 / k1^2).
// Strictly decreasing on (b, inf), unbounded at b+, vanishing at infinity.
inline double KlFromK1(double k1, double b) {
  internal::RequireTilt(k1, b);
  if (std::isinf(k1)) return 0.0;
  const double gap = (k1 - b) * (k1 + b);
  return 2.0 * b * b / gap + std::log1p(-b / k1) + std::log1p(b / k1);
}

// Unique k1 in (b, inf) with KlFromK1(k1, b) == gamma.
inline double SolveK1(double gamma, double b) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("degenerate stealth budget");
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError("scale must be positive");
  }
  const auto residual = [gamma, b](double k1) { return KlFromK1(k1, b) - gamma; };
  const double lo = b * (1.0 + 1e-12);
  if (residual(lo) <= 0.0) {
    throw DomainError("stealth budget too large to resolve k1 above b");
  }
  const double hi = ExpandUpperBracket(residual, lo, 2.0 * b);
  return Bisect(residual, lo, hi, {.x_tolerance = 0.0});
}

// Mean shift of the optimal attack, 2 b^2 k1 / (k1^2 - b^2).
inline double OptimalDeviation(double k1, double b) {
  internal::RequireTilt(k1, b);
  if (std::isinf(k1)) return 0.0;
  return 2.0 * b * b * k1 / ((k1 - b) * (k1 + b));
}

// Two one-sided exponentials making up the attack density: with probability
// `left_weight` theta - Exp(left_rate), otherwise theta + Exp(right_rate).
struct AttackMixture {
  double left_weight;
  double right_weight;
  double left_rate;
  double right_rate;
};

class AttackProfile {
 public:
  // Solves the tilt for a stealth budget gamma > 0 against `base`.
  static AttackProfile FromBudget(const PrivacyParams& base, double gamma) {
    const double k1 = SolveK1(gamma, base.scale());
    return AttackProfile(base, gamma, k1);
  }

  // Uses an explicit tilt k1 > b; gamma is the implied KL budget.
  static AttackProfile FromTilt(const PrivacyParams& base, double k1) {
    return AttackProfile(base, KlFromK1(k1, base.scale()), k1);
  }

  const PrivacyParams& base() const { return base_; }
  double gamma() const { return gamma_; }
  double k1() const { return k1_; }
  double scale() const { return base_.scale(); }
  double theta() const { return base_.theta(); }
  double mu_star() const { return mu_star_; }
  double deviation() const { return OptimalDeviation(k1_, scale()); }
  const AttackMixture& mixture() const { return mixture_; }

  AttackProfile WithTheta(double theta) const {
    return AttackProfile(base_.WithTheta(theta), gamma_, k1_);
  }

 private:
  AttackProfile(const PrivacyParams& base, double gamma, double k1)
      : base_(base), gamma_(gamma), k1_(k1) {
    const double b = base_.scale();
    internal::RequireTilt(k1_, b);
    const double theta = base_.theta();

    // Impact as the ratio of quadratics, checked against the closed form.
    const double b2 = b * b;
    const double k2 = k1_ * k1_;
    mu_star_ = (b2 * (theta - 2.0 * k1_) - theta * k2) / (b2 - k2);
    const double closed = theta + OptimalDeviation(k1_, b);
    const double tol = 1e-9 * (std::abs(theta) + std::abs(closed - theta) + b);
    if (!(std::abs(mu_star_ - closed) <= tol)) {
      throw std::logic_error("optimal impact forms disagree");
    }

    mixture_.left_weight = (k1_ - b) / (2.0 * k1_);
    mixture_.right_weight = (k1_ + b) / (2.0 * k1_);
    mixture_.left_rate = 1.0 / b + 1.0 / k1_;
    mixture_.right_rate = 1.0 / b - 1.0 / k1_;
    if (std::abs(mixture_.left_weight + mixture_.right_weight - 1.0) >
        4.0 * std::numeric_limits<double>::epsilon()) {
      throw std::logic_error("attack mixture weights do not sum to one");
    }
  }

  PrivacyParams base_;
  double gamma_;
  double k1_;
  double mu_star_ = 0.0;
  AttackMixture mixture_{};
};

inline double AttackPdf(double y, const AttackProfile& a) {
  const double b = a.scale();
  const double k1 = a.k1();
  const double z = y - a.theta();
  const double norm = (k1 - b) * (k1 + b) / (2.0 * b * k1 * k1);
  return norm * std::exp(-std::abs(z) / b + z / k1);
}

// Mean of the manipulated result under the optimal attack.
inline double OptimalImpact(const AttackProfile& a) { return a.mu_star(); }

inline double SampleAttackNoise(const AttackProfile& a, Rng& rng) {
  const AttackMixture& m = a.mixture();
  if (rng.UniformOpen() < m.left_weight) {
    return a.theta() - rng.Exponential(m.left_rate);
  }
  return a.theta() + rng.Exponential(m.right_rate);
}

inline double SampleAttackNoise(const AttackProfile& a, Seed seed) {
  Rng rng(seed);
  return SampleAttackNoise(a, rng);
}

}  // namespace cpesdp

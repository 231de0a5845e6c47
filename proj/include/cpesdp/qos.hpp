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

// Quality of service under DP and false data injection, measured on
// forecasts. Privacy cost is the forecast distance between DP data and the
// original; security cost is the forecast distance between attacked DP data
// and DP data. Both are mean absolute differences in series units.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cpesdp/adversary.hpp"
#include "cpesdp/forecast.hpp"
#include "cpesdp/laplace.hpp"
#include "cpesdp/rng.hpp"
#include "cpesdp/series.hpp"

namespace cpesdp {

struct CostReport {
  double privacy_cost = 0.0;
  double security_cost = 0.0;
  double defense_cost = 0.0;
  double epsilon = 0.0;
};

// Half-open index range [begin, end) of attacked points.
struct AttackWindow {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
};

// Adds one independent Laplace draw per layer to every present value.
inline MeasurementSeries ApplyDp(const MeasurementSeries& series,
                                 std::span<const PrivacyParams> layers,
                                 Seed seed) {
  std::vector<double> v = series.values();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Rng rng(DeriveSeed(seed, "qos-dp-layer", l));
    for (double& x : v) x += SampleLaplaceNoise(layers[l].scale(), rng);
  }
  return series.WithValues(v);
}

inline MeasurementSeries ApplyDp(const MeasurementSeries& series,
                                 const PrivacyParams& layer, Seed seed) {
  return ApplyDp(series, std::span<const PrivacyParams>(&layer, 1), seed);
}

// Adds attack noise (drawn around the profile's location, normally 0) to the
// points in `window` of a plaintext series. Draw i depends only on (seed, i).
inline MeasurementSeries ApplyAttack(const MeasurementSeries& series,
                                     const AttackProfile& attack,
                                     AttackWindow window, Seed seed) {
  if (window.begin > window.end || window.end > series.size()) {
    throw DomainError("attack window outside series");
  }
  std::vector<double> v = series.values();
  for (std::size_t i = window.begin; i < window.end; ++i) {
    Rng rng(DeriveSeed(seed, "qos-attack", i));
    v[i] += SampleAttackNoise(attack, rng);
  }
  return series.WithValues(v);
}

// ApplyDp, except that inside `window` the top layer's Laplace draw is
// replaced by a draw from the optimal attack distribution for that layer
// under stealth budget `gamma`. Identical to ApplyDp outside the window.
inline MeasurementSeries ApplyDpUnderAttack(const MeasurementSeries& series,
                                            std::span<const PrivacyParams> layers,
                                            double gamma, AttackWindow window,
                                            Seed seed) {
  if (layers.empty()) throw DomainError("attack on DP data needs a DP layer");
  if (window.begin > window.end || window.end > series.size()) {
    throw DomainError("attack window outside series");
  }
  const auto attack =
      AttackProfile::FromBudget(layers.back().WithTheta(0.0), gamma);
  std::vector<double> v = series.values();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Rng rng(DeriveSeed(seed, "qos-dp-layer", l));
    const bool top = l + 1 == layers.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double eta = SampleLaplaceNoise(layers[l].scale(), rng);
      if (top && i >= window.begin && i < window.end) {
        Rng attack_rng(DeriveSeed(seed, "qos-attack", i));
        v[i] += SampleAttackNoise(attack, attack_rng);
      } else {
        v[i] += eta;
      }
    }
  }
  return series.WithValues(v);
}

inline MeasurementSeries ApplyDpUnderAttack(const MeasurementSeries& series,
                                            const PrivacyParams& layer,
                                            double gamma, AttackWindow window,
                                            Seed seed) {
  return ApplyDpUnderAttack(series, std::span<const PrivacyParams>(&layer, 1),
                            gamma, window, seed);
}

inline CostReport CostAnalysis(const MeasurementSeries& original,
                               const MeasurementSeries& dp_variant,
                               const MeasurementSeries& fdi_dp_variant,
                               const ForecastConfig& cfg, double epsilon) {
  if (original.timestamps() != dp_variant.timestamps() ||
      original.timestamps() != fdi_dp_variant.timestamps()) {
    throw DomainError("series are not aligned");
  }
  const auto f_orig = Forecast(original, cfg).values();
  const auto f_dp = Forecast(dp_variant, cfg).values();
  const auto f_fdi = Forecast(fdi_dp_variant, cfg).values();
  CostReport r;
  r.privacy_cost = MeanAbsoluteDifference(f_dp, f_orig);
  r.security_cost = MeanAbsoluteDifference(f_fdi, f_dp);
  r.defense_cost = r.privacy_cost + r.security_cost;
  r.epsilon = epsilon;
  return r;
}

struct UtilityDelta {
  MeasurementSeries baseline_forecast;
  MeasurementSeries attacked_forecast;
  // Mean absolute forecast difference, series units.
  double deviation = 0.0;
  // deviation / mean |baseline forecast|.
  double relative_deviation = 0.0;
};

// Forecast deviation caused by an attack confined to `window` of the DP
// release of `original`, relative to the forecast of the DP-only release.
inline UtilityDelta UtilityReport(const MeasurementSeries& original,
                                  std::span<const PrivacyParams> layers,
                                  AttackWindow window, double gamma,
                                  const ForecastConfig& cfg, Seed seed) {
  if (window.begin > window.end || window.end > original.size()) {
    throw DomainError("attack window outside series");
  }
  UtilityDelta out;
  out.baseline_forecast = Forecast(ApplyDp(original, layers, seed), cfg);
  out.attacked_forecast =
      window.length() == 0
          ? out.baseline_forecast
          : Forecast(ApplyDpUnderAttack(original, layers, gamma, window, seed), cfg);
  const auto& base = out.baseline_forecast.values();
  out.deviation = MeanAbsoluteDifference(out.attacked_forecast.values(), base);
  double scale = 0.0;
  for (double v : base) scale += std::abs(v);
  scale /= static_cast<double>(base.size());
  out.relative_deviation = scale > 0.0 ? out.deviation / scale : 0.0;
  return out;
}

inline UtilityDelta UtilityReport(const MeasurementSeries& original,
                                  const PrivacyParams& layer,
                                  AttackWindow window, double gamma,
                                  const ForecastConfig& cfg, Seed seed) {
  return UtilityReport(original, std::span<const PrivacyParams>(&layer, 1),
                       window, gamma, cfg, seed);
}

}  // namespace cpesdp

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

// Laplace mechanism: privacy parameters, density, inverse-transform sampler,
// noisy aggregate queries and an empirical epsilon-indistinguishability
// check over adjacent datasets.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "cpesdp/rng.hpp"
#include "cpesdp/solver.hpp"

namespace cpesdp {

// Sensitivity, privacy loss and location of a Laplace mechanism. The scale
// is always derived as sensitivity / epsilon and never stored separately.
class PrivacyParams {
 public:
  static PrivacyParams Create(double sensitivity, double epsilon,
                              double theta = 0.0) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw DomainError("epsilon must be a positive finite number");
    }
    if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
      throw DomainError("sensitivity must be non-negative and finite");
    }
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    return PrivacyParams(sensitivity, epsilon, theta);
  }

  // Unit-epsilon parameters whose scale equals `scale`.
  static PrivacyParams FromScale(double scale, double theta = 0.0) {
    return Create(scale, 1.0, theta);
  }

  double sensitivity() const { return sensitivity_; }
  double epsilon() const { return epsilon_; }
  double theta() const { return theta_; }
  double scale() const { return sensitivity_ / epsilon_; }

  PrivacyParams WithTheta(double theta) const {
    return Create(sensitivity_, epsilon_, theta);
  }

 private:
  PrivacyParams(double sensitivity, double epsilon, double theta)
      : sensitivity_(sensitivity), epsilon_(epsilon), theta_(theta) {}

  double sensitivity_;
  double epsilon_;
  double theta_;
};

struct Dataset {
  std::vector<double> values;
};

// Same length and exactly one differing entry.
inline bool Adjacent(const Dataset& x, const Dataset& x_prime) {
  if (x.values.size() != x_prime.values.size()) return false;
  std::size_t differing = 0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    if (x.values[i] != x_prime.values[i]) ++differing;
  }
  return differing == 1;
}

// `noise` is the perturbation as actually applied, so
// released - true_value == noise holds bit-for-bit.
struct NoisyResult {
  double true_value = 0.0;
  double noise = 0.0;
  double released = 0.0;
};

enum class QueryKind { kSum, kMean };

// Standard (unit-mass) Laplace density with location theta and scale b.
inline double LaplacePdf(double y, const PrivacyParams& p) {
  const double b = p.scale();
  if (!(b > 0.0)) throw DomainError("Laplace density needs a positive scale");
  return std::exp(-std::abs(y - p.theta()) / b) / (2.0 * b);
}

// Zero-centred Laplace draw with scale `scale` by inverse transform.
inline double SampleLaplaceNoise(double scale, Rng& rng) {
  if (scale == 0.0) return 0.0;
  const double u = rng.UniformOpen() - 0.5;  // (-0.5, 0.5)
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

// One zero-centred draw at the scale of `p`; callers shift by the location.
inline double SampleLaplace(const PrivacyParams& p, Seed seed) {
  Rng rng(seed);
  return SampleLaplaceNoise(p.scale(), rng);
}

inline std::vector<double> SampleLaplace(const PrivacyParams& p,
                                         std::size_t count, Seed seed) {
  Rng rng(seed);
  std::vector<double> out(count);
  for (double& v : out) v = SampleLaplaceNoise(p.scale(), rng);
  return out;
}

inline double ExactAggregate(std::span<const double> values, QueryKind kind) {
  if (values.empty()) throw DomainError("empty query domain");
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return kind == QueryKind::kSum ? sum
                                 : sum / static_cast<double>(values.size());
}

// Noise scale of a query. For means the per-record sensitivity is divided by
// the number of records (bounded-contribution convention).
inline double QueryScale(const PrivacyParams& p, QueryKind kind,
                         std::size_t n) {
  return kind == QueryKind::kSum ? p.scale()
                                 : p.scale() / static_cast<double>(n);
}

inline NoisyResult DpQuery(const Dataset& d, QueryKind kind,
                           const PrivacyParams& p, Seed seed) {
  NoisyResult r;
  r.true_value = ExactAggregate(d.values, kind);
  Rng rng(seed);
  r.released =
      r.true_value + SampleLaplaceNoise(QueryScale(p, kind, d.values.size()), rng);
  r.noise = r.released - r.true_value;
  return r;
}

struct IndistinguishabilityOptions {
  std::size_t n_trials = 1'000'000;
  std::size_t n_bins = 20;
  Seed seed = 0;
  // Bins where either histogram holds fewer counts are ignored.
  std::size_t min_count = 100;
  double slack_sigmas = 3.0;
};

struct IndistinguishabilityReport {
  double max_log_ratio = 0.0;
  // Largest excess of |log ratio| over epsilon + slack (<= 0 when passing).
  double worst_excess = 0.0;
  std::size_t bins_used = 0;
  bool pass = false;
};

// Histograms the released values of `mechanism` on X and X' and checks
// |ln(count_X / count_X')| <= epsilon + slack in every well-populated bin,
// with slack = slack_sigmas * sqrt(1/count_X + 1/count_X').
//
// `mechanism(dataset, seed)` returns one released value.
template <class Mechanism>
  requires std::invocable<const Mechanism&, const Dataset&, Seed>
IndistinguishabilityReport CheckIndistinguishability(
    const Dataset& x, const Dataset& x_prime, double epsilon,
    const Mechanism& mechanism, const IndistinguishabilityOptions& opts) {
  if (!Adjacent(x, x_prime)) throw DomainError("datasets not adjacent");
  if (opts.n_trials < 100'000) {
    throw DomainError("indistinguishability check needs at least 1e5 trials");
  }
  if (opts.n_bins < 2) throw DomainError("need at least two bins");

  const std::size_t n = opts.n_trials;
  std::vector<double> rx(n), rxp(n);
  for (std::size_t i = 0; i < n; ++i) {
    rx[i] = mechanism(x, DeriveSeed(opts.seed, "X", i));
    rxp[i] = mechanism(x_prime, DeriveSeed(opts.seed, "X'", i));
  }

  // Histogram range: central 99% of the pooled releases.
  std::vector<double> pooled;
  pooled.reserve(2 * n);
  pooled.insert(pooled.end(), rx.begin(), rx.end());
  pooled.insert(pooled.end(), rxp.begin(), rxp.end());
  const auto quantile = [&pooled](double q) {
    auto it = pooled.begin() +
              static_cast<std::ptrdiff_t>(q * static_cast<double>(pooled.size() - 1));
    std::nth_element(pooled.begin(), it, pooled.end());
    return *it;
  };
  const double lo = quantile(0.005);
  const double hi = quantile(0.995);
  if (!(hi > lo)) throw DomainError("released values are degenerate");
  const double width = (hi - lo) / static_cast<double>(opts.n_bins);

  std::vector<std::size_t> cx(opts.n_bins, 0), cxp(opts.n_bins, 0);
  const auto bin_of = [&](double v) -> std::ptrdiff_t {
    if (v < lo || v >= hi) return -1;
    return std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>((v - lo) / width),
                                    static_cast<std::ptrdiff_t>(opts.n_bins) - 1);
  };
  for (double v : rx) {
    if (auto b = bin_of(v); b >= 0) ++cx[static_cast<std::size_t>(b)];
  }
  for (double v : rxp) {
    if (auto b = bin_of(v); b >= 0) ++cxp[static_cast<std::size_t>(b)];
  }

  IndistinguishabilityReport report;
  report.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < opts.n_bins; ++b) {
    if (cx[b] < opts.min_count || cxp[b] < opts.min_count) continue;
    const double a = static_cast<double>(cx[b]);
    const double c = static_cast<double>(cxp[b]);
    const double log_ratio = std::abs(std::log(a / c));
    const double slack = opts.slack_sigmas * std::sqrt(1.0 / a + 1.0 / c);
    report.max_log_ratio = std::max(report.max_log_ratio, log_ratio);
    report.worst_excess = std::max(report.worst_excess, log_ratio - epsilon - slack);
    ++report.bins_used;
  }
  if (report.bins_used == 0) {
    throw DomainError("no well-populated bins; increase n_trials");
  }
  report.pass = report.worst_excess <= 0.0;
  return report;
}

// Runs the check against the Laplace sum mechanism parameterised by `p`.
inline IndistinguishabilityReport IndistinguishabilityCheck(
    const Dataset& x, const Dataset& x_prime, const PrivacyParams& p,
    const IndistinguishabilityOptions& opts) {
  const auto mechanism = [&p](const Dataset& d, Seed s) {
    return DpQuery(d, QueryKind::kSum, p, s).released;
  };
  return CheckIndistinguishability(x, x_prime, p.epsilon(), mechanism, opts);
}

}  // namespace cpesdp

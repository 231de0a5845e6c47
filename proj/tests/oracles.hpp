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

// Test-only reference computations. Nothing here calls into the library's
// closed forms; they are the independent side of each check.

#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <vector>

namespace cpesdp::testing {

// Adaptive Gauss-Kronrod over [a, b], split at the given interior points
// (kinks of the integrand).
inline double Integrate(const std::function<double(double)>& f, double a,
                        double b, std::initializer_list<double> splits = {}) {
  std::vector<double> pts{a};
  for (double s : splits) {
    if (s > a && s < b) pts.push_back(s);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, pts[i], pts[i + 1], 25, 1e-14, &err);
  }
  return total;
}

// Reference Laplace density, written out independently.
inline double RefLaplace(double y, double theta, double b) {
  return 0.5 / b * std::exp(-std::fabs(y - theta) / b);
}

// Reference tilted density: normalised numerically, not analytically.
inline double RefTiltedUnnormalised(double y, double theta, double b, double k1) {
  return std::exp(-std::fabs(y - theta) / b + (y - theta) / k1);
}

inline double ChiSquareSurvival(double statistic, double dof) {
  return boost::math::cdf(
      boost::math::complement(boost::math::chi_squared(dof), statistic));
}

// Normalising constant of the tilted density, by quadrature.
inline double RefTiltedMass(double theta, double b, double k1) {
  return Integrate(
      [=](double y) { return RefTiltedUnnormalised(y, theta, b, k1); },
      theta - 80 * b, theta + 80 * k1 * b / (k1 - b), {theta});
}

// KL(tilted || Laplace) by quadrature, log ratio taken in log space since
// the Laplace tail underflows first.
inline double RefKl(double b, double k1) {
  const double mass = RefTiltedMass(0.0, b, k1);
  return Integrate(
      [=](double y) {
        const double fa = RefTiltedUnnormalised(y, 0.0, b, k1) / mass;
        if (fa == 0.0) return 0.0;
        const double log_fa = -std::fabs(y) / b + y / k1 - std::log(mass);
        const double log_f0 = -std::fabs(y) / b - std::log(2.0 * b);
        return fa * (log_fa - log_f0);
      },
      -80 * b, 80 * k1 * b / (k1 - b), {0.0});
}

// Pearson goodness of fit of `samples` against density `pdf` over bins cut
// at `edges`, plus one open tail bin on each side. Returns the p-value.
inline double ChiSquareFitPValue(const std::vector<double>& samples,
                                 const std::vector<double>& edges,
                                 const std::function<double(double)>& pdf,
                                 double lower_support, double kink) {
  std::vector<double> counts(edges.size() + 1, 0.0);
  for (double x : samples) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    counts[static_cast<std::size_t>(it - edges.begin())] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  std::vector<double> probs(counts.size());
  probs.front() = Integrate(pdf, lower_support, edges.front(), {kink});
  double used = probs.front();
  for (std::size_t i = 1; i < edges.size(); ++i) {
    probs[i] = Integrate(pdf, edges[i - 1], edges[i], {kink});
    used += probs[i];
  }
  probs.back() = 1.0 - used;
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    stat += (counts[i] - n * probs[i]) * (counts[i] - n * probs[i]) / (n * probs[i]);
  }
  return ChiSquareSurvival(stat, static_cast<double>(counts.size() - 1));
}

inline double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double Variance(const std::vector<double>& v) {
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace cpesdp::testing

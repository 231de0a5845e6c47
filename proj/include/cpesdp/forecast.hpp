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

#pragma once

#include <chrono>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cpesdp/series.hpp"
#include "cpesdp/solver.hpp"

namespace cpesdp {

enum class ForecastMethod { kSeasonalNaive, kHoltWinters };

inline ForecastMethod ParseForecastMethod(const std::string& s) {
  if (s == "seasonal_naive") return ForecastMethod::kSeasonalNaive;
  if (s == "holt_winters") return ForecastMethod::kHoltWinters;
  throw DomainError("unknown forecast method '" + s + "'");
}

struct ForecastConfig {
  int horizon = 168;
  ForecastMethod method = ForecastMethod::kHoltWinters;
  int season_length = 168;
  // Additive Holt-Winters smoothing for level, trend and season.
  double alpha = 0.3;
  double beta = 0.01;
  double gamma = 0.2;

  void Validate() const {
    if (horizon < 1) throw DomainError("forecast horizon must be at least 1");
    if (season_length < 1) throw DomainError("season_length must be at least 1");
    for (double s : {alpha, beta, gamma}) {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw DomainError("smoothing parameters must lie in [0, 1]");
      }
    }
  }
};

namespace internal {

inline std::vector<double> CompleteValues(const MeasurementSeries& series,
                                          const ForecastConfig& cfg) {
  cfg.Validate();
  const std::size_t need = 2 * static_cast<std::size_t>(cfg.season_length);
  if (series.size() < need) {
    throw DomainError("series too short: need at least " + std::to_string(need) +
                      " points, got " + std::to_string(series.size()));
  }
  if (series.MissingCount() != 0) {
    throw DomainError("series has missing values; resample or fill before forecasting");
  }
  return series.values();
}

// Additive Holt-Winters state after filtering `x`. Initialised from the first
// two seasons; one-step predictions are produced from index `season_length`.
struct HoltWintersState {
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> season;
  std::vector<double> one_step;  // predictions for x[L..n)
};

inline HoltWintersState FilterHoltWinters(std::span<const double> x,
                                          const ForecastConfig& cfg) {
  const std::size_t L = static_cast<std::size_t>(cfg.season_length);
  const auto mean = [](std::span<const double> s) {
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  };
  const double m1 = mean(x.subspan(0, L));
  const double m2 = mean(x.subspan(L, L));
  HoltWintersState st;
  st.level = m1;
  st.trend = (m2 - m1) / static_cast<double>(L);
  st.season.resize(L);
  for (std::size_t i = 0; i < L; ++i) st.season[i] = x[i] - m1;
  // The level above describes the middle of the first season; move it to
  // its end so that the first update sees a consistent state.
  st.level += st.trend * (static_cast<double>(L) - 1.0) / 2.0;

  st.one_step.reserve(x.size() - L);
  for (std::size_t t = L; t < x.size(); ++t) {
    double& s = st.season[t % L];
    st.one_step.push_back(st.level + st.trend + s);
    const double level = cfg.alpha * (x[t] - s) + (1.0 - cfg.alpha) * (st.level + st.trend);
    st.trend = cfg.beta * (level - st.level) + (1.0 - cfg.beta) * st.trend;
    s = cfg.gamma * (x[t] - level) + (1.0 - cfg.gamma) * s;
    st.level = level;
  }
  return st;
}

}  // namespace internal

// Deterministic `horizon`-step forecast. Timestamps continue at the spacing
// of the last two input points.
inline MeasurementSeries Forecast(const MeasurementSeries& series,
                                  const ForecastConfig& cfg) {
  const std::vector<double> x = internal::CompleteValues(series, cfg);
  const std::size_t n = x.size();
  const std::size_t L = static_cast<std::size_t>(cfg.season_length);
  const std::size_t H = static_cast<std::size_t>(cfg.horizon);

  std::vector<double> out(H);
  if (cfg.method == ForecastMethod::kSeasonalNaive) {
    for (std::size_t h = 0; h < H; ++h) out[h] = x[n - L + h % L];
  } else {
    const auto st = internal::FilterHoltWinters(x, cfg);
    for (std::size_t h = 1; h <= H; ++h) {
      out[h - 1] = st.level + static_cast<double>(h) * st.trend +
                   st.season[(n - 1 + h) % L];
    }
  }

  const auto& ts = series.timestamps();
  const auto step = ts[n - 1] - ts[n - 2];
  MeasurementSeries result(series.channel());
  for (std::size_t h = 0; h < H; ++h) {
    result.Append(ts[n - 1] + step * static_cast<long>(h + 1), out[h]);
  }
  return result;
}

// Mean absolute one-step-ahead error over x[L..n).
inline double InSampleOneStepMae(const MeasurementSeries& series,
                                 const ForecastConfig& cfg) {
  const std::vector<double> x = internal::CompleteValues(series, cfg);
  const std::size_t L = static_cast<std::size_t>(cfg.season_length);
  double total = 0.0;
  if (cfg.method == ForecastMethod::kSeasonalNaive) {
    for (std::size_t t = L; t < x.size(); ++t) total += std::abs(x[t] - x[t - L]);
  } else {
    const auto st = internal::FilterHoltWinters(x, cfg);
    for (std::size_t t = L; t < x.size(); ++t) {
      total += std::abs(x[t] - st.one_step[t - L]);
    }
  }
  return total / static_cast<double>(x.size() - L);
}

// Mean absolute difference between two equally long curves.
inline double MeanAbsoluteDifference(std::span<const double> a,
                                     std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("curves must be non-empty and equally long");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total / static_cast<double>(a.size());
}

}  // namespace cpesdp

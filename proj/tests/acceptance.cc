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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. All thresholds are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cpesdp/cpesdp.hpp"
#include "oracles.hpp"

namespace cpesdp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// 1. Calibration followed by the forward model recovers d.
Outcome CalibrationRoundTrip() {
  constexpr int kTuples = 1000;
  constexpr double kRelTol = 1e-6;
  constexpr double kTimeLimit = 5.0;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(DeriveSeed(1, "acceptance-1"));
  const auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.UniformOpen(); };
  double worst = 0.0;
  for (int i = 0; i < kTuples; ++i) {
    const double sens = uniform(0.1, 5.0);
    const double gamma = uniform(0.01, 5.0);
    const double d = uniform(0.1, 200.0);
    const auto r = CalibrateEpsilon({.sensitivity = sens, .gamma = gamma, .max_deviation = d});
    const double b = sens / r.epsilon;
    const double recovered = OptimalDeviation(SolveK1(gamma, b), b);
    worst = std::max(worst, std::abs(recovered - d) / d);
  }
  const double elapsed = Seconds(start);
  return {worst <= kRelTol && elapsed < kTimeLimit,
          Fmt("%d tuples, max relative error %.3g (tol %.0e), %.2f s (limit %.0f s)", kTuples,
              worst, kRelTol, elapsed, kTimeLimit)};
}

// 2. Operating point in both directions.
Outcome OperatingPoint() {
  const auto base = PrivacyParams::Create(2.0, 0.1, 33.18);
  const auto a = AttackProfile::FromBudget(base, 2.0);
  const double deviation = a.mu_star() - 33.18;
  const auto r = CalibrateEpsilon({.sensitivity = 2.0, .gamma = 2.0, .theta = 33.18,
                                   .max_deviation = 76.82});
  const bool ok = deviation >= 72.0 && deviation <= 81.0 && r.epsilon >= 0.095 && r.epsilon <= 0.110;
  return {ok, Fmt("b=20 k1=%.4f deviation %.4f in [72, 81], impact %.2f; d=76.82 -> eps %.5f "
                  "in [0.095, 0.110]",
                  a.k1(), deviation, a.mu_star(), r.epsilon)};
}

// 3. Closed-form KL against quadrature.
Outcome KlOracle() {
  constexpr double kTol = 1e-6;
  int pairs = 0;
  double worst = 0.0;
  for (double b : {0.5, 1.0, 20.0}) {
    for (double ratio : {1.05, 1.3, 2.0, 5.0}) {
      const double k1 = ratio * b;
      worst = std::max(worst, std::abs(KlFromK1(k1, b) - testing::RefKl(b, k1)));
      ++pairs;
    }
  }
  return {pairs >= 10 && worst <= kTol,
          Fmt("%d (b, k1) pairs, max |closed form - quadrature| %.3g (tol %.0e)", pairs, worst, kTol)};
}

// 4. Sampler mean and goodness of fit at the operating point.
Outcome SamplerFidelity() {
  constexpr std::size_t kN = 1'000'000;
  const double b = 20.0;
  const auto a = AttackProfile::FromBudget(PrivacyParams::FromScale(b), 2.0);
  Rng rng(DeriveSeed(4, "acceptance-4"));
  std::vector<double> xs(kN);
  for (double& x : xs) x = SampleAttackNoise(a, rng);
  const double mean = testing::Mean(xs);
  const double sigma = std::sqrt(testing::Variance(xs) / kN);
  const double expected = OptimalDeviation(a.k1(), b);
  const double k1 = a.k1();
  const double mass = testing::RefTiltedMass(0.0, b, k1);
  std::vector<double> edges;
  for (double e = -3.0 * b; e <= 20.0 * b + 1e-9; e += b) edges.push_back(e);
  const double p = testing::ChiSquareFitPValue(
      xs, edges, [=](double y) { return testing::RefTiltedUnnormalised(y, 0.0, b, k1) / mass; },
      -80.0 * b, 0.0);
  const bool ok = std::abs(mean - expected) <= 3 * sigma && p > 0.01;
  return {ok, Fmt("N=1e6 mean %.4f vs %.4f (|diff| %.2f sigma, limit 3); chi-square p=%.4f "
                  "(limit > 0.01)",
                  mean, expected, std::abs(mean - expected) / sigma, p)};
}

// 5. Histogram indistinguishability on adjacent datasets.
Outcome Indistinguishability() {
  const Dataset x{{1, 2, 3}}, xp{{1, 2, 4}};
  std::string detail;
  bool ok = true;
  for (double eps : {0.1, 1.0}) {
    const auto r = IndistinguishabilityCheck(x, xp, PrivacyParams::Create(1.0, eps),
                                             {.n_trials = 1'000'000, .seed = 50});
    ok = ok && r.pass;
    detail += Fmt("eps=%.1f %s (max log ratio %.3f); ", eps, r.pass ? "pass" : "fail", r.max_log_ratio);
  }
  const auto p = PrivacyParams::Create(1.0, 1.0);
  const auto half_noise = [&p](const Dataset& d, Seed s) {
    Rng rng(s);
    return ExactAggregate(d.values, QueryKind::kSum) + SampleLaplaceNoise(p.scale() / 2.0, rng);
  };
  const auto v = CheckIndistinguishability(x, xp, 1.0, half_noise, {.n_trials = 1'000'000, .seed = 51});
  ok = ok && !v.pass;
  detail += Fmt("half noise at eps=1 %s (max log ratio %.3f)",
                v.pass ? "passed (should fail)" : "rejected", v.max_log_ratio);
  return {ok, detail};
}

// 6. Monotone impact surface; sensitivity step beats budget step.
Outcome SweepMonotonicity() {
  std::vector<double> eps, gammas, sens;
  for (int i = 1; i <= 10; ++i) eps.push_back(0.1 * i);
  for (int i = 1; i <= 6; ++i) gammas.push_back(0.5 * i);
  for (int i = 1; i <= 6; ++i) sens.push_back(0.5 * i);
  const auto rows = ImpactSweep(eps, gammas, sens, 33.18);
  const auto at = [&](std::size_t e, std::size_t g, std::size_t s) {
    return rows[(e * gammas.size() + g) * sens.size() + s].impact;
  };
  int violations = 0;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      for (std::size_t s = 0; s < sens.size(); ++s) {
        if (e + 1 < eps.size() && !(at(e, g, s) > at(e + 1, g, s))) ++violations;
        if (g + 1 < gammas.size() && !(at(e, g, s) < at(e, g + 1, s))) ++violations;
        if (s + 1 < sens.size() && !(at(e, g, s) < at(e, g, s + 1))) ++violations;
      }
    }
  }
  const double base = ImpactSweep({0.1}, {2.0}, {2.0}, 33.18)[0].impact;
  const double d_gamma = ImpactSweep({0.1}, {2.5}, {2.0}, 33.18)[0].impact - base;
  const double d_sens = ImpactSweep({0.1}, {2.0}, {2.5}, 33.18)[0].impact - base;
  return {violations == 0 && d_sens > d_gamma,
          Fmt("%zu grid points, %d monotonicity violations; at eps=0.1, sensitivity=gamma=2: "
              "+0.5 sensitivity -> +%.2f, +0.5 gamma -> +%.2f",
              rows.size(), violations, d_sens, d_gamma)};
}

MeasurementSeries FourYears() {
  SynthConfig cfg{.days = 4 * 365 + 1, .jitter = 2.0, .seed = 2014};
  cfg.profile.annual_amplitude = 0.15;
  return SynthPmu(cfg);
}

// 7. Cost ordering over epsilon with a stealthy mid-series month attack.
Outcome CostOrdering() {
  constexpr int kSeeds = 32;
  constexpr double kGamma = 0.1;
  const auto s = FourYears();
  const AttackWindow window{s.size() / 2, s.size() / 2 + 720};
  std::map<int, CostReport> mean;
  bool ordered = true;
  for (int i = 1; i <= 9; ++i) {
    const double eps = 0.1 * i;
    const auto p = PrivacyParams::Create(2.0, eps);
    CostReport avg{.epsilon = eps};
    for (int seed = 0; seed < kSeeds; ++seed) {
      const Seed sd = DeriveSeed(7, "acceptance-7", static_cast<std::uint64_t>(seed));
      const auto r = CostAnalysis(s, ApplyDp(s, p, sd), ApplyDpUnderAttack(s, p, kGamma, window, sd),
                                  {}, eps);
      avg.privacy_cost += r.privacy_cost / kSeeds;
      avg.security_cost += r.security_cost / kSeeds;
    }
    avg.defense_cost = avg.privacy_cost + avg.security_cost;
    ordered = ordered && avg.privacy_cost > avg.security_cost;
    mean[i] = avg;
  }
  const bool falls = mean[9].defense_cost < mean[1].defense_cost;
  return {ordered && falls,
          Fmt("privacy > security at all 9 eps: %s (eps=0.1: %.3f vs %.4f; eps=0.9: %.3f vs "
              "%.4f); defense eps=0.9 %.3f < eps=0.1 %.3f",
              ordered ? "yes" : "no", mean[1].privacy_cost, mean[1].security_cost,
              mean[9].privacy_cost, mean[9].security_cost, mean[9].defense_cost,
              mean[1].defense_cost)};
}

// 8. A one-month stealthy attack has a negligible forecast effect.
Outcome ForecastNegligibility() {
  constexpr int kSeeds = 32;
  constexpr double kLimit = 0.05;
  const auto s = FourYears();
  const AttackWindow window{s.size() - 2160 - 720, s.size() - 2160};
  const auto p = PrivacyParams::Create(2.0, 0.5);
  double mean = 0.0, worst = 0.0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Seed sd = DeriveSeed(8, "acceptance-8", static_cast<std::uint64_t>(seed));
    const double rel = UtilityReport(s, p, window, 0.1, {}, sd).relative_deviation;
    mean += rel / kSeeds;
    worst = std::max(worst, rel);
  }
  return {mean < kLimit,
          Fmt("eps=0.5 gamma=0.1, 720 h window ending 2160 h before the end: mean relative "
              "deviation %.4f (limit %.2f), worst of %d seeds %.4f",
              mean, kLimit, kSeeds, worst)};
}

// 9. Two DP layers add variance.
Outcome LayeredVariance() {
  constexpr int kRuns = 10'000;
  const double b = 20.0;
  const auto p = PrivacyParams::FromScale(b);
  const auto topo = GridTopology::Create(
      {{"pmu", Layer::kPmu}, {"pdc", Layer::kPdc}, {"master", Layer::kMaster}},
      {{"pmu", "pdc"}, {"pdc", "master"}}, {{Layer::kPmu, p}, {Layer::kPdc, p}});
  MeasurementSeries one(Channel::kPowerKwh);
  one.Append(*ParseTimestamp("2015-01-01T00:00:00Z"), 33.18);
  const std::map<std::string, MeasurementSeries> series{{"pmu", one}};
  const auto det = Detector::Create(1e9, 1);
  std::vector<double> err;
  for (int r = 0; r < kRuns; ++r) {
    const auto t = RunQuery(topo, series, GridQuery::kHourlyMean, det,
                            DeriveSeed(9, "acceptance-9", static_cast<std::uint64_t>(r)));
    err.push_back(t.outputs.at(0).delivered - t.outputs.at(0).true_value);
  }
  const double var = testing::Variance(err);
  const double target = 4 * b * b;
  return {std::abs(var - target) <= 0.05 * target,
          Fmt("%d runs, variance %.1f vs 4b^2 = %.1f (relative error %.4f, tol 0.05)", kRuns, var,
              target, std::abs(var - target) / target)};
}

// 10. Injection without encryption is at least 10x cheaper.
Outcome BenchFeasibility() {
  constexpr double kFloor = 10.0;
  const auto start = std::chrono::steady_clock::now();
  const auto attack = AttackProfile::FromBudget(PrivacyParams::FromScale(20.0), 2.0);
  std::string detail;
  bool ok = true;
  for (std::size_t n : {10'000u, 100'000u}) {
    std::vector<double> batch(n);
    for (std::size_t i = 0; i < n; ++i) batch[i] = 30.0 + std::sin(0.01 * static_cast<double>(i));
    const auto r = RunBench(batch, attack, {.reps = 31, .seed = 10});
    ok = ok && r.speedup >= kFloor;
    detail += Fmt("n=%zu dp %.3g s aes %.3g s speedup %.2fx; ", n, r.dp_seconds, r.aes_seconds,
                  r.speedup);
  }
  const double elapsed = Seconds(start);
  ok = ok && elapsed < 60.0;
  detail += Fmt("floor %.0fx, %.1f s (limit 60 s), AES instructions %s", kFloor, elapsed,
                CpuHasAesInstructions() ? "present" : "absent");
  return {ok, detail};
}

}  // namespace
}  // namespace cpesdp

int main() {
  using namespace cpesdp;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"calibration round-trip", CalibrationRoundTrip},
      {"operating point", OperatingPoint},
      {"KL oracle equivalence", KlOracle},
      {"sampler fidelity", SamplerFidelity},
      {"epsilon-indistinguishability", Indistinguishability},
      {"impact surface monotonicity", SweepMonotonicity},
      {"cost ordering", CostOrdering},
      {"forecast negligibility", ForecastNegligibility},
      {"layered-noise variance", LayeredVariance},
      {"bench feasibility", BenchFeasibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

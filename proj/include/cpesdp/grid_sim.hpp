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

// Hourly aggregate queries over a layered PMU network with per-layer Laplace
// noise, in-channel false data injection and a rolling-window detector.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <string>
#include <vector>

#include "cpesdp/adversary.hpp"
#include "cpesdp/laplace.hpp"
#include "cpesdp/rng.hpp"
#include "cpesdp/series.hpp"
#include "cpesdp/topology.hpp"
#include "json.hpp"

namespace cpesdp {

// Per-PMU reduction of the readings inside each clock hour. Parents always
// sum the values their children deliver.
enum class GridQuery { kHourlyMean, kSum };

inline const char* ToString(GridQuery q) {
  return q == GridQuery::kHourlyMean ? "hourly_mean" : "sum";
}

// Flags a delivery whose distance from the mean of the previous `window`
// deliveries on the same edge exceeds `tau`. The first `window` steps of an
// edge are not evaluated.
class Detector {
 public:
  static Detector Create(double tau, int window) {
    if (!(tau > 0.0)) throw DomainError("detector threshold tau must be positive");
    if (window < 1) throw DomainError("detector window must be positive");
    return Detector(tau, window);
  }
  double tau() const { return tau_; }
  int window() const { return window_; }

 private:
  Detector(double tau, int window) : tau_(tau), window_(window) {}
  double tau_;
  int window_;
};

struct HopRecord {
  std::int64_t step = 0;
  Timestamp time;
  std::string edge;
  double true_value = 0.0;
  // Noise added by the sending node's layer on this hop.
  double dp_noise = 0.0;
  // Change made on this edge. A compromised edge replaces the sender's own
  // noise draw with an attack draw eta_a, so this is eta_a - dp_noise.
  double injected = 0.0;
  // Totals over every layer / compromised edge below and including this hop.
  double dp_noise_total = 0.0;
  double injected_total = 0.0;
  // Always true_value + dp_noise_total + injected_total.
  double delivered = 0.0;
  bool evaluated = false;
  bool flagged = false;
};

struct MasterRecord {
  std::int64_t step = 0;
  Timestamp time;
  std::string master;
  double true_value = 0.0;
  double delivered = 0.0;
};

struct SimTrace {
  std::vector<HopRecord> hops;
  std::vector<MasterRecord> outputs;
  std::vector<std::string> plaintext_attack_edges;
  std::int64_t steps = 0;
};

namespace internal {

struct Carried {
  double true_value = 0.0;
  double dp = 0.0;
  double injected = 0.0;
};

inline std::int64_t HourIndex(Timestamp t) {
  return std::chrono::floor<std::chrono::hours>(t).time_since_epoch().count();
}

// Per-hour reduction of a PMU series: hour index -> (sum, count) of present
// readings.
inline std::map<std::int64_t, std::pair<double, std::size_t>> HourBuckets(
    const MeasurementSeries& s) {
  std::map<std::int64_t, std::pair<double, std::size_t>> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto& [sum, count] = out[HourIndex(s.timestamps()[i])];
    if (s.present(i)) {
      sum += s.values()[i];
      ++count;
    }
  }
  return out;
}

}  // namespace internal

// Evaluates the query bottom-up for every hour covered by all PMU series.
// Noise draws are keyed by (seed, node or edge id, step), never by
// traversal order.
inline SimTrace RunQuery(const GridTopology& topo,
                         const std::map<std::string, MeasurementSeries>& series,
                         GridQuery query, const Detector& det, Seed seed) {
  const std::vector<std::string> pmus = topo.PmuIds();
  std::string missing;
  for (const auto& id : pmus) {
    if (!series.contains(id)) missing += (missing.empty() ? "" : ", ") + id;
  }
  if (!missing.empty()) throw DomainError("missing series for PMU(s): " + missing);

  std::map<std::string, std::map<std::int64_t, std::pair<double, std::size_t>>> buckets;
  std::int64_t first = std::numeric_limits<std::int64_t>::min();
  std::int64_t last = std::numeric_limits<std::int64_t>::max();
  for (const auto& id : pmus) {
    const MeasurementSeries& s = series.at(id);
    if (s.empty()) throw DomainError("empty series for PMU " + id);
    buckets[id] = internal::HourBuckets(s);
    first = std::max(first, internal::HourIndex(s.timestamps().front()));
    last = std::min(last, internal::HourIndex(s.timestamps().back()));
  }
  if (first > last) throw DomainError("PMU series do not overlap in time");
  std::string gaps;
  for (const auto& id : pmus) {
    for (std::int64_t h = first; h <= last; ++h) {
      auto it = buckets[id].find(h);
      if (it == buckets[id].end() || it->second.second == 0) {
        gaps += (gaps.empty() ? "" : ", ") + id;
        break;
      }
    }
  }
  if (!gaps.empty()) {
    throw DomainError("series does not cover query window for PMU(s): " + gaps);
  }

  SimTrace trace;
  trace.steps = last - first + 1;
  trace.plaintext_attack_edges = topo.PlaintextAttackEdges();

  std::map<std::string, std::optional<AttackProfile>> attacks;
  for (const auto& e : topo.edges()) attacks.emplace(e.Id(), topo.AttackOn(e.Id()));
  std::map<std::string, std::deque<double>> history;

  for (std::int64_t step = 0; step < trace.steps; ++step) {
    const std::int64_t hour = first + step;
    const Timestamp time{std::chrono::hours(hour)};
    std::map<std::string, internal::Carried> received;

    for (const auto& id : topo.EvaluationOrder()) {
      const Node& node = topo.node(id);
      internal::Carried c;
      if (node.layer == Layer::kPmu) {
        const auto [sum, count] = buckets[id].at(hour);
        c.true_value = query == GridQuery::kSum ? sum : sum / static_cast<double>(count);
      } else {
        for (const auto& child : topo.Children(id)) {
          const auto& r = received.at(child);
          c.true_value += r.true_value;
          c.dp += r.dp;
          c.injected += r.injected;
        }
      }
      if (node.layer == Layer::kMaster) {
        trace.outputs.push_back({step, time, id, c.true_value,
                                 c.true_value + c.dp + c.injected});
        continue;
      }

      HopRecord hop;
      hop.step = step;
      hop.time = time;
      const Edge& up = topo.Uplink(id);
      hop.edge = up.Id();
      hop.true_value = c.true_value;
      if (auto p = topo.PolicyFor(node.layer)) {
        Rng rng(DeriveSeed(seed, "dp:" + id, static_cast<std::uint64_t>(step)));
        hop.dp_noise = SampleLaplaceNoise(p->scale(), rng);
        c.dp += hop.dp_noise;
      }
      const auto& attack = attacks.at(hop.edge);
      if (attack && topo.attackers().at(hop.edge).ActiveAt(step)) {
        Rng rng(DeriveSeed(seed, "attack:" + hop.edge, static_cast<std::uint64_t>(step)));
        hop.injected = SampleAttackNoise(*attack, rng) - hop.dp_noise;
        c.injected += hop.injected;
      }
      hop.dp_noise_total = c.dp;
      hop.injected_total = c.injected;
      hop.delivered = c.true_value + c.dp + c.injected;

      auto& h = history[hop.edge];
      if (h.size() == static_cast<std::size_t>(det.window())) {
        double mean = 0.0;
        for (double v : h) mean += v;
        mean /= static_cast<double>(h.size());
        hop.evaluated = true;
        hop.flagged = std::abs(hop.delivered - mean) > det.tau();
        h.pop_front();
      }
      h.push_back(hop.delivered);

      received[id] = c;
      trace.hops.push_back(std::move(hop));
    }
  }
  return trace;
}

struct DetectionRates {
  // Absent when the attack is switched off.
  std::optional<double> true_positive_rate;
  double false_positive_rate = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// Paired runs with and without the topology's attackers. Monitored edges
// are the compromised ones, or every edge into a MASTER when there are none.
// FPR counts flags on monitored edges in clean runs; TPR counts flags on
// monitored edges at attacked steps in attacked runs.
inline DetectionRates DetectionRate(
    const GridTopology& topo,
    const std::map<std::string, MeasurementSeries>& series, GridQuery query,
    const Detector& det, bool attack_enabled, std::size_t n_runs, Seed seed) {
  if (n_runs < 1000) throw DomainError("detection_rate needs at least 1000 runs");
  std::set<std::string> monitored;
  for (const auto& [edge, cfg] : topo.attackers()) monitored.insert(edge);
  if (monitored.empty()) {
    for (const auto& e : topo.edges()) {
      if (topo.node(e.to).layer == Layer::kMaster) monitored.insert(e.Id());
    }
  }
  const GridTopology clean = topo.WithoutAttackers();

  std::size_t fp = 0, neg = 0, tp = 0, pos = 0;
  for (std::size_t r = 0; r < n_runs; ++r) {
    const Seed run_seed = DeriveSeed(seed, "run", r);
    const SimTrace base = RunQuery(clean, series, query, det, run_seed);
    for (const auto& hop : base.hops) {
      if (!hop.evaluated || !monitored.contains(hop.edge)) continue;
      ++neg;
      fp += hop.flagged ? 1 : 0;
    }
    if (!attack_enabled) continue;
    const SimTrace attacked = RunQuery(topo, series, query, det, run_seed);
    for (const auto& hop : attacked.hops) {
      if (!hop.evaluated || !monitored.contains(hop.edge)) continue;
      auto it = topo.attackers().find(hop.edge);
      if (it == topo.attackers().end() || !it->second.ActiveAt(hop.step)) continue;
      ++pos;
      tp += hop.flagged ? 1 : 0;
    }
  }
  DetectionRates out;
  out.negatives = neg;
  out.positives = pos;
  out.false_positive_rate = neg ? static_cast<double>(fp) / static_cast<double>(neg) : 0.0;
  if (attack_enabled && pos > 0) {
    out.true_positive_rate = static_cast<double>(tp) / static_cast<double>(pos);
  }
  return out;
}

struct ImpactRow {
  double epsilon;
  double gamma;
  double sensitivity;
  double scale;
  double k1;
  double impact;
  double deviation;
};

// Optimal attack impact over the Cartesian grid of (epsilon, gamma,
// sensitivity) at location theta. Rows are ordered epsilon-major.
inline std::vector<ImpactRow> ImpactSweep(const std::vector<double>& epsilons,
                                          const std::vector<double>& gammas,
                                          const std::vector<double>& sensitivities,
                                          double theta) {
  for (const auto* axis : {&epsilons, &gammas, &sensitivities}) {
    for (double v : *axis) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("sweep values must be positive and finite");
      }
    }
  }
  std::vector<ImpactRow> rows;
  rows.reserve(epsilons.size() * gammas.size() * sensitivities.size());
  for (double eps : epsilons) {
    for (double gamma : gammas) {
      for (double sens : sensitivities) {
        const auto base = PrivacyParams::Create(sens, eps, theta);
        const auto a = AttackProfile::FromBudget(base, gamma);
        rows.push_back({eps, gamma, sens, base.scale(), a.k1(), a.mu_star(),
                        a.deviation()});
      }
    }
  }
  return rows;
}

inline void WriteTraceCsv(std::ostream& out, const SimTrace& trace,
                          std::string_view comment = {}) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "step,timestamp,edge,true_value,dp_noise,injected,dp_noise_total,"
         "injected_total,delivered,evaluated,flagged\n";
  for (const auto& h : trace.hops) {
    out << h.step << ',' << FormatTimestamp(h.time) << ',' << h.edge << ','
        << FormatDouble(h.true_value) << ',' << FormatDouble(h.dp_noise) << ','
        << FormatDouble(h.injected) << ',' << FormatDouble(h.dp_noise_total) << ','
        << FormatDouble(h.injected_total) << ',' << FormatDouble(h.delivered) << ','
        << (h.evaluated ? 1 : 0) << ',' << (h.flagged ? 1 : 0) << '\n';
  }
}

inline nlohmann::json TraceSummary(const SimTrace& trace) {
  std::size_t evaluated = 0, flagged = 0;
  for (const auto& h : trace.hops) {
    evaluated += h.evaluated ? 1 : 0;
    flagged += h.flagged ? 1 : 0;
  }
  double abs_err = 0.0;
  for (const auto& o : trace.outputs) abs_err += std::abs(o.delivered - o.true_value);
  nlohmann::json j;
  j["steps"] = trace.steps;
  j["hops"] = trace.hops.size();
  j["evaluated_hops"] = evaluated;
  j["flagged_hops"] = flagged;
  j["plaintext_attack_edges"] = trace.plaintext_attack_edges;
  j["master_mean_abs_error"] =
      trace.outputs.empty() ? 0.0 : abs_err / static_cast<double>(trace.outputs.size());
  return j;
}

inline void WriteSweepCsv(std::ostream& out, const std::vector<ImpactRow>& rows,
                          std::string_view comment = {}) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "epsilon,gamma,sensitivity,scale,k1,impact,deviation\n";
  for (const auto& r : rows) {
    out << FormatDouble(r.epsilon) << ',' << FormatDouble(r.gamma) << ','
        << FormatDouble(r.sensitivity) << ',' << FormatDouble(r.scale) << ','
        << FormatDouble(r.k1) << ',' << FormatDouble(r.impact) << ','
        << FormatDouble(r.deviation) << '\n';
  }
}

}  // namespace cpesdp

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

// cpesdp: command-line front end.
//
//   cpesdp calibrate --sensitivity 2 --gamma 2 --max-deviation 76.82
//   cpesdp impact --epsilon 0.1 --gamma 2 --sensitivity 2 --theta 33.18
//   cpesdp sweep --epsilons 0.1,0.5,0.9 --gammas 1,2 --sensitivities 1,2
//   cpesdp simulate --topology grid.json --synth-days 14
//   cpesdp qos --synth-days 1461 --epsilons 0.1,0.5,0.9
//   cpesdp bench --size 10000
//   cpesdp synth --days 30 --output pmu.csv
//
// JSON reports go to stdout and to <out-dir>/<command>.json. CSV outputs go
// to <out-dir>. The output directory defaults to $CPESDP_OUT_DIR, then ".".
// Every emitted file carries the hash of the effective configuration.
// Usage and domain errors exit with status 2 and a JSON error on stderr.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpesdp/cpesdp.hpp"
#include "json.hpp"

namespace cpesdp {
namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr char kOutDirEnv[] = "CPESDP_OUT_DIR";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  std::string command;
  json config;
  std::string hash;
  std::filesystem::path out_dir;

  std::string Comment() const { return "config_hash=" + hash + " command=" + command; }

  std::filesystem::path Path(const std::string& name) const {
    std::filesystem::create_directories(out_dir);
    return out_dir / name;
  }

  void Emit(json report) const {
    report["config_hash"] = hash;
    report["command"] = command;
    const std::string text = report.dump(2);
    std::ofstream(Path(command + ".json")) << text << '\n';
    std::cout << text << std::endl;
  }
};

// JSON has no infinity; limits are written as strings.
json Limit(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

MeasurementSeries LoadOrSynthesize(const std::string& input, int synth_days, Seed seed,
                                   const std::string& label) {
  if (!input.empty()) {
    return ReadCsv(input, {.resample_hourly = true});
  }
  if (synth_days < 1) throw UsageError("give --input or --synth-days");
  SynthConfig cfg{.days = synth_days, .jitter = 2.0, .seed = DeriveSeed(seed, label)};
  cfg.profile.annual_amplitude = 0.15;
  return SynthPmu(cfg);
}

// --- subcommands -----------------------------------------------------------

struct CalibrateArgs {
  double sensitivity = 0.0;
  double gamma = 0.0;
  double max_deviation = 0.0;
  double theta = 0.0;
};

void RunCalibrate(const CalibrateArgs& a, const Context& ctx) {
  if (a.max_deviation == 0.0 || std::isinf(a.gamma) || std::isinf(a.max_deviation)) {
    const auto b = BoundaryReport(a.max_deviation, a.gamma);
    ctx.Emit({{"regime", ToString(b.regime)},
              {"scale_limit", Limit(b.scale_limit)},
              {"epsilon_limit", Limit(b.epsilon_limit)}});
    return;
  }
  const auto r = CalibrateEpsilon({.sensitivity = a.sensitivity, .gamma = a.gamma,
                                   .theta = a.theta, .max_deviation = a.max_deviation});
  ctx.Emit(r);
}

struct ImpactArgs {
  double epsilon = 0.0;
  double gamma = 0.0;
  double sensitivity = 1.0;
  double theta = 0.0;
};

void RunImpact(const ImpactArgs& a, const Context& ctx) {
  const auto base = PrivacyParams::Create(a.sensitivity, a.epsilon, a.theta);
  const auto attack = AttackProfile::FromBudget(base, a.gamma);
  ctx.Emit({{"scale", base.scale()},
            {"k1", attack.k1()},
            {"kl", KlFromK1(attack.k1(), base.scale())},
            {"impact", attack.mu_star()},
            {"deviation", attack.deviation()}});
}

struct SweepArgs {
  std::vector<double> epsilons{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> gammas{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> sensitivities{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  double theta = 0.0;
};

void RunSweep(const SweepArgs& a, const Context& ctx) {
  const auto rows = ImpactSweep(a.epsilons, a.gammas, a.sensitivities, a.theta);
  const auto path = ctx.Path("sweep.csv");
  std::ofstream out(path);
  WriteSweepCsv(out, rows, ctx.Comment());
  ctx.Emit({{"rows", rows.size()}, {"csv", path.string()}});
}

struct SimulateArgs {
  std::string topology;
  std::vector<std::string> series;
  int synth_days = 0;
  std::string query = "hourly_mean";
  double tau = 50.0;
  int window = 24;
  std::size_t runs = 0;
  Seed seed = 0;
};

void RunSimulate(const SimulateArgs& a, const Context& ctx) {
  std::ifstream in(a.topology);
  if (!in) throw FormatError("cannot open '" + a.topology + "'");
  json tj;
  try {
    tj = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("topology is not valid JSON: " + std::string(e.what()));
  }
  GridTopology topo = [&] {
    try {
      return GridTopology::FromJson(tj);
    } catch (const json::exception& e) {
      throw FormatError("topology schema: " + std::string(e.what()));
    }
  }();

  std::map<std::string, MeasurementSeries> series;
  for (const auto& spec : a.series) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--series expects PMU_ID=PATH, got '" + spec + "'");
    series.emplace(spec.substr(0, eq), ReadCsv(spec.substr(eq + 1), {.resample_hourly = true}));
  }
  if (a.synth_days > 0) {
    for (const auto& id : topo.PmuIds()) {
      if (!series.contains(id)) {
        series.emplace(id, SynthPmu({.days = a.synth_days, .seed = DeriveSeed(a.seed, "synth:" + id)}));
      }
    }
  }
  const GridQuery query = a.query == "sum" ? GridQuery::kSum : GridQuery::kHourlyMean;
  const auto det = Detector::Create(a.tau, a.window);
  const auto trace = RunQuery(topo, series, query, det, a.seed);

  const auto trace_path = ctx.Path("trace.csv");
  std::ofstream out(trace_path);
  WriteTraceCsv(out, trace, ctx.Comment());
  json summary = TraceSummary(trace);
  summary["trace_csv"] = trace_path.string();
  if (a.runs > 0) {
    const auto rates = DetectionRate(topo, series, query, det, !topo.attackers().empty(), a.runs,
                                     DeriveSeed(a.seed, "detection"));
    summary["detection"] = {{"false_positive_rate", rates.false_positive_rate},
                            {"negatives", rates.negatives},
                            {"positives", rates.positives}};
    if (rates.true_positive_rate) summary["detection"]["true_positive_rate"] = *rates.true_positive_rate;
  }
  ctx.Emit(summary);
}

struct QosArgs {
  std::string input;
  int synth_days = 0;
  std::vector<double> epsilons{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double sensitivity = 2.0;
  double gamma = 0.1;
  std::optional<std::size_t> window_begin;
  std::size_t window_length = 720;
  std::string method = "holt_winters";
  int season_length = 168;
  int horizon = 168;
  int draws = 32;
  Seed seed = 0;
};

void RunQos(const QosArgs& a, const Context& ctx) {
  if (a.draws < 1) throw UsageError("--draws must be at least 1");
  const auto s = LoadOrSynthesize(a.input, a.synth_days, a.seed, "qos-synth");
  const std::size_t begin = a.window_begin.value_or(s.size() / 2);
  const AttackWindow window{begin, begin + a.window_length};
  const ForecastConfig cfg{.horizon = a.horizon, .method = ParseForecastMethod(a.method),
                           .season_length = a.season_length};
  cfg.Validate();

  json costs = json::array();
  for (double eps : a.epsilons) {
    const auto p = PrivacyParams::Create(a.sensitivity, eps);
    CostReport avg{.epsilon = eps};
    for (int d = 0; d < a.draws; ++d) {
      const Seed sd = DeriveSeed(a.seed, "qos-draw", static_cast<std::uint64_t>(d));
      const auto r = CostAnalysis(s, ApplyDp(s, p, sd), ApplyDpUnderAttack(s, p, a.gamma, window, sd),
                                  cfg, eps);
      avg.privacy_cost += r.privacy_cost / a.draws;
      avg.security_cost += r.security_cost / a.draws;
    }
    avg.defense_cost = avg.privacy_cost + avg.security_cost;
    costs.push_back(avg);
  }

  // Forecast curves for the first epsilon and first draw, for plotting.
  const auto p = PrivacyParams::Create(a.sensitivity, a.epsilons.front());
  const Seed sd = DeriveSeed(a.seed, "qos-draw", 0);
  const std::map<std::string, MeasurementSeries> curves{
      {"forecast_original.csv", Forecast(s, cfg)},
      {"forecast_dp.csv", Forecast(ApplyDp(s, p, sd), cfg)},
      {"forecast_fdi_dp.csv", Forecast(ApplyDpUnderAttack(s, p, a.gamma, window, sd), cfg)}};
  json files = json::array();
  for (const auto& [name, curve] : curves) {
    const auto path = ctx.Path(name);
    WriteCsvFile(path.string(), curve, ctx.Comment());
    files.push_back(path.string());
  }
  ctx.Emit({{"costs", costs},
            {"series_length", s.size()},
            {"attack_window", {{"begin", window.begin}, {"end", window.end}}},
            {"forecast_csv", files}});
}

struct BenchArgs {
  std::string input;
  std::size_t size = 10'000;
  std::size_t reps = 31;
  double scale = 20.0;
  double gamma = 2.0;
  Seed seed = 0;
};

void RunBenchCommand(const BenchArgs& a, const Context& ctx) {
  std::vector<double> batch;
  if (!a.input.empty()) {
    const auto s = ReadCsv(a.input);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.present(i)) batch.push_back(s.values()[i]);
    }
  } else {
    const auto s = SynthPmu({.days = static_cast<int>((a.size + 23) / 24),
                             .seed = DeriveSeed(a.seed, "bench-synth")});
    batch.assign(s.values().begin(), s.values().begin() + static_cast<long>(a.size));
  }
  const auto attack = AttackProfile::FromBudget(PrivacyParams::FromScale(a.scale), a.gamma);
  ctx.Emit(RunBench(batch, attack, {.reps = a.reps, .seed = a.seed}));
}

struct SynthArgs {
  int days = 30;
  std::int64_t step_seconds = 3600;
  double jitter = 1.0;
  double missing_fraction = 0.0;
  double annual_amplitude = 0.0;
  double trend_per_day = 0.0;
  std::string output = "synth.csv";
  Seed seed = 0;
};

void RunSynth(const SynthArgs& a, const Context& ctx) {
  SynthConfig cfg{.days = a.days, .step_seconds = a.step_seconds, .jitter = a.jitter,
                  .missing_fraction = a.missing_fraction, .seed = a.seed};
  cfg.profile.annual_amplitude = a.annual_amplitude;
  cfg.profile.trend_per_day = a.trend_per_day;
  const auto s = SynthPmu(cfg);
  const std::filesystem::path out(a.output);
  const auto path = out.is_absolute() ? out : ctx.Path(a.output);
  WriteCsvFile(path.string(), s, ctx.Comment());
  ctx.Emit({{"rows", s.size()}, {"missing", s.MissingCount()}, {"csv", path.string()}});
}

// --- dispatch --------------------------------------------------------------

void PrintError(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"type", kind}, {"message", message}}}}.dump() << std::endl;
}

// Effective configuration of the chosen subcommand, from CLI11's own view
// of the parsed options, so the hash covers defaults as well as flags.
json EffectiveConfig(const CLI::App& sub) {
  json j;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "--config") continue;
    const auto results = opt->results();
    const std::string key = opt->get_name(false, true);
    if (results.empty()) {
      j[key] = opt->get_default_str();
    } else if (results.size() == 1) {
      j[key] = results.front();
    } else {
      j[key] = results;
    }
  }
  return j;
}

int Main(int argc, char** argv) {
  CLI::App app{"Differential privacy and optimal false data injection for PMU networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values");
  std::string out_dir;
  if (const char* env = std::getenv(kOutDirEnv)) out_dir = env;
  if (out_dir.empty()) out_dir = ".";
  app.add_option("--out-dir", out_dir, "Output directory (default $CPESDP_OUT_DIR or .)")
      ->capture_default_str();

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Privacy loss that caps the optimal attack impact");
  cal_cmd->add_option("--sensitivity", cal.sensitivity, "Query sensitivity")->required();
  cal_cmd->add_option("--gamma", cal.gamma, "Assumed attacker KL budget")->required();
  cal_cmd->add_option("--max-deviation", cal.max_deviation, "Largest tolerable impact minus theta")
      ->required();
  cal_cmd->add_option("--theta", cal.theta, "Location of the query result")->capture_default_str();

  ImpactArgs imp;
  auto* imp_cmd = app.add_subcommand("impact", "Optimal attack impact at a privacy setting");
  imp_cmd->add_option("--epsilon", imp.epsilon, "Privacy loss")->required();
  imp_cmd->add_option("--gamma", imp.gamma, "Attacker KL budget")->required();
  imp_cmd->add_option("--sensitivity", imp.sensitivity, "Query sensitivity")->capture_default_str();
  imp_cmd->add_option("--theta", imp.theta, "Location of the query result")->capture_default_str();

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Impact surface over (epsilon, gamma, sensitivity)");
  sw_cmd->add_option("--epsilons", sw.epsilons)->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--gammas", sw.gammas)->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--sensitivities", sw.sensitivities)->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--theta", sw.theta)->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the query through a PMU/PDC/MASTER topology");
  sim_cmd->add_option("--topology", sim.topology, "Topology JSON file")->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--series", sim.series, "PMU_ID=CSV_PATH, repeatable");
  sim_cmd->add_option("--synth-days", sim.synth_days, "Synthesize data for PMUs without --series")
      ->capture_default_str();
  sim_cmd->add_option("--query", sim.query)->check(CLI::IsMember({"hourly_mean", "sum"}))
      ->capture_default_str();
  sim_cmd->add_option("--tau", sim.tau, "Detector threshold")->capture_default_str();
  sim_cmd->add_option("--window", sim.window, "Detector window")->capture_default_str();
  sim_cmd->add_option("--runs", sim.runs, "Detection-rate runs (0 to skip, else >= 1000)")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();

  QosArgs qos;
  auto* qos_cmd = app.add_subcommand("qos", "Privacy, security and defense cost of forecasts");
  qos_cmd->add_option("--input", qos.input, "timestamp,value CSV (resampled hourly)");
  qos_cmd->add_option("--synth-days", qos.synth_days, "Synthesize this many days instead")
      ->capture_default_str();
  qos_cmd->add_option("--epsilons", qos.epsilons)->delimiter(',')->capture_default_str();
  qos_cmd->add_option("--sensitivity", qos.sensitivity)->capture_default_str();
  qos_cmd->add_option("--gamma", qos.gamma, "Attacker KL budget")->capture_default_str();
  qos_cmd->add_option("--window-begin", qos.window_begin, "First attacked index (default middle)");
  qos_cmd->add_option("--window-length", qos.window_length)->capture_default_str();
  qos_cmd->add_option("--method", qos.method)
      ->check(CLI::IsMember({"holt_winters", "seasonal_naive"}))->capture_default_str();
  qos_cmd->add_option("--season-length", qos.season_length)->capture_default_str();
  qos_cmd->add_option("--horizon", qos.horizon)->capture_default_str();
  qos_cmd->add_option("--draws", qos.draws, "Noise draws averaged per epsilon")->capture_default_str();
  qos_cmd->add_option("--seed", qos.seed)->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Attacker cost: DP injection vs AES-256-CBC");
  bench_cmd->add_option("--input", bench.input, "timestamp,value CSV used as the batch");
  bench_cmd->add_option("--size", bench.size, "Synthetic batch size")->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps)->capture_default_str();
  bench_cmd->add_option("--scale", bench.scale, "Laplace scale of the attacked release")
      ->capture_default_str();
  bench_cmd->add_option("--gamma", bench.gamma)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synth", "Synthetic PMU consumption series");
  syn_cmd->add_option("--days", syn.days)->capture_default_str();
  syn_cmd->add_option("--step-seconds", syn.step_seconds)->capture_default_str();
  syn_cmd->add_option("--jitter", syn.jitter)->capture_default_str();
  syn_cmd->add_option("--missing-fraction", syn.missing_fraction)->capture_default_str();
  syn_cmd->add_option("--annual-amplitude", syn.annual_amplitude)->capture_default_str();
  syn_cmd->add_option("--trend-per-day", syn.trend_per_day)->capture_default_str();
  syn_cmd->add_option("--output", syn.output, "File name, relative to the output directory")
      ->capture_default_str();
  syn_cmd->add_option("--seed", syn.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("usage", e.what());
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Context ctx;
  ctx.command = sub->get_name();
  ctx.config = {{"command", ctx.command}, {"options", EffectiveConfig(*sub)}};
  ctx.hash = ConfigHash(ctx.config);
  ctx.out_dir = out_dir;

  try {
    if (ctx.command == "calibrate") RunCalibrate(cal, ctx);
    if (ctx.command == "impact") RunImpact(imp, ctx);
    if (ctx.command == "sweep") RunSweep(sw, ctx);
    if (ctx.command == "simulate") RunSimulate(sim, ctx);
    if (ctx.command == "qos") RunQos(qos, ctx);
    if (ctx.command == "bench") RunBenchCommand(bench, ctx);
    if (ctx.command == "synth") RunSynth(syn, ctx);
  } catch (const UsageError& e) {
    PrintError("usage", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    PrintError("domain", e.what());
    return kExitUsage;
  } catch (const FormatError& e) {
    PrintError("format", e.what());
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    PrintError("io", e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace cpesdp

int main(int argc, char** argv) { return cpesdp::Main(argc, argv); }

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

// Timestamped PMU measurement series with a missing-value mask, CSV
// ingestion/export and a synthetic consumption generator.
//
// CSV schema: a header `timestamp,value` or `timestamp,value,quality`
// followed by one row per reading. Timestamps are ISO-8601 UTC
// (`2018-10-14T00:00:00Z`, optional `.mmm` fraction). Blank or unparseable
// values and rows with quality `0`/`bad` are kept as masked entries. Lines
// starting with `#` are comments.

#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cpesdp/rng.hpp"
#include "cpesdp/solver.hpp"

namespace cpesdp {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

enum class Channel { kPowerKwh, kVoltage };

// Malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeasurementSeries {
 public:
  MeasurementSeries() = default;
  explicit MeasurementSeries(Channel channel) : channel_(channel) {}

  // Appends a reading; std::nullopt (or a non-finite value) is masked.
  // Timestamps must be strictly increasing.
  void Append(Timestamp t, std::optional<double> value) {
    if (!timestamps_.empty() && !(t > timestamps_.back())) {
      throw DomainError("timestamps must be strictly increasing");
    }
    const bool ok = value.has_value() && std::isfinite(*value);
    timestamps_.push_back(t);
    values_.push_back(ok ? *value : std::numeric_limits<double>::quiet_NaN());
    present_.push_back(ok);
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  Channel channel() const { return channel_; }

  const std::vector<Timestamp>& timestamps() const { return timestamps_; }
  const std::vector<double>& values() const { return values_; }
  bool present(std::size_t i) const { return present_[i]; }

  std::size_t MissingCount() const {
    std::size_t n = 0;
    for (bool p : present_) n += p ? 0 : 1;
    return n;
  }

  // Copy with the same timestamps/mask and replaced values. Masked entries
  // stay masked.
  MeasurementSeries WithValues(const std::vector<double>& values) const {
    if (values.size() != size()) throw DomainError("value count mismatch");
    MeasurementSeries out(channel_);
    for (std::size_t i = 0; i < size(); ++i) {
      out.Append(timestamps_[i],
                 present_[i] ? std::optional<double>(values[i]) : std::nullopt);
    }
    return out;
  }

  friend bool operator==(const MeasurementSeries& a,
                         const MeasurementSeries& b) {
    if (a.channel_ != b.channel_ || a.timestamps_ != b.timestamps_ ||
        a.present_ != b.present_) {
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.present_[i] && a.values_[i] != b.values_[i]) return false;
    }
    return true;
  }

 private:
  Channel channel_ = Channel::kPowerKwh;
  std::vector<Timestamp> timestamps_;
  std::vector<double> values_;
  std::vector<bool> present_;
};

// --- ISO-8601 -----------------------------------------------------------------

inline std::string FormatTimestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd(day);
  const hh_mm_ss hms(t - day);
  char buf[40];
  const long ms = static_cast<long>(hms.subseconds().count());
  if (ms != 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()), ms);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
  }
  return buf;
}

namespace internal {

inline bool ParseFixedInt(std::string_view s, std::size_t pos, std::size_t len,
                          int& out) {
  if (pos + len > s.size()) return false;
  const char* first = s.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + len, out);
  return ec == std::errc() && ptr == first + len;
}

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace internal

// Accepts `YYYY-MM-DDTHH:MM:SS[.fff][Z|+00:00]`; a space may replace `T`.
inline std::optional<Timestamp> ParseTimestamp(std::string_view s) {
  using namespace std::chrono;
  s = internal::Trim(s);
  int y, mo, d, h, mi, sec;
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' ||
      (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') {
    return std::nullopt;
  }
  if (!internal::ParseFixedInt(s, 0, 4, y) ||
      !internal::ParseFixedInt(s, 5, 2, mo) ||
      !internal::ParseFixedInt(s, 8, 2, d) ||
      !internal::ParseFixedInt(s, 11, 2, h) ||
      !internal::ParseFixedInt(s, 14, 2, mi) ||
      !internal::ParseFixedInt(s, 17, 2, sec)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  int millis = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 3) millis = millis * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (int i = digits; i < 3; ++i) millis *= 10;
  }
  const std::string_view zone = s.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00")) return std::nullopt;

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 59) {
    return std::nullopt;
  }
  return Timestamp{sys_days(ymd)} + hours(h) + minutes(mi) + seconds(sec) +
         milliseconds(millis);
}

// --- CSV ----------------------------------------------------------------------

enum class CsvSchema { kTimestampValue, kTimestampValueQuality };

inline const char* ExpectedHeader(CsvSchema schema) {
  return schema == CsvSchema::kTimestampValue ? "timestamp,value"
                                              : "timestamp,value,quality";
}

struct IngestOptions {
  CsvSchema schema = CsvSchema::kTimestampValue;
  Channel channel = Channel::kPowerKwh;
  bool resample_hourly = false;
};

inline MeasurementSeries ResampleHourly(const MeasurementSeries& series);

inline MeasurementSeries ParseCsv(std::istream& in, const IngestOptions& opts) {
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  MeasurementSeries series(opts.channel);
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = internal::Trim(line);
    if (row.empty() || row.front() == '#') continue;
    if (!have_header) {
      if (row != ExpectedHeader(opts.schema)) {
        throw FormatError("malformed header '" + std::string(row) +
                          "'; expected '" + ExpectedHeader(opts.schema) + "'");
      }
      have_header = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      fields.push_back(internal::Trim(row.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const std::size_t want =
        opts.schema == CsvSchema::kTimestampValue ? 2 : 3;
    if (fields.size() != want) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(want) + " fields");
    }
    const auto ts = ParseTimestamp(fields[0]);
    if (!ts) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": bad timestamp '" + std::string(fields[0]) + "'");
    }
    std::optional<double> value;
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), v);
    if (!fields[1].empty() && ec == std::errc() &&
        ptr == fields[1].data() + fields[1].size() && std::isfinite(v)) {
      value = v;
    }
    if (want == 3 && (fields[2] == "0" || fields[2] == "bad")) {
      value.reset();
    }
    try {
      series.Append(*ts, value);
    } catch (const DomainError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw FormatError("empty file");
  return opts.resample_hourly ? ResampleHourly(series) : series;
}

inline MeasurementSeries ReadCsv(const std::string& path,
                                 const IngestOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return ParseCsv(in, opts);
}

// Shortest round-trip representation.
inline std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline void WriteCsv(std::ostream& out, const MeasurementSeries& series,
                     std::string_view comment = {}) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "timestamp,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << FormatTimestamp(series.timestamps()[i]) << ',';
    if (series.present(i)) out << FormatDouble(series.values()[i]);
    out << '\n';
  }
}

inline void WriteCsvFile(const std::string& path,
                         const MeasurementSeries& series,
                         std::string_view comment = {}) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  WriteCsv(out, series, comment);
}

// One entry per clock hour from the first to the last reading, holding the
// mean of the present values in that hour (masked if there are none).
inline MeasurementSeries ResampleHourly(const MeasurementSeries& series) {
  using std::chrono::hours;
  MeasurementSeries out(series.channel());
  if (series.empty()) return out;
  const auto hour_of = [](Timestamp t) {
    return std::chrono::floor<hours>(t);
  };
  auto current = hour_of(series.timestamps().front());
  double sum = 0.0;
  std::size_t count = 0;
  const auto flush = [&](auto hour) {
    out.Append(Timestamp(hour), count > 0 ? std::optional<double>(
                                                sum / static_cast<double>(count))
                                          : std::nullopt);
    sum = 0.0;
    count = 0;
  };
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto h = hour_of(series.timestamps()[i]);
    while (h > current) {
      flush(current);
      current += hours(1);
    }
    if (series.present(i)) {
      sum += series.values()[i];
      ++count;
    }
  }
  flush(current);
  return out;
}

// --- Synthetic PMU consumption -------------------------------------------------

// Hourly consumption shape (KWh) scaled by a day-of-week factor. Index 0 of
// `weekday_factor` is Sunday.
struct SeasonProfile {
  std::array<double, 24> hourly{22, 21, 20, 20, 20, 22, 26, 32, 38, 42, 44, 45,
                                44, 44, 43, 42, 41, 40, 38, 35, 31, 28, 25, 23};
  std::array<double, 7> weekday_factor{0.70, 1.0, 1.0, 1.0, 1.0, 1.0, 0.75};
  // Relative amplitude of a yearly sinusoid (peak near mid-winter).
  double annual_amplitude = 0.0;
  double trend_per_day = 0.0;
};

struct SynthConfig {
  int days = 1;
  Timestamp start = Timestamp{std::chrono::sys_days{
      std::chrono::year{2014} / std::chrono::January / 1}};
  std::int64_t step_seconds = 3600;
  SeasonProfile profile;
  // Standard deviation of i.i.d. Gaussian jitter per reading.
  double jitter = 1.0;
  double missing_fraction = 0.0;
  Seed seed = 0;
  Channel channel = Channel::kPowerKwh;
};

// Noise-free expected reading at time `t`.
inline double ProfileValue(const SynthConfig& cfg, Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const int hour = static_cast<int>(floor<hours>(t - day).count());
  const unsigned dow = weekday(day).c_encoding();
  const double elapsed_days =
      duration<double, days::period>(t - cfg.start).count();
  const double annual =
      1.0 + cfg.profile.annual_amplitude *
                std::cos(2.0 * M_PI * elapsed_days / 365.25);
  return cfg.profile.hourly[static_cast<std::size_t>(hour)] *
             cfg.profile.weekday_factor[dow] * annual +
         cfg.profile.trend_per_day * elapsed_days;
}

inline MeasurementSeries SynthPmu(const SynthConfig& cfg) {
  if (cfg.days < 1) throw DomainError("days must be at least 1");
  if (!(cfg.missing_fraction >= 0.0 && cfg.missing_fraction < 1.0)) {
    throw DomainError("missing_fraction must be in [0, 1)");
  }
  if (cfg.step_seconds < 1) throw DomainError("step_seconds must be positive");
  if (!(cfg.jitter >= 0.0)) throw DomainError("jitter must be non-negative");

  Rng rng(DeriveSeed(cfg.seed, "synth"));
  MeasurementSeries out(cfg.channel);
  const std::int64_t total =
      static_cast<std::int64_t>(cfg.days) * 86400 / cfg.step_seconds;
  for (std::int64_t i = 0; i < total; ++i) {
    const Timestamp t = cfg.start + std::chrono::seconds(i * cfg.step_seconds);
    const double jitter = cfg.jitter * rng.StandardNormal();
    const bool missing = rng.UniformOpen() < cfg.missing_fraction;
    out.Append(t, missing ? std::nullopt
                          : std::optional<double>(ProfileValue(cfg, t) + jitter));
  }
  return out;
}

}  // namespace cpesdp

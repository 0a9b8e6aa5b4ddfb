// Copyright 2026 The llsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LLSCHED_TELEMETRY_HPP_
#define LLSCHED_TELEMETRY_HPP_

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llsched/core.hpp"

namespace llsched {

/// Per-slot CPU values for one day. NaN marks an absent slot.
using SlotArray = Eigen::Array<double, kSlotsPerDay, 1>;

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

/// One 5-minute average user CPU reading.
struct LoadSample {
  Minute timestamp = 0;
  double cpu_pct = 0.0;

  friend bool operator==(const LoadSample&, const LoadSample&) = default;
};

/// A server's telemetry, samples strictly increasing in time.
struct LoadSeries {
  std::string server_id;
  std::vector<LoadSample> samples;
  Minute default_backup_start = 0;
  Minute default_backup_end = 0;

  Day first_day() const { return Day::containing(samples.front().timestamp); }
  Day last_day() const { return Day::containing(samples.back().timestamp); }
  Day default_backup_day() const { return Day::containing(default_backup_start); }

  /// Samples with timestamps in [from, to).
  std::span<const LoadSample> between(Minute from, Minute to) const;
  std::span<const LoadSample> on(Day d) const {
    return between(d.start_minute(), (d + 1).start_minute());
  }

  friend bool operator==(const LoadSeries&, const LoadSeries&) = default;
};

/// One server-day on the fixed 288-slot grid. Slot k covers minutes [5k, 5k + 5).
struct DaySlice {
  std::string server_id;
  Day day;
  SlotArray values = SlotArray::Constant(kAbsent);

  DaySlice() = default;
  DaySlice(std::string id, Day d) : server_id(std::move(id)), day(d) {}
  /// Throws std::invalid_argument when a present value is outside [0, 100].
  DaySlice(std::string id, Day d, const SlotArray& v);

  bool present(int slot) const { return !std::isnan(values[slot]); }
  auto mask() const { return values.isNaN() == false; }
  int present_count() const { return static_cast<int>(mask().count()); }
};

/// Places the series' samples for `day` onto the slot grid. No interpolation.
DaySlice slice_day(const LoadSeries& series, Day day);

/// Fraction of present slots.
inline double coverage(const DaySlice& slice) {
  return static_cast<double>(slice.present_count()) / kSlotsPerDay;
}

/// Minimum coverage for a server-day to take part in evaluation.
inline constexpr double kDefaultMinCoverage = 0.9;

inline bool is_evaluable(const DaySlice& slice, double min_coverage = kDefaultMinCoverage) {
  return coverage(slice) >= min_coverage;
}

/// slice_day, throwing NotEvaluable when coverage is below `min_coverage`.
DaySlice evaluable_slice(const LoadSeries& series, Day day,
                         double min_coverage = kDefaultMinCoverage);

/// Reads the telemetry CSV
/// `server_id,timestamp_min,avg_cpu_pct,default_backup_start_min,default_backup_end_min`.
/// Returns one series per server, sorted by server id.
std::vector<LoadSeries> parse_telemetry(const std::filesystem::path& path);
std::vector<LoadSeries> parse_telemetry(std::istream& in);

/// Writes series back in the input format, server by server.
void write_telemetry(std::ostream& out, std::span<const LoadSeries> fleet);
/// One series' rows, without the header.
void write_telemetry_rows(std::ostream& out, const LoadSeries& series);

inline constexpr const char* kTelemetryHeader =
    "server_id,timestamp_min,avg_cpu_pct,default_backup_start_min,default_backup_end_min";

// -- schema inference and validation ---------------------------------------

enum class ColumnType { String, Integer, Real };

struct ColumnSpec {
  std::string name;
  ColumnType type = ColumnType::String;
  // Numeric columns only.
  std::optional<double> min;
  std::optional<double> max;
  // Integer columns only: values must be multiples of this step.
  std::optional<std::int64_t> multiple_of;
};

struct SchemaSpec {
  std::vector<ColumnSpec> columns;

  /// Throws ConfigError when a column has min > max.
  void check() const;
};

/// Expected schema of telemetry input: cpu in [0, 100], time columns on 5-minute steps.
SchemaSpec telemetry_schema();

/// Deduces column types and observed min/max from a CSV file with a header row.
SchemaSpec infer_schema(const std::filesystem::path& path);
SchemaSpec infer_schema(std::istream& in);

enum class AnomalyKind { Schema, Bound, Gap };

struct Anomaly {
  AnomalyKind kind;
  std::size_t row;  // 1-based line number
  std::string message;
};

struct ValidationReport {
  bool pass = true;
  std::size_t rows = 0;
  std::vector<Anomaly> anomalies;

  std::size_t count(AnomalyKind kind) const;
};

/// Checks every row against `spec`. A row breaking column count, type, or a bound
/// is reported once, under the first problem found. Gaps between consecutive rows
/// of the same server are reported as warnings and do not fail the verdict.
ValidationReport validate(const std::filesystem::path& path, const SchemaSpec& spec);
ValidationReport validate(std::istream& in, const SchemaSpec& spec);

std::string_view to_string(AnomalyKind kind);
std::string_view to_string(ColumnType type);

}  // namespace llsched

#endif  // LLSCHED_TELEMETRY_HPP_

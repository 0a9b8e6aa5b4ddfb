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

#include "llsched/telemetry.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "csv.hpp"

namespace llsched {

std::span<const LoadSample> LoadSeries::between(Minute from, Minute to) const {
  auto by_time = [](const LoadSample& s, Minute t) { return s.timestamp < t; };
  auto lo = std::lower_bound(samples.begin(), samples.end(), from, by_time);
  auto hi = std::lower_bound(lo, samples.end(), to, by_time);
  return {lo, hi};
}

DaySlice::DaySlice(std::string id, Day d, const SlotArray& v)
    : server_id(std::move(id)), day(d), values(v) {
  // NaN compares false on both sides, so absent slots pass.
  if ((values < 0.0).any() || (values > 100.0).any()) {
    throw std::invalid_argument("slot value outside [0, 100]");
  }
}

DaySlice slice_day(const LoadSeries& series, Day day) {
  DaySlice slice(series.server_id, day);
  const Minute start = day.start_minute();
  for (const LoadSample& s : series.on(day)) {
    slice.values[static_cast<Eigen::Index>((s.timestamp - start) / kSlotMinutes)] = s.cpu_pct;
  }
  return slice;
}

DaySlice evaluable_slice(const LoadSeries& series, Day day, double min_coverage) {
  DaySlice slice = slice_day(series, day);
  if (!is_evaluable(slice, min_coverage)) {
    throw NotEvaluable("server '" + series.server_id + "' day " + day.iso() + ": coverage " +
                       std::to_string(coverage(slice)) + " below " + std::to_string(min_coverage));
  }
  return slice;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path.string() + "'");
  return in;
}

struct Accumulator {
  LoadSeries series;
  bool sorted = true;
};

}  // namespace

std::vector<LoadSeries> parse_telemetry(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_telemetry(in);
}

std::vector<LoadSeries> parse_telemetry(std::istream& in) {
  csv::LineReader reader(in);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(0, "empty file: missing header");
  if (line != kTelemetryHeader) {
    throw ParseError(reader.line_number(), "unexpected header, expected '" +
                                               std::string(kTelemetryHeader) + "'");
  }

  std::vector<Accumulator> acc;
  std::unordered_map<std::string, std::size_t> index;
  std::string last_id;
  std::size_t last_slot = 0;
  std::array<std::string_view, 5> f;

  while (reader.next(line)) {
    const std::size_t row = reader.line_number();
    const std::size_t n = csv::split(line, f);
    if (n != f.size()) {
      throw ParseError(row, "expected 5 columns, found " + std::to_string(n));
    }
    if (f[0].empty()) throw ParseError(row, "empty server_id");

    const auto ts = csv::to_int(f[1]);
    const auto cpu = csv::to_real(f[2]);
    const auto bstart = csv::to_int(f[3]);
    const auto bend = csv::to_int(f[4]);
    if (!ts || !bstart || !bend) throw ParseError(row, "non-integer timestamp column");
    if (!cpu) throw ParseError(row, "avg_cpu_pct is not a number");
    if (*ts % kSlotMinutes != 0) {
      throw ParseError(row, "timestamp " + std::to_string(*ts) + " not on a 5-minute boundary");
    }
    if (*cpu < 0.0 || *cpu > 100.0) throw ParseError(row, "avg_cpu_pct outside [0, 100]");
    if (*bstart >= *bend) throw ParseError(row, "default backup start not before end");
    if (*bstart % kSlotMinutes != 0 || *bend % kSlotMinutes != 0) {
      throw ParseError(row, "default backup window not on 5-minute boundaries");
    }

    if (f[0] != last_id || acc.empty()) {
      last_id.assign(f[0]);
      auto [it, inserted] = index.try_emplace(last_id, acc.size());
      if (inserted) {
        Accumulator a;
        a.series.server_id = last_id;
        a.series.default_backup_start = *bstart;
        a.series.default_backup_end = *bend;
        acc.push_back(std::move(a));
      }
      last_slot = it->second;
    }
    Accumulator& a = acc[last_slot];
    if (a.series.default_backup_start != *bstart || a.series.default_backup_end != *bend) {
      throw ParseError(row, "default backup window differs from earlier rows of server '" +
                                last_id + "'");
    }
    if (!a.series.samples.empty() && a.sorted) {
      const Minute prev = a.series.samples.back().timestamp;
      if (prev == *ts) {
        throw ParseError(row, "duplicate timestamp " + std::to_string(*ts) + " for server '" +
                                  last_id + "'");
      }
      if (prev > *ts) a.sorted = false;
    }
    a.series.samples.push_back({*ts, *cpu});
  }

  std::vector<LoadSeries> out;
  out.reserve(acc.size());
  for (Accumulator& a : acc) {
    auto& s = a.series.samples;
    if (!a.sorted) {
      std::sort(s.begin(), s.end(),
                [](const LoadSample& x, const LoadSample& y) { return x.timestamp < y.timestamp; });
      auto dup = std::adjacent_find(s.begin(), s.end(), [](const LoadSample& x, const LoadSample& y) {
        return x.timestamp == y.timestamp;
      });
      if (dup != s.end()) {
        throw ParseError(0, "duplicate timestamp " + std::to_string(dup->timestamp) +
                                " for server '" + a.series.server_id + "'");
      }
    }
    s.shrink_to_fit();
    out.push_back(std::move(a.series));
  }
  std::sort(out.begin(), out.end(),
            [](const LoadSeries& x, const LoadSeries& y) { return x.server_id < y.server_id; });
  return out;
}

void write_telemetry_rows(std::ostream& out, const LoadSeries& s) {
  const std::string tail =
      std::to_string(s.default_backup_start) + ',' + std::to_string(s.default_backup_end) + '\n';
  std::string buf;
  for (const LoadSample& x : s.samples) {
    buf.clear();
    buf += s.server_id;
    buf += ',';
    buf += std::to_string(x.timestamp);
    buf += ',';
    csv::append_real(buf, x.cpu_pct);
    buf += ',';
    buf += tail;
    out << buf;
  }
}

void write_telemetry(std::ostream& out, std::span<const LoadSeries> fleet) {
  out << kTelemetryHeader << '\n';
  for (const LoadSeries& s : fleet) write_telemetry_rows(out, s);
}

// -- schema ------------------------------------------------------------------

void SchemaSpec::check() const {
  for (const ColumnSpec& c : columns) {
    if (c.min && c.max && *c.min > *c.max) {
      throw ConfigError("column '" + c.name + "': min exceeds max");
    }
    if (c.multiple_of && *c.multiple_of <= 0) {
      throw ConfigError("column '" + c.name + "': multiple_of must be positive");
    }
  }
}

SchemaSpec telemetry_schema() {
  SchemaSpec spec;
  spec.columns = {
      {"server_id", ColumnType::String, {}, {}, {}},
      {"timestamp_min", ColumnType::Integer, 0.0, {}, kSlotMinutes},
      {"avg_cpu_pct", ColumnType::Real, 0.0, 100.0, {}},
      {"default_backup_start_min", ColumnType::Integer, 0.0, {}, kSlotMinutes},
      {"default_backup_end_min", ColumnType::Integer, 0.0, {}, kSlotMinutes},
  };
  return spec;
}

SchemaSpec infer_schema(const std::filesystem::path& path) {
  auto in = open_input(path);
  return infer_schema(in);
}

SchemaSpec infer_schema(std::istream& in) {
  csv::LineReader reader(in);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(0, "empty file: missing header");

  std::vector<std::string_view> fields;
  csv::split(line, fields);
  SchemaSpec spec;
  for (std::string_view name : fields) spec.columns.push_back({std::string(name), {}, {}, {}, {}});

  const std::size_t width = spec.columns.size();
  std::vector<bool> is_int(width, true), is_real(width, true);
  std::vector<double> lo(width, std::numeric_limits<double>::infinity());
  std::vector<double> hi(width, -std::numeric_limits<double>::infinity());

  std::size_t rows = 0;
  while (reader.next(line)) {
    csv::split(line, fields);
    if (fields.size() != width) {
      throw ParseError(reader.line_number(), "expected " + std::to_string(width) +
                                                 " columns, found " +
                                                 std::to_string(fields.size()));
    }
    ++rows;
    for (std::size_t c = 0; c < width; ++c) {
      if (!is_real[c]) continue;
      if (is_int[c] && !csv::to_int(fields[c])) is_int[c] = false;
      const auto v = csv::to_real(fields[c]);
      if (!v) {
        is_real[c] = false;
        continue;
      }
      lo[c] = std::min(lo[c], *v);
      hi[c] = std::max(hi[c], *v);
    }
  }
  if (rows == 0) throw ParseError(0, "no rows to infer a schema from");

  for (std::size_t c = 0; c < width; ++c) {
    ColumnSpec& col = spec.columns[c];
    if (!is_real[c]) continue;
    col.type = is_int[c] ? ColumnType::Integer : ColumnType::Real;
    col.min = lo[c];
    col.max = hi[c];
  }
  return spec;
}

// -- validation ----------------------------------------------------------------

std::size_t ValidationReport::count(AnomalyKind kind) const {
  return static_cast<std::size_t>(std::count_if(anomalies.begin(), anomalies.end(),
                                                [kind](const Anomaly& a) { return a.kind == kind; }));
}

namespace {

std::string format_number(double v) {
  std::string s;
  csv::append_real(s, v);
  return s;
}

// Returns the first problem with `text` under `col`, if any.
std::optional<Anomaly> check_field(const ColumnSpec& col, std::string_view text, std::size_t row) {
  auto schema = [&](std::string msg) {
    return Anomaly{AnomalyKind::Schema, row, "column '" + col.name + "': " + msg};
  };
  double value = 0.0;
  switch (col.type) {
    case ColumnType::String:
      return std::nullopt;
    case ColumnType::Integer: {
      const auto v = csv::to_int(text);
      if (!v) return schema("expected integer, found '" + std::string(text) + "'");
      if (col.multiple_of && *v % *col.multiple_of != 0) {
        return schema(std::to_string(*v) + " is not a multiple of " +
                      std::to_string(*col.multiple_of));
      }
      value = static_cast<double>(*v);
      break;
    }
    case ColumnType::Real: {
      const auto v = csv::to_real(text);
      if (!v) return schema("expected number, found '" + std::string(text) + "'");
      value = *v;
      break;
    }
  }
  if ((col.min && value < *col.min) || (col.max && value > *col.max)) {
    return Anomaly{AnomalyKind::Bound, row,
                   "column '" + col.name + "': " + format_number(value) + " outside [" +
                       (col.min ? format_number(*col.min) : "-inf") + ", " +
                       (col.max ? format_number(*col.max) : "inf") + "]"};
  }
  return std::nullopt;
}

std::optional<std::size_t> column_index(const SchemaSpec& spec, std::string_view name) {
  for (std::size_t i = 0; i < spec.columns.size(); ++i) {
    if (spec.columns[i].name == name) return i;
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate(const std::filesystem::path& path, const SchemaSpec& spec) {
  auto in = open_input(path);
  return validate(in, spec);
}

ValidationReport validate(std::istream& in, const SchemaSpec& spec) {
  spec.check();
  ValidationReport report;
  csv::LineReader reader(in);
  std::string_view line;
  std::vector<std::string_view> fields;

  if (!reader.next(line)) {
    report.anomalies.push_back({AnomalyKind::Schema, 0, "empty file: missing header"});
    report.pass = false;
    return report;
  }
  csv::split(line, fields);
  bool header_ok = fields.size() == spec.columns.size();
  for (std::size_t i = 0; header_ok && i < fields.size(); ++i) {
    header_ok = fields[i] == spec.columns[i].name;
  }
  if (!header_ok) {
    std::string expected;
    for (const ColumnSpec& c : spec.columns) expected += (expected.empty() ? "" : ",") + c.name;
    report.anomalies.push_back(
        {AnomalyKind::Schema, reader.line_number(),
         "header '" + std::string(line) + "' does not match '" + expected + "'"});
  }

  // Gap tracking needs a server and a time column.
  const auto server_col = column_index(spec, "server_id");
  const auto time_col = column_index(spec, "timestamp_min");
  const bool track_gaps = server_col && time_col;
  std::unordered_map<std::string, Minute> last_seen;
  std::string last_id;
  Minute* last_ts = nullptr;

  while (reader.next(line)) {
    const std::size_t row = reader.line_number();
    ++report.rows;
    csv::split(line, fields);
    if (fields.size() != spec.columns.size()) {
      report.anomalies.push_back({AnomalyKind::Schema, row,
                                  "expected " + std::to_string(spec.columns.size()) +
                                      " columns, found " + std::to_string(fields.size())});
      continue;
    }
    std::optional<Anomaly> problem;
    for (std::size_t c = 0; c < fields.size() && !problem; ++c) {
      problem = check_field(spec.columns[c], fields[c], row);
    }
    if (problem) {
      report.anomalies.push_back(std::move(*problem));
      continue;
    }
    if (!track_gaps) continue;

    const auto ts = csv::to_int(fields[*time_col]);
    if (!ts) continue;
    const std::string_view id = fields[*server_col];
    if (last_ts == nullptr || id != last_id) {
      last_id.assign(id);
      auto [it, inserted] = last_seen.try_emplace(last_id, *ts);
      last_ts = &it->second;
      if (inserted) continue;
    }
    if (*ts - *last_ts > kSlotMinutes) {
      report.anomalies.push_back({AnomalyKind::Gap, row,
                                  "server '" + last_id + "': " +
                                      std::to_string(*ts - *last_ts - kSlotMinutes) +
                                      " minutes missing before " + std::to_string(*ts)});
    }
    if (*ts > *last_ts) *last_ts = *ts;
  }

  report.pass = std::none_of(report.anomalies.begin(), report.anomalies.end(),
                             [](const Anomaly& a) { return a.kind != AnomalyKind::Gap; });
  return report;
}

std::string_view to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::Schema: return "schema";
    case AnomalyKind::Bound: return "bound";
    case AnomalyKind::Gap: return "gap";
  }
  return "unknown";
}

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::String: return "string";
    case ColumnType::Integer: return "integer";
    case ColumnType::Real: return "real";
  }
  return "unknown";
}

}  // namespace llsched

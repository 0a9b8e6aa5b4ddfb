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

#include "llsched/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "llsched/lowload.hpp"
#include "llsched/telemetry.hpp"

namespace llsched {

namespace {

constexpr int kPeakSlots = 48;   // 4 hours
constexpr int kRampRadius = 3;   // boxcar half-width, slots
constexpr int kEdgeMargin = 4;   // keeps blocks clear of midnight after smoothing
constexpr double kWalkStep = 4.0;

bool has_peak(ServerClass c) {
  return c == ServerClass::DailyPattern || c == ServerClass::WeeklyPattern;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Circular moving average, giving piecewise-constant levels short linear ramps.
SlotArray smooth(const SlotArray& levels) {
  SlotArray out;
  for (int k = 0; k < kSlotsPerDay; ++k) {
    double s = 0.0;
    for (int j = -kRampRadius; j <= kRampRadius; ++j) {
      s += levels[(k + j + kSlotsPerDay) % kSlotsPerDay];
    }
    out[k] = s / (2 * kRampRadius + 1);
  }
  return out;
}

struct DayShape {
  SlotArray weekday;
  SlotArray weekend;
  int valley_start = 0;
  int valley_slots = 0;
  int peak_start = 0;
};

DayShape make_shape(const FleetConfig& cfg, std::mt19937_64& rng) {
  DayShape shape;
  const double valley = uniform(rng, 5.0, 15.0);
  const double mid = uniform(rng, 35.0, 50.0);
  const double peak = uniform(rng, 70.0, 90.0);
  const double weekend_mid = valley + uniform(rng, 15.0, 20.0);

  shape.valley_slots = cfg.valley.width_minutes / kSlotMinutes;
  const int jitter = cfg.valley.jitter_minutes / kSlotMinutes;
  const int nominal = cfg.valley.start_minute / kSlotMinutes;
  shape.valley_start = std::clamp(nominal + uniform_int(rng, -jitter, jitter), kEdgeMargin,
                                  kSlotsPerDay - shape.valley_slots - kEdgeMargin);

  // Peak sits opposite the valley on the clock.
  const int valley_center = shape.valley_start + shape.valley_slots / 2;
  const int peak_center = (valley_center + kSlotsPerDay / 2) % kSlotsPerDay;
  shape.peak_start = std::clamp(peak_center - kPeakSlots / 2, kEdgeMargin,
                                kSlotsPerDay - kPeakSlots - kEdgeMargin);
  const int v0 = shape.valley_start, v1 = v0 + shape.valley_slots;
  const int p0 = shape.peak_start, p1 = p0 + kPeakSlots;
  if (!(p1 + 2 * kRampRadius < v0 || v1 + 2 * kRampRadius < p0)) {
    throw ConfigError("valley too wide to leave room for a daily peak");
  }

  SlotArray wd = SlotArray::Constant(mid);
  SlotArray we = SlotArray::Constant(weekend_mid);
  wd.segment(v0, shape.valley_slots).setConstant(valley);
  we.segment(v0, shape.valley_slots).setConstant(valley);
  wd.segment(p0, kPeakSlots).setConstant(peak);
  shape.weekday = smooth(wd);
  shape.weekend = smooth(we);
  return shape;
}

double quantize(double v) { return std::round(std::clamp(v, 0.0, 100.0) * 100.0) / 100.0; }

GeneratedServer make_server(const FleetConfig& cfg, std::size_t index, ServerClass label,
                            bool on_peak) {
  auto rng = make_rng(cfg.seed, index + 1);
  GeneratedServer out;
  out.label = label;
  out.default_on_peak = on_peak;

  char id[32];
  std::snprintf(id, sizeof id, "srv-%05zu", index);
  out.series.server_id = id;

  const Day backup = cfg.backup_day();
  const Day last = cfg.include_backup_day ? backup : backup - 1;
  Day first = cfg.start_day;
  if (label == ServerClass::ShortLived) first = backup - uniform_int(rng, 1, kLongLivedDays - 1);

  const DayShape shape = make_shape(cfg, rng);
  const double level = uniform(rng, 10.0, 80.0);
  double walk = uniform(rng, 20.0, 80.0);
  const double half = cfg.noise / 2.0;

  auto& samples = out.series.samples;
  samples.reserve(static_cast<std::size_t>(last - first + 1) * kSlotsPerDay);
  for (Day d = first; d <= last; ++d) {
    const bool weekend = d.weekday() == 0 || d.weekday() == 6;
    const SlotArray& tmpl =
        label == ServerClass::WeeklyPattern && weekend ? shape.weekend : shape.weekday;
    for (int k = 0; k < kSlotsPerDay; ++k) {
      double v = 0.0;
      switch (label) {
        case ServerClass::Stable:
          v = level + uniform(rng, -half, half);
          break;
        case ServerClass::NoPattern:
          walk += uniform(rng, -kWalkStep, kWalkStep);
          if (walk < 0.0) walk = -walk;
          if (walk > 100.0) walk = 200.0 - walk;
          v = walk;
          break;
        default:
          v = tmpl[k] + uniform(rng, -half, half);
          break;
      }
      samples.push_back({d.start_minute() + Minute{k} * kSlotMinutes, quantize(v)});
    }
  }

  const int b = cfg.backup_minutes / kSlotMinutes;
  int start = 0;
  if (on_peak) {
    start = shape.peak_start + (kPeakSlots - b) / 2;
  } else if (label == ServerClass::Stable || label == ServerClass::NoPattern) {
    start = uniform_int(rng, 0, kSlotsPerDay - b);
  } else {
    start = shape.valley_start + (shape.valley_slots - b) / 2;
  }
  out.series.default_backup_start = backup.start_minute() + Minute{start} * kSlotMinutes;
  out.series.default_backup_end = out.series.default_backup_start + cfg.backup_minutes;
  return out;
}

/// Exact per-class counts by largest remainder, in kAllClasses order.
std::vector<ServerClass> assign_labels(const FleetConfig& cfg) {
  std::vector<std::size_t> counts;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < std::size(kAllClasses); ++i) {
    const auto it = cfg.mix.find(kAllClasses[i]);
    const double exact = (it == cfg.mix.end() ? 0.0 : it->second) * static_cast<double>(cfg.server_count);
    counts.push_back(static_cast<std::size_t>(std::floor(exact)));
    remainders.push_back({exact - std::floor(exact), i});
    assigned += counts.back();
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < cfg.server_count; ++r, ++assigned) ++counts[remainders[r].second];

  std::vector<ServerClass> labels;
  labels.reserve(cfg.server_count);
  for (std::size_t i = 0; i < counts.size(); ++i) labels.insert(labels.end(), counts[i], kAllClasses[i]);
  auto rng = make_rng(cfg.seed, 0);
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

std::vector<bool> plant_peaks(const FleetConfig& cfg, const std::vector<ServerClass>& labels) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (has_peak(labels[i])) eligible.push_back(i);
  }
  const auto wanted = static_cast<std::size_t>(
      std::llround(cfg.peak_default_fraction * static_cast<double>(cfg.server_count)));
  if (wanted > eligible.size()) {
    throw ConfigError("peak_default_fraction needs " + std::to_string(wanted) +
                      " daily/weekly-pattern servers, mix provides " +
                      std::to_string(eligible.size()));
  }
  auto rng = make_rng(cfg.seed, ~std::uint64_t{0});
  std::shuffle(eligible.begin(), eligible.end(), rng);
  std::vector<bool> planted(labels.size(), false);
  for (std::size_t i = 0; i < wanted; ++i) planted[eligible[i]] = true;
  return planted;
}

template <class Sink>
void generate_each(const FleetConfig& cfg, Sink&& sink) {
  cfg.check();
  const auto labels = assign_labels(cfg);
  const auto planted = plant_peaks(cfg, labels);
  for (std::size_t i = 0; i < labels.size(); ++i) sink(make_server(cfg, i, labels[i], planted[i]));
}

}  // namespace

void FleetConfig::check() const {
  double total = 0.0;
  for (const auto& [cls, f] : mix) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("class fraction outside [0, 1]");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("class fractions must sum to 1");
  if (!(noise >= 0.0 && noise <= 100.0)) throw ConfigError("noise amplitude must be in [0, 100]");
  if (weeks < 1) throw ConfigError("weeks of history must be at least 1");
  if (!(peak_default_fraction >= 0.0 && peak_default_fraction <= 1.0)) {
    throw ConfigError("peak_default_fraction outside [0, 1]");
  }
  const BackupDuration b(backup_minutes);
  if (valley.width_minutes % kSlotMinutes != 0 || valley.start_minute % kSlotMinutes != 0 ||
      valley.jitter_minutes % kSlotMinutes != 0 || valley.jitter_minutes < 0) {
    throw ConfigError("valley times must be non-negative multiples of 5 minutes");
  }
  if (valley.width_minutes < b.minutes() + 8 * kRampRadius * kSlotMinutes ||
      valley.width_minutes > 480) {
    throw ConfigError("valley width must exceed the backup duration by 2 hours and be at most 8 hours");
  }

  auto wants = [&](ServerClass c) {
    const auto it = mix.find(c);
    return it != mix.end() && it->second > 0.0;
  };
  if (wants(ServerClass::WeeklyPattern) && weeks < 2) {
    throw ConfigError("weekly-pattern servers need at least 2 weeks of history");
  }
  for (ServerClass c : {ServerClass::Stable, ServerClass::DailyPattern, ServerClass::WeeklyPattern,
                        ServerClass::NoPattern}) {
    if (wants(c) && 7 * weeks <= kLongLivedDays) {
      throw ConfigError(std::string(to_string(c)) + " servers must outlive " +
                        std::to_string(kLongLivedDays) + " days; use at least 4 weeks");
    }
  }
}

std::vector<GeneratedServer> generate_fleet(const FleetConfig& config) {
  std::vector<GeneratedServer> fleet;
  fleet.reserve(config.server_count);
  generate_each(config, [&](GeneratedServer s) { fleet.push_back(std::move(s)); });
  return fleet;
}

GroundTruth generate_fleet(const FleetConfig& config, std::ostream& csv) {
  GroundTruth truth;
  truth.backup_day = config.backup_day();
  csv << kTelemetryHeader << '\n';
  generate_each(config, [&](GeneratedServer s) {
    truth.labels.emplace(s.series.server_id, s.label);
    truth.default_on_peak.emplace(s.series.server_id, s.default_on_peak);
    write_telemetry_rows(csv, s.series);
  });
  return truth;
}

GroundTruth ground_truth(const std::vector<GeneratedServer>& fleet, Day backup_day) {
  GroundTruth truth;
  truth.backup_day = backup_day;
  for (const GeneratedServer& s : fleet) {
    truth.labels.emplace(s.series.server_id, s.label);
    truth.default_on_peak.emplace(s.series.server_id, s.default_on_peak);
  }
  return truth;
}

}  // namespace llsched

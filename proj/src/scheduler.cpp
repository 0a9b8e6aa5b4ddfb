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

#include "llsched/scheduler.hpp"

#include <algorithm>
#include <cstdio>

namespace llsched {

std::string_view to_string(ScheduleSource s) {
  return s == ScheduleSource::Predicted ? "Predicted" : "Default";
}

DefaultWindow default_window(const LoadSeries& series) {
  const Day day = series.default_backup_day();
  const auto start = static_cast<int>((series.default_backup_start - day.start_minute()) / kSlotMinutes);
  const auto length = static_cast<int>(
      std::min<Minute>((series.default_backup_end - series.default_backup_start) / kSlotMinutes,
                       kSlotsPerDay - start));
  return {day, Window(start, length)};
}

FleetDueList due_from_defaults(std::span<const LoadSeries> fleet, BackupDuration duration) {
  FleetDueList due;
  for (const LoadSeries& s : fleet) due.emplace(s.server_id, DueEntry{s.default_backup_day(), duration});
  return due;
}

std::optional<BackupSchedule> schedule_one(const std::string& server_id, const DueEntry& entry,
                                           const ForecastResult* forecast,
                                           std::span<const PredictabilityRecord> history,
                                           const DefaultWindow* fallback, double min_coverage) {
  BackupSchedule s;
  s.server_id = server_id;
  s.backup_day = entry.backup_day;

  if (forecast != nullptr && forecast->target_day == entry.backup_day &&
      is_predictable(history, entry.backup_day) &&
      is_evaluable(forecast->predicted, min_coverage)) {
    try {
      s.window = ll_window(forecast->predicted, entry.duration, min_coverage);
      s.source = ScheduleSource::Predicted;
      s.expected_avg_load = window_avg(forecast->predicted, s.window);
      return s;
    } catch (const Error&) {
      // fall through to the default window
    }
  }
  if (fallback == nullptr) return std::nullopt;
  s.window = fallback->window;
  s.source = ScheduleSource::Default;
  return s;
}

ScheduleOutcome schedule_backups(
    const FleetDueList& due, const std::map<std::string, ForecastResult>& forecasts,
    const std::map<std::string, std::vector<PredictabilityRecord>>& history,
    const std::map<std::string, DefaultWindow>& defaults, double min_coverage) {
  ScheduleOutcome out;
  for (const auto& [id, entry] : due) {
    const auto f = forecasts.find(id);
    const auto h = history.find(id);
    const auto d = defaults.find(id);
    const auto s = schedule_one(
        id, entry, f == forecasts.end() ? nullptr : &f->second,
        h == history.end() ? std::span<const PredictabilityRecord>{} : std::span(h->second),
        d == defaults.end() ? nullptr : &d->second, min_coverage);
    if (s) {
      out.schedules.push_back(*s);
    } else {
      out.errors.push_back({id, "no usable forecast and no default window"});
    }
  }
  return out;
}

// -- impact ------------------------------------------------------------------------

std::string_view to_string(ImpactCategory c) {
  switch (c) {
    case ImpactCategory::MovedAndBetter: return "moved_and_better";
    case ImpactCategory::DefaultAlreadyGood: return "default_already_good";
    case ImpactCategory::PredictedWorse: return "predicted_worse";
  }
  return "unknown";
}

void ImpactBreakdown::add(ImpactCategory c) {
  ++servers;
  switch (c) {
    case ImpactCategory::MovedAndBetter: ++moved_and_better; break;
    case ImpactCategory::DefaultAlreadyGood: ++default_already_good; break;
    case ImpactCategory::PredictedWorse: ++predicted_worse; break;
  }
}

double ImpactBreakdown::fraction(ImpactCategory c) const {
  if (servers == 0) return 0.0;
  std::size_t n = 0;
  switch (c) {
    case ImpactCategory::MovedAndBetter: n = moved_and_better; break;
    case ImpactCategory::DefaultAlreadyGood: n = default_already_good; break;
    case ImpactCategory::PredictedWorse: n = predicted_worse; break;
  }
  return static_cast<double>(n) / static_cast<double>(servers);
}

ImpactReport impact_report(std::span<const BackupSchedule> schedules,
                           const std::map<std::string, DaySlice>& actuals,
                           const std::map<std::string, DefaultWindow>& defaults,
                           double busy_threshold, const ErrorBound& bound) {
  ImpactReport report;
  report.busy_threshold = busy_threshold;
  for (const BackupSchedule& s : schedules) {
    const auto a = actuals.find(s.server_id);
    const auto d = defaults.find(s.server_id);
    if (a == actuals.end() || d == defaults.end() || a->second.day != s.backup_day ||
        d->second.day != s.backup_day) {
      report.excluded.push_back(s.server_id);
      continue;
    }
    const DaySlice& actual = a->second;
    ServerImpact impact{s.server_id, ImpactCategory::DefaultAlreadyGood, 0.0, 0.0, 0.0};
    try {
      impact.default_avg = window_avg(actual, d->second.window);
      impact.chosen_avg = window_avg(actual, s.window);
    } catch (const Error&) {
      report.excluded.push_back(s.server_id);
      continue;
    }
    impact.peak = actual.values.isNaN().select(0.0, actual.values).maxCoeff();
    const double diff = impact.chosen_avg - impact.default_avg;
    if (diff > bound.over) {
      impact.category = ImpactCategory::PredictedWorse;
    } else if (-diff > bound.over) {
      impact.category = ImpactCategory::MovedAndBetter;
    }
    report.overall.add(impact.category);
    if (impact.peak > busy_threshold) report.busy.add(impact.category);
    report.servers.push_back(std::move(impact));
  }
  return report;
}

std::string format_impact_table(const ImpactReport& report) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-22s %12s %12s\n", "category", "all",
                ("busy (>" + std::to_string(static_cast<int>(report.busy_threshold)) + "%)").c_str());
  out += line;
  const ImpactCategory cats[] = {ImpactCategory::MovedAndBetter, ImpactCategory::DefaultAlreadyGood,
                                 ImpactCategory::PredictedWorse};
  for (ImpactCategory c : cats) {
    std::snprintf(line, sizeof line, "%-22s %11.1f%% %11.1f%%\n", std::string(to_string(c)).c_str(),
                  100.0 * report.overall.fraction(c), 100.0 * report.busy.fraction(c));
    out += line;
  }
  std::snprintf(line, sizeof line, "%-22s %12zu %12zu\n", "servers", report.overall.servers,
                report.busy.servers);
  out += line;
  std::snprintf(line, sizeof line, "%-22s %12zu\n", "excluded", report.excluded.size());
  out += line;
  return out;
}

}  // namespace llsched

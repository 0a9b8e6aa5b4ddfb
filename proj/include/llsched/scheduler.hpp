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

#ifndef LLSCHED_SCHEDULER_HPP_
#define LLSCHED_SCHEDULER_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llsched/forecast.hpp"
#include "llsched/lowload.hpp"

namespace llsched {

enum class ScheduleSource { Predicted, Default };

std::string_view to_string(ScheduleSource s);

struct BackupSchedule {
  std::string server_id;
  Day backup_day;
  Window window;
  ScheduleSource source = ScheduleSource::Default;
  /// Mean predicted load in the window; set for Predicted schedules only.
  std::optional<double> expected_avg_load;

  Minute start_minute() const { return window.start_minute(backup_day); }
};

struct DueEntry {
  Day backup_day;
  BackupDuration duration;
};

/// Servers due for a full backup, at most one entry per server.
using FleetDueList = std::map<std::string, DueEntry>;

/// A server's default backup window on its backup day. Windows running past
/// midnight are cut at the end of the day.
struct DefaultWindow {
  Day day;
  Window window;
};

DefaultWindow default_window(const LoadSeries& series);

/// Due list of every series, due on the day of its default backup start.
FleetDueList due_from_defaults(std::span<const LoadSeries> fleet,
                               BackupDuration duration = BackupDuration(60));

struct SchedulingError {
  std::string server_id;
  std::string message;
};

struct ScheduleOutcome {
  std::vector<BackupSchedule> schedules;  // sorted by server_id
  std::vector<SchedulingError> errors;    // sorted by server_id
};

/// Predicted schedule at the lowest-load window of the forecast when the server
/// is predictable over the 21 days before its backup day and the forecast for
/// that day is evaluable; otherwise the default window. A due server with
/// neither becomes a SchedulingError.
ScheduleOutcome schedule_backups(const FleetDueList& due,
                                 const std::map<std::string, ForecastResult>& forecasts,
                                 const std::map<std::string, std::vector<PredictabilityRecord>>& history,
                                 const std::map<std::string, DefaultWindow>& defaults,
                                 double min_coverage = kDefaultMinCoverage);

/// One due server's decision; the building block of schedule_backups.
/// Returns nullopt when the server has neither a usable forecast nor a default.
std::optional<BackupSchedule> schedule_one(const std::string& server_id, const DueEntry& entry,
                                           const ForecastResult* forecast,
                                           std::span<const PredictabilityRecord> history,
                                           const DefaultWindow* fallback,
                                           double min_coverage = kDefaultMinCoverage);

// -- impact accounting -------------------------------------------------------------

inline constexpr double kDefaultBusyThreshold = 60.0;

enum class ImpactCategory { MovedAndBetter, DefaultAlreadyGood, PredictedWorse };

std::string_view to_string(ImpactCategory c);

struct ServerImpact {
  std::string server_id;
  ImpactCategory category;
  double default_avg;  ///< true mean load in the default window
  double chosen_avg;   ///< true mean load in the scheduled window
  double peak;         ///< highest true load that day
};

struct ImpactBreakdown {
  std::size_t servers = 0;
  std::size_t moved_and_better = 0;
  std::size_t default_already_good = 0;
  std::size_t predicted_worse = 0;

  void add(ImpactCategory c);
  double fraction(ImpactCategory c) const;
};

struct ImpactReport {
  double busy_threshold = kDefaultBusyThreshold;
  ImpactBreakdown overall;
  ImpactBreakdown busy;  ///< servers whose peak true load exceeds busy_threshold
  std::vector<ServerImpact> servers;
  std::vector<std::string> excluded;  ///< no usable actuals for the scheduled day
};

/// Compares the true mean load of each scheduled window with the default window
/// on the actual backup day. A move is better (or worse) only when the means
/// differ by more than `bound.over`.
ImpactReport impact_report(std::span<const BackupSchedule> schedules,
                           const std::map<std::string, DaySlice>& actuals,
                           const std::map<std::string, DefaultWindow>& defaults,
                           double busy_threshold = kDefaultBusyThreshold,
                           const ErrorBound& bound = {});

/// Plain-text table of an impact report.
std::string format_impact_table(const ImpactReport& report);

}  // namespace llsched

#endif  // LLSCHED_SCHEDULER_HPP_

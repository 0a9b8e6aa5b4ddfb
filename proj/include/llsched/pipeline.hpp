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

#ifndef LLSCHED_PIPELINE_HPP_
#define LLSCHED_PIPELINE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llsched/forecast.hpp"
#include "llsched/lowload.hpp"
#include "llsched/scheduler.hpp"

namespace llsched {

inline constexpr const char* kVersion = "0.3.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  ForecasterSpec forecaster;
  ErrorBound bound;
  BackupDuration backup{60};
  double min_coverage = kDefaultMinCoverage;
  int parallelism = 1;
  std::string region = "default";
  int interval_days = kDefaultIntervalDays;

  /// Throws ConfigError; creates `out_dir` and checks it is writable.
  void check() const;
};

struct StageRecord {
  std::string name;
  std::string started_at;
  std::string finished_at;
  bool ok = true;
  std::string error;
  std::vector<std::pair<std::string, std::size_t>> counts;
};

struct RunManifest {
  std::string run_id;
  std::filesystem::path run_dir;
  std::string region;
  std::string input_digest;  ///< SHA-256 of the input file
  std::string forecaster;    ///< forecaster name and tool version
  int parallelism = 1;
  std::vector<StageRecord> stages;  ///< execution order; stops at the first failure
  std::vector<std::string> failures;
  int exit_code = kExitOk;

  const StageRecord* stage(std::string_view name) const;
  std::size_t count(std::string_view stage, std::string_view key) const;
};

/// Weekly run: validate, parse, classify, forecast, evaluate, schedule, summarize.
/// Each server is due on the day of its default backup start. Artifacts go to
/// `<out_dir>/<run_id>/` as they are produced; `<out_dir>/LATEST` names the run.
/// Artifacts other than manifest.json do not depend on `parallelism`.
RunManifest run(const PipelineConfig& config);

/// Server-level work unit, exposed for tests.
struct ServerOutcome {
  Classification classification;
  std::optional<ForecastResult> forecast;
  std::string forecast_error;
  std::vector<PredictabilityRecord> records;
  bool long_lived = false;
  bool predictable = false;
  std::optional<BackupSchedule> schedule;
};

ServerOutcome process_server(const LoadSeries& series, const PipelineConfig& config);

struct MetricsSummary {
  double pct_windows_correct = 0.0;
  double pct_windows_accurate = 0.0;
  double pct_predictable = 0.0;
  std::size_t evaluated_windows = 0;
  std::size_t long_lived_servers = 0;
  std::size_t predictable_servers = 0;
};

struct RunReport {
  std::string run_id;
  MetricsSummary metrics;
  std::map<std::string, std::size_t> class_counts;  ///< includes "Unclassifiable"
  std::size_t servers = 0;
  std::optional<ImpactReport> impact;
  std::string text;  ///< human-readable summary
};

/// Summarizes a completed run (the latest unless `run_id` is given). With
/// `actuals`, also compares scheduled windows against default windows on the
/// true load of each backup day. Writes report.json next to the run artifacts.
RunReport report(const std::filesystem::path& out_dir,
                 const std::optional<std::filesystem::path>& actuals = std::nullopt,
                 double busy_threshold = kDefaultBusyThreshold,
                 const std::optional<std::string>& run_id = std::nullopt);

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

}  // namespace llsched

#endif  // LLSCHED_PIPELINE_HPP_

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

#ifndef LLSCHED_FORECAST_HPP_
#define LLSCHED_FORECAST_HPP_

#include <memory>
#include <string>
#include <string_view>

#include "llsched/telemetry.hpp"

namespace llsched {

enum class ForecasterKind {
  PersistentPrevDay,       ///< replay day d - 1
  PersistentPrevEquivDay,  ///< replay day d - 7
  PrevWeekAverage,         ///< flat at the mean of days d - 7 .. d - 1
  SeasonalNaive,           ///< slot-wise mean of d - p, d - 2p, ...
};

/// Forecaster selection plus its parameters. Validated on construction.
class ForecasterSpec {
 public:
  ForecasterSpec() = default;
  explicit ForecasterSpec(ForecasterKind kind);
  /// SeasonalNaive: `period_days` >= 1; `max_seasons` = 0 uses all available history.
  static ForecasterSpec seasonal_naive(int period_days, int max_seasons = 0);

  /// Parses "prev-day", "prev-equiv-day", "prev-week-avg", "seasonal-naive[:P[:S]]".
  static ForecasterSpec parse(std::string_view text);
  /// Inverse of parse().
  std::string name() const;

  ForecasterKind kind() const { return kind_; }
  int period_days() const { return period_days_; }
  int max_seasons() const { return max_seasons_; }

  friend bool operator==(const ForecasterSpec&, const ForecasterSpec&) = default;

 private:
  ForecasterKind kind_ = ForecasterKind::PersistentPrevDay;
  int period_days_ = 7;
  int max_seasons_ = 0;
};

/// Days of history the forecaster needs before its target day.
int required_history(const ForecasterSpec& spec);

struct ForecastResult {
  std::string server_id;
  Day target_day;
  DaySlice predicted;
  ForecasterSpec forecaster;
  DateRange history_span;
};

/// Predicts `target_day` from samples strictly before it. Every lookback day the
/// forecaster needs must hold at least one sample, otherwise InsufficientHistory
/// lists the empty days. Absent source slots stay absent.
ForecastResult forecast(const ForecasterSpec& spec, const LoadSeries& series, Day target_day);

/// Extension point for forecasters not built into ForecasterSpec.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string name() const = 0;
  virtual int required_history() const = 0;
  virtual ForecastResult forecast(const LoadSeries& series, Day target_day) const = 0;
};

/// Adapts a built-in spec to the Forecaster interface.
std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec& spec);

}  // namespace llsched

#endif  // LLSCHED_FORECAST_HPP_

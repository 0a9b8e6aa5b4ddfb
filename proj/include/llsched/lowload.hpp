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

#ifndef LLSCHED_LOWLOAD_HPP_
#define LLSCHED_LOWLOAD_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "llsched/classify.hpp"

namespace llsched {

/// Contiguous slot interval [start_slot, start_slot + length_slots) within one day.
struct Window {
  int start_slot = 0;
  int length_slots = 1;

  Window() = default;
  /// Throws std::invalid_argument unless the window is non-empty and fits in the day.
  Window(int start, int length);

  int end_slot() const { return start_slot + length_slots; }
  int start_minute_of_day() const { return start_slot * kSlotMinutes; }
  Minute start_minute(Day d) const { return d.start_minute() + start_minute_of_day(); }
  int minutes() const { return length_slots * kSlotMinutes; }

  friend bool operator==(const Window&, const Window&) = default;
};

/// Expected full-backup duration: a multiple of 5 minutes in [5, 1440].
class BackupDuration {
 public:
  explicit BackupDuration(int minutes = 60);
  int minutes() const { return minutes_; }
  int slots() const { return minutes_ / kSlotMinutes; }

  friend bool operator==(const BackupDuration&, const BackupDuration&) = default;

 private:
  int minutes_;
};

/// Window means closer than this are treated as ties (earliest start wins).
inline constexpr double kWindowTieTolerance = 1e-9;

/// Lowest-mean window of `length` slots over a slot vector with NaN for absent
/// slots. Windows without any present slot are skipped. Slides one slot at a time.
template <class D>
Window lowest_window(const Eigen::ArrayBase<D>& values, int length) {
  const auto n = static_cast<int>(values.size());
  if (length < 1 || length > n) throw std::invalid_argument("window length outside the day");
  Eigen::ArrayXd sum(n + 1), count(n + 1);
  sum[0] = count[0] = 0.0;
  for (int k = 0; k < n; ++k) {
    const bool here = !std::isnan(values[k]);
    sum[k + 1] = sum[k] + (here ? values[k] : 0.0);
    count[k + 1] = count[k] + (here ? 1.0 : 0.0);
  }
  const int candidates = n - length + 1;
  const Eigen::ArrayXd window_count = count.segment(length, candidates) - count.head(candidates);
  const Eigen::ArrayXd mean =
      (sum.segment(length, candidates) - sum.head(candidates)) / window_count;

  int best = -1;
  for (int s = 0; s < candidates; ++s) {
    if (window_count[s] == 0.0) continue;
    if (best < 0 || mean[s] < mean[best] - kWindowTieTolerance) best = s;
  }
  if (best < 0) throw NotEvaluable("no window with a present slot");
  return Window(best, length);
}

/// Lowest-load window of duration `b`. Throws NotEvaluable below `min_coverage`.
Window ll_window(const DaySlice& day, BackupDuration b, double min_coverage = kDefaultMinCoverage);

/// Mean of present slot values in `w`. Throws UndefinedMetric when all are absent.
double window_avg(const DaySlice& day, const Window& w);

struct WindowVerdict {
  bool correct = false;
  Window predicted_window;
  Window true_window;
  /// Mean true load in the predicted window minus that in the true window (>= 0).
  double gap = 0.0;
};

/// The predicted window is chosen correctly when its mean true load exceeds the
/// true window's by at most `bound.over`.
WindowVerdict ll_window_correct(const DaySlice& predicted_day, const DaySlice& actual_day,
                                BackupDuration b, const ErrorBound& bound = {},
                                double min_coverage = kDefaultMinCoverage);

struct WindowAccuracy {
  bool accurate = false;
  double ratio = 0.0;
};

/// Bucket ratio restricted to the slots of `w`.
WindowAccuracy load_accurate_in_window(const DaySlice& predicted_day, const DaySlice& actual_day,
                                       const Window& w, const ErrorBound& bound = {});

/// Per server-day outcome of low-load prediction.
struct PredictabilityRecord {
  std::string server_id;
  Day day;
  bool evaluable = false;
  bool ll_window_correct = false;
  bool load_accurate = false;
  Window predicted_window;
  Window true_window;
  double bucket_ratio_in_window = 0.0;
  double window_gap = 0.0;
  // Whole-day error metrics over co-present slots; empty when undefined.
  std::optional<double> mean_nrmse;
  std::optional<double> mase;
  /// Why the day was not evaluated.
  std::string reason;

  bool both_true() const { return evaluable && ll_window_correct && load_accurate; }
};

/// Window correctness plus in-window accuracy, measured on the predicted window.
/// Days that cannot be evaluated yield a record with evaluable = false.
PredictabilityRecord evaluate_server_day(const DaySlice& predicted_day,
                                         const DaySlice& actual_day, BackupDuration b,
                                         const ErrorBound& bound = {},
                                         double min_coverage = kDefaultMinCoverage);

PredictabilityRecord non_evaluable_record(std::string server_id, Day day, std::string reason);

inline constexpr int kPredictabilityDays = 21;

/// True iff each of the 21 days before `as_of` has a record, and every one of
/// them is evaluable with a correct window and accurate in-window load.
bool is_predictable(std::span<const PredictabilityRecord> records, Day as_of);
/// As above with `as_of` the day after the latest record.
bool is_predictable(std::span<const PredictabilityRecord> records);

// -- error metrics -------------------------------------------------------------

struct ErrorMetrics {
  double mean_nrmse = 0.0;
  double mase = 0.0;
};

/// sqrt(mean(error^2)) / mean(actual), with error = forecast - actual.
template <class F, class A>
double mean_nrmse(const Eigen::ArrayBase<F>& forecast, const Eigen::ArrayBase<A>& actual) {
  if (forecast.size() != actual.size() || actual.size() < 1) {
    throw std::invalid_argument("mean_nrmse: sequences must have equal, non-zero length");
  }
  const double scale = actual.mean();
  if (scale == 0.0) throw UndefinedMetric("mean_nrmse: mean of actual is zero");
  return std::sqrt((forecast - actual).square().mean()) / scale;
}

/// mean(|error|) / mean(|actual[i] - actual[i-1]|).
template <class F, class A>
double mase(const Eigen::ArrayBase<F>& forecast, const Eigen::ArrayBase<A>& actual) {
  const Eigen::Index n = actual.size();
  if (forecast.size() != n || n < 2) {
    throw std::invalid_argument("mase: sequences must have equal length of at least 2");
  }
  const double naive = (actual.tail(n - 1) - actual.head(n - 1)).abs().mean();
  if (naive == 0.0) throw UndefinedMetric("mase: actual is constant");
  return (forecast - actual).abs().mean() / naive;
}

inline double mean_nrmse(std::span<const double> forecast, std::span<const double> actual) {
  using Map = Eigen::Map<const Eigen::ArrayXd>;
  return mean_nrmse(Map(forecast.data(), static_cast<Eigen::Index>(forecast.size())),
                    Map(actual.data(), static_cast<Eigen::Index>(actual.size())));
}

inline double mase(std::span<const double> forecast, std::span<const double> actual) {
  using Map = Eigen::Map<const Eigen::ArrayXd>;
  return mase(Map(forecast.data(), static_cast<Eigen::Index>(forecast.size())),
              Map(actual.data(), static_cast<Eigen::Index>(actual.size())));
}

}  // namespace llsched

#endif  // LLSCHED_LOWLOAD_HPP_

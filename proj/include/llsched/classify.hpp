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

#ifndef LLSCHED_CLASSIFY_HPP_
#define LLSCHED_CLASSIFY_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llsched/telemetry.hpp"

namespace llsched {

/// Asymmetric tolerance, in absolute CPU percentage points, on predicted − actual.
/// Both endpoints are inclusive.
struct ErrorBound {
  double over = 10.0;
  double under = -5.0;

  ErrorBound() = default;
  /// Throws ConfigError unless over >= 0 >= under.
  ErrorBound(double over_pts, double under_pts);

  bool contains(double deviation) const { return under <= deviation && deviation <= over; }

  /// Parses "+10:-5".
  static ErrorBound parse(std::string_view text);
  std::string str() const;
};

/// Bucket ratio at or above this is an accurate prediction.
inline constexpr double kAccuracyThreshold = 90.0;
/// A server is long-lived once it has existed more than this many days.
inline constexpr int kLongLivedDays = 21;
/// Default interval over which stability and patterns are judged.
inline constexpr int kDefaultIntervalDays = 7;

/// Percentage of co-present slots whose deviation predicted − actual lies within
/// `bound`. Absent slots are NaN and are left out of both counts. Throws
/// UndefinedMetric when no slot is present in both.
template <class P, class A>
double bucket_ratio(const Eigen::ArrayBase<P>& predicted, const Eigen::ArrayBase<A>& actual,
                    const ErrorBound& bound = {}) {
  const auto both = (predicted.isNaN() || actual.isNaN()) == false;
  const auto dev = predicted - actual;
  const Eigen::Index total = both.count();
  if (total == 0) throw UndefinedMetric("bucket ratio: no co-present slots");
  const Eigen::Index hits = (both && dev >= bound.under && dev <= bound.over).count();
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

inline double bucket_ratio(const DaySlice& predicted, const DaySlice& actual,
                           const ErrorBound& bound = {}) {
  return bucket_ratio(predicted.values, actual.values, bound);
}

inline bool is_accurate(double ratio) { return ratio >= kAccuracyThreshold; }

inline bool is_accurate(const DaySlice& predicted, const DaySlice& actual,
                        const ErrorBound& bound = {}) {
  return is_accurate(bucket_ratio(predicted, actual, bound));
}

enum class Lifespan { ShortLived, LongLived };

/// LongLived iff the series' first sample is more than 21 days before `as_of`.
Lifespan lifespan_class(const LoadSeries& series, Day as_of);

// Reference predictors. Each returns one bucket ratio per day of `interval` and
// throws NotEvaluable when a needed day falls below `min_coverage`.

/// Constant prediction at the mean of all present samples in the interval.
std::vector<double> stable_ratios(const LoadSeries& series, DateRange interval,
                                  const ErrorBound& bound = {},
                                  double min_coverage = kDefaultMinCoverage);
/// Day d predicted by day d - 1.
std::vector<double> daily_ratios(const LoadSeries& series, DateRange interval,
                                 const ErrorBound& bound = {},
                                 double min_coverage = kDefaultMinCoverage);
/// Day d predicted by day d - 7.
std::vector<double> weekly_ratios(const LoadSeries& series, DateRange interval,
                                  const ErrorBound& bound = {},
                                  double min_coverage = kDefaultMinCoverage);

bool is_stable(const LoadSeries& series, DateRange interval, const ErrorBound& bound = {},
               double min_coverage = kDefaultMinCoverage);
bool has_daily_pattern(const LoadSeries& series, DateRange interval, const ErrorBound& bound = {},
                       double min_coverage = kDefaultMinCoverage);
/// True iff there is no daily pattern and every day is predicted by its previous
/// equivalent weekday.
bool has_weekly_pattern(const LoadSeries& series, DateRange interval,
                        const ErrorBound& bound = {}, double min_coverage = kDefaultMinCoverage);

enum class ServerClass { ShortLived, Stable, DailyPattern, WeeklyPattern, NoPattern };

inline constexpr ServerClass kAllClasses[] = {ServerClass::ShortLived, ServerClass::Stable,
                                              ServerClass::DailyPattern,
                                              ServerClass::WeeklyPattern, ServerClass::NoPattern};

std::string_view to_string(ServerClass c);
std::optional<ServerClass> server_class_from_string(std::string_view text);

struct Classification {
  std::string server_id;
  DateRange interval;
  /// Empty when the server could not be classified over the interval.
  std::optional<ServerClass> server_class;
  std::string unclassifiable_reason;
  // Lowest per-day bucket ratio of each reference predictor that was evaluated.
  std::optional<double> stable_min_ratio;
  std::optional<double> daily_min_ratio;
  std::optional<double> weekly_min_ratio;

  bool classifiable() const { return server_class.has_value(); }
};

/// First match wins: ShortLived, Stable, DailyPattern, WeeklyPattern, NoPattern.
/// Lifespan is judged as of the day after the interval. A needed day that is not
/// evaluable leaves the server unclassifiable, which is distinct from NoPattern.
Classification classify_server(const LoadSeries& series, DateRange interval,
                               const ErrorBound& bound = {},
                               double min_coverage = kDefaultMinCoverage);

enum class VariationMeasure {
  Range,    ///< max - min
  MaxStep,  ///< largest absolute change between consecutive samples
};

/// Stable when the variation of the samples in the last three days ending at
/// `as_of` (inclusive) does not exceed the population standard deviation of all
/// samples up to and including `as_of`. Throws NotEvaluable with fewer than three
/// days of samples.
bool stable_by_stddev(const LoadSeries& series, Day as_of,
                      VariationMeasure measure = VariationMeasure::Range);

}  // namespace llsched

#endif  // LLSCHED_CLASSIFY_HPP_

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

#include "llsched/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace llsched {

ErrorBound::ErrorBound(double over_pts, double under_pts) : over(over_pts), under(under_pts) {
  if (!(over >= 0.0) || !(under <= 0.0)) {
    throw ConfigError("error bound requires over >= 0 and under <= 0, got " + str());
  }
}

ErrorBound ErrorBound::parse(std::string_view text) {
  const auto colon = text.find(':');
  auto number = [&](std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
      throw ConfigError("invalid error bound '" + std::string(text) + "', expected e.g. +10:-5");
    }
    return v;
  };
  if (colon == std::string_view::npos) {
    throw ConfigError("invalid error bound '" + std::string(text) + "', expected e.g. +10:-5");
  }
  return ErrorBound(number(text.substr(0, colon)), number(text.substr(colon + 1)));
}

std::string ErrorBound::str() const {
  auto fmt = [](double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
  };
  return (over >= 0.0 ? "+" : "") + fmt(over) + ":" + fmt(under);
}

Lifespan lifespan_class(const LoadSeries& series, Day as_of) {
  if (series.samples.empty()) throw std::invalid_argument("lifespan of an empty series");
  return as_of - series.first_day() > kLongLivedDays ? Lifespan::LongLived : Lifespan::ShortLived;
}

std::vector<double> stable_ratios(const LoadSeries& series, DateRange interval,
                                  const ErrorBound& bound, double min_coverage) {
  std::vector<DaySlice> days;
  days.reserve(static_cast<std::size_t>(interval.size()));
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Day d = interval.first; d <= interval.last; ++d) {
    days.push_back(evaluable_slice(series, d, min_coverage));
    const auto& v = days.back().values;
    sum += v.isNaN().select(0.0, v).sum();
    count += days.back().present_count();
  }
  const SlotArray mean = SlotArray::Constant(sum / static_cast<double>(count));
  std::vector<double> ratios;
  ratios.reserve(days.size());
  for (const DaySlice& day : days) ratios.push_back(bucket_ratio(mean, day.values, bound));
  return ratios;
}

namespace {

std::vector<double> lagged_ratios(const LoadSeries& series, DateRange interval, int lag,
                                  const ErrorBound& bound, double min_coverage) {
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(interval.size()));
  for (Day d = interval.first; d <= interval.last; ++d) {
    const DaySlice reference = evaluable_slice(series, d - lag, min_coverage);
    const DaySlice actual = evaluable_slice(series, d, min_coverage);
    ratios.push_back(bucket_ratio(reference, actual, bound));
  }
  return ratios;
}

bool all_accurate(const std::vector<double>& ratios) {
  return std::all_of(ratios.begin(), ratios.end(), [](double r) { return is_accurate(r); });
}

double lowest(const std::vector<double>& ratios) {
  return *std::min_element(ratios.begin(), ratios.end());
}

}  // namespace

std::vector<double> daily_ratios(const LoadSeries& series, DateRange interval,
                                 const ErrorBound& bound, double min_coverage) {
  return lagged_ratios(series, interval, 1, bound, min_coverage);
}

std::vector<double> weekly_ratios(const LoadSeries& series, DateRange interval,
                                  const ErrorBound& bound, double min_coverage) {
  return lagged_ratios(series, interval, 7, bound, min_coverage);
}

bool is_stable(const LoadSeries& series, DateRange interval, const ErrorBound& bound,
               double min_coverage) {
  return all_accurate(stable_ratios(series, interval, bound, min_coverage));
}

bool has_daily_pattern(const LoadSeries& series, DateRange interval, const ErrorBound& bound,
                       double min_coverage) {
  return all_accurate(daily_ratios(series, interval, bound, min_coverage));
}

bool has_weekly_pattern(const LoadSeries& series, DateRange interval, const ErrorBound& bound,
                        double min_coverage) {
  return !has_daily_pattern(series, interval, bound, min_coverage) &&
         all_accurate(weekly_ratios(series, interval, bound, min_coverage));
}

Classification classify_server(const LoadSeries& series, DateRange interval,
                               const ErrorBound& bound, double min_coverage) {
  Classification out;
  out.server_id = series.server_id;
  out.interval = interval;
  if (series.samples.empty()) {
    out.unclassifiable_reason = "no samples";
    return out;
  }
  if (lifespan_class(series, interval.last + 1) == Lifespan::ShortLived) {
    out.server_class = ServerClass::ShortLived;
    return out;
  }
  try {
    const auto stable = stable_ratios(series, interval, bound, min_coverage);
    out.stable_min_ratio = lowest(stable);
    if (all_accurate(stable)) {
      out.server_class = ServerClass::Stable;
      return out;
    }
    const auto daily = daily_ratios(series, interval, bound, min_coverage);
    out.daily_min_ratio = lowest(daily);
    if (all_accurate(daily)) {
      out.server_class = ServerClass::DailyPattern;
      return out;
    }
    const auto weekly = weekly_ratios(series, interval, bound, min_coverage);
    out.weekly_min_ratio = lowest(weekly);
    out.server_class = all_accurate(weekly) ? ServerClass::WeeklyPattern : ServerClass::NoPattern;
  } catch (const Error& e) {
    // NotEvaluable, or UndefinedMetric from a day pair with no overlap
    out.unclassifiable_reason = e.what();
  }
  return out;
}

std::string_view to_string(ServerClass c) {
  switch (c) {
    case ServerClass::ShortLived: return "ShortLived";
    case ServerClass::Stable: return "Stable";
    case ServerClass::DailyPattern: return "DailyPattern";
    case ServerClass::WeeklyPattern: return "WeeklyPattern";
    case ServerClass::NoPattern: return "NoPattern";
  }
  return "Unknown";
}

std::optional<ServerClass> server_class_from_string(std::string_view text) {
  for (ServerClass c : kAllClasses) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool stable_by_stddev(const LoadSeries& series, Day as_of, VariationMeasure measure) {
  const auto period = series.between(std::numeric_limits<Minute>::min(), (as_of + 1).start_minute());
  const auto recent = series.between((as_of - 2).start_minute(), (as_of + 1).start_minute());
  if (period.empty() || series.first_day() > as_of - 2 || series.on(as_of).empty()) {
    throw NotEvaluable("server '" + series.server_id + "': fewer than three days of samples ending " +
                       as_of.iso());
  }

  double mean = 0.0;
  for (const LoadSample& s : period) mean += s.cpu_pct;
  mean /= static_cast<double>(period.size());
  double var = 0.0;
  for (const LoadSample& s : period) var += (s.cpu_pct - mean) * (s.cpu_pct - mean);
  const double stddev = std::sqrt(var / static_cast<double>(period.size()));

  double variation = 0.0;
  if (measure == VariationMeasure::Range) {
    const auto [lo, hi] = std::minmax_element(
        recent.begin(), recent.end(),
        [](const LoadSample& a, const LoadSample& b) { return a.cpu_pct < b.cpu_pct; });
    variation = hi->cpu_pct - lo->cpu_pct;
  } else {
    for (std::size_t i = 1; i < recent.size(); ++i) {
      variation = std::max(variation, std::abs(recent[i].cpu_pct - recent[i - 1].cpu_pct));
    }
  }
  return variation <= stddev;
}

}  // namespace llsched

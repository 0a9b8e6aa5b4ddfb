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

#include "llsched/forecast.hpp"

#include <charconv>
#include <vector>

namespace llsched {

ForecasterSpec::ForecasterSpec(ForecasterKind kind) : kind_(kind) {}

ForecasterSpec ForecasterSpec::seasonal_naive(int period_days, int max_seasons) {
  if (period_days < 1) throw ConfigError("seasonal-naive period must be at least 1 day");
  if (max_seasons < 0) throw ConfigError("seasonal-naive season count must be >= 0");
  ForecasterSpec spec(ForecasterKind::SeasonalNaive);
  spec.period_days_ = period_days;
  spec.max_seasons_ = max_seasons;
  return spec;
}

ForecasterSpec ForecasterSpec::parse(std::string_view text) {
  if (text == "prev-day") return ForecasterSpec(ForecasterKind::PersistentPrevDay);
  if (text == "prev-equiv-day") return ForecasterSpec(ForecasterKind::PersistentPrevEquivDay);
  if (text == "prev-week-avg") return ForecasterSpec(ForecasterKind::PrevWeekAverage);

  constexpr std::string_view kSeasonal = "seasonal-naive";
  if (text.substr(0, kSeasonal.size()) == kSeasonal) {
    std::string_view rest = text.substr(kSeasonal.size());
    int params[2] = {7, 0};
    for (int& p : params) {
      if (rest.empty()) break;
      if (rest.front() != ':') throw ConfigError("invalid forecaster '" + std::string(text) + "'");
      rest.remove_prefix(1);
      const auto end = rest.find(':');
      const std::string_view field = rest.substr(0, end);
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), p);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ConfigError("invalid forecaster '" + std::string(text) + "'");
      }
      rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    }
    if (!rest.empty()) throw ConfigError("invalid forecaster '" + std::string(text) + "'");
    return seasonal_naive(params[0], params[1]);
  }
  throw ConfigError("unknown forecaster '" + std::string(text) +
                    "' (prev-day, prev-equiv-day, prev-week-avg, seasonal-naive[:P[:S]])");
}

std::string ForecasterSpec::name() const {
  switch (kind_) {
    case ForecasterKind::PersistentPrevDay: return "prev-day";
    case ForecasterKind::PersistentPrevEquivDay: return "prev-equiv-day";
    case ForecasterKind::PrevWeekAverage: return "prev-week-avg";
    case ForecasterKind::SeasonalNaive:
      return "seasonal-naive:" + std::to_string(period_days_) + ":" + std::to_string(max_seasons_);
  }
  return "unknown";
}

int required_history(const ForecasterSpec& spec) {
  switch (spec.kind()) {
    case ForecasterKind::PersistentPrevDay: return 1;
    case ForecasterKind::PersistentPrevEquivDay: return 7;
    case ForecasterKind::PrevWeekAverage: return 7;
    case ForecasterKind::SeasonalNaive: return spec.period_days();
  }
  return 0;
}

namespace {

void require_days(const LoadSeries& series, std::initializer_list<Day> days) {
  std::vector<Day> missing;
  for (Day d : days) {
    if (series.on(d).empty()) missing.push_back(d);
  }
  if (!missing.empty()) throw InsufficientHistory(series.server_id, std::move(missing));
}

/// Replays `source` onto `target`.
DaySlice replay(const LoadSeries& series, Day source, Day target) {
  DaySlice out = slice_day(series, source);
  out.day = target;
  return out;
}

}  // namespace

ForecastResult forecast(const ForecasterSpec& spec, const LoadSeries& series, Day target) {
  ForecastResult result;
  result.server_id = series.server_id;
  result.target_day = target;
  result.forecaster = spec;

  switch (spec.kind()) {
    case ForecasterKind::PersistentPrevDay:
      require_days(series, {target - 1});
      result.predicted = replay(series, target - 1, target);
      result.history_span = {target - 1, target - 1};
      break;

    case ForecasterKind::PersistentPrevEquivDay:
      require_days(series, {target - 7});
      result.predicted = replay(series, target - 7, target);
      result.history_span = {target - 7, target - 7};
      break;

    case ForecasterKind::PrevWeekAverage: {
      std::vector<Day> missing;
      for (Day d = target - 7; d < target; ++d) {
        if (series.on(d).empty()) missing.push_back(d);
      }
      if (!missing.empty()) throw InsufficientHistory(series.server_id, std::move(missing));
      const auto week = series.between((target - 7).start_minute(), target.start_minute());
      double sum = 0.0;
      for (const LoadSample& s : week) sum += s.cpu_pct;
      result.predicted = DaySlice(series.server_id, target,
                                  SlotArray::Constant(sum / static_cast<double>(week.size())));
      result.history_span = DateRange::ending_before(target, 7);
      break;
    }

    case ForecasterKind::SeasonalNaive: {
      const int period = spec.period_days();
      require_days(series, {target - period});
      SlotArray sum = SlotArray::Zero();
      SlotArray count = SlotArray::Zero();
      int seasons = 0;
      const Day first = series.first_day();
      for (Day d = target - period; d >= first; d = d - period) {
        if (spec.max_seasons() > 0 && seasons == spec.max_seasons()) break;
        const DaySlice s = slice_day(series, d);
        sum += s.values.isNaN().select(0.0, s.values);
        count += s.values.isNaN().select(0.0, SlotArray::Ones());
        ++seasons;
      }
      result.predicted = DaySlice(series.server_id, target);
      result.predicted.values = (count > 0.0).select(sum / count, kAbsent);
      result.history_span = {target - seasons * period, target - 1};
      break;
    }
  }
  return result;
}

namespace {

class BuiltinForecaster final : public Forecaster {
 public:
  explicit BuiltinForecaster(ForecasterSpec spec) : spec_(spec) {}
  std::string name() const override { return spec_.name(); }
  int required_history() const override { return llsched::required_history(spec_); }
  ForecastResult forecast(const LoadSeries& series, Day target_day) const override {
    return llsched::forecast(spec_, series, target_day);
  }

 private:
  ForecasterSpec spec_;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec& spec) {
  return std::make_unique<BuiltinForecaster>(spec);
}

}  // namespace llsched

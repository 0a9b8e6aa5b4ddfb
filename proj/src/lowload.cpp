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

#include "llsched/lowload.hpp"

#include <algorithm>
#include <vector>

namespace llsched {

Window::Window(int start, int length) : start_slot(start), length_slots(length) {
  if (start < 0 || length < 1 || start + length > kSlotsPerDay) {
    throw std::invalid_argument("window [" + std::to_string(start) + ", +" +
                                std::to_string(length) + ") does not fit in a day");
  }
}

BackupDuration::BackupDuration(int minutes) : minutes_(minutes) {
  if (minutes < kSlotMinutes || minutes > kMinutesPerDay || minutes % kSlotMinutes != 0) {
    throw ConfigError("backup duration must be a multiple of 5 minutes in [5, 1440], got " +
                      std::to_string(minutes));
  }
}

Window ll_window(const DaySlice& day, BackupDuration b, double min_coverage) {
  if (!is_evaluable(day, min_coverage)) {
    throw NotEvaluable("server '" + day.server_id + "' day " + day.day.iso() +
                       " not evaluable: coverage " + std::to_string(coverage(day)));
  }
  return lowest_window(day.values, b.slots());
}

double window_avg(const DaySlice& day, const Window& w) {
  const auto seg = day.values.segment(w.start_slot, w.length_slots);
  const Eigen::Index n = (seg.isNaN() == false).count();
  if (n == 0) throw UndefinedMetric("window average: every slot in the window is absent");
  return seg.isNaN().select(0.0, seg).sum() / static_cast<double>(n);
}

WindowVerdict ll_window_correct(const DaySlice& predicted_day, const DaySlice& actual_day,
                                BackupDuration b, const ErrorBound& bound, double min_coverage) {
  WindowVerdict v;
  v.predicted_window = ll_window(predicted_day, b, min_coverage);
  v.true_window = ll_window(actual_day, b, min_coverage);
  v.gap = window_avg(actual_day, v.predicted_window) - window_avg(actual_day, v.true_window);
  v.correct = v.gap <= bound.over;
  return v;
}

WindowAccuracy load_accurate_in_window(const DaySlice& predicted_day, const DaySlice& actual_day,
                                       const Window& w, const ErrorBound& bound) {
  WindowAccuracy a;
  a.ratio = bucket_ratio(predicted_day.values.segment(w.start_slot, w.length_slots),
                         actual_day.values.segment(w.start_slot, w.length_slots), bound);
  a.accurate = is_accurate(a.ratio);
  return a;
}

PredictabilityRecord non_evaluable_record(std::string server_id, Day day, std::string reason) {
  PredictabilityRecord r;
  r.server_id = std::move(server_id);
  r.day = day;
  r.reason = std::move(reason);
  return r;
}

namespace {

void attach_error_metrics(PredictabilityRecord& r, const DaySlice& predicted,
                          const DaySlice& actual) {
  const auto both = (predicted.values.isNaN() || actual.values.isNaN()) == false;
  std::vector<double> f, a;
  for (int k = 0; k < kSlotsPerDay; ++k) {
    if (!both[k]) continue;
    f.push_back(predicted.values[k]);
    a.push_back(actual.values[k]);
  }
  try {
    r.mean_nrmse = mean_nrmse(f, a);
  } catch (const std::exception&) {
  }
  try {
    r.mase = mase(f, a);
  } catch (const std::exception&) {
  }
}

}  // namespace

PredictabilityRecord evaluate_server_day(const DaySlice& predicted_day,
                                         const DaySlice& actual_day, BackupDuration b,
                                         const ErrorBound& bound, double min_coverage) {
  try {
    const WindowVerdict verdict =
        ll_window_correct(predicted_day, actual_day, b, bound, min_coverage);
    const WindowAccuracy acc =
        load_accurate_in_window(predicted_day, actual_day, verdict.predicted_window, bound);
    PredictabilityRecord r;
    r.server_id = actual_day.server_id;
    r.day = actual_day.day;
    r.evaluable = true;
    r.ll_window_correct = verdict.correct;
    r.load_accurate = acc.accurate;
    r.predicted_window = verdict.predicted_window;
    r.true_window = verdict.true_window;
    r.bucket_ratio_in_window = acc.ratio;
    r.window_gap = verdict.gap;
    attach_error_metrics(r, predicted_day, actual_day);
    return r;
  } catch (const Error& e) {
    return non_evaluable_record(actual_day.server_id, actual_day.day, e.what());
  }
}

bool is_predictable(std::span<const PredictabilityRecord> records, Day as_of) {
  const DateRange span = DateRange::ending_before(as_of, kPredictabilityDays);
  std::vector<bool> seen(kPredictabilityDays, false);
  for (const PredictabilityRecord& r : records) {
    if (!span.contains(r.day)) continue;
    if (!r.both_true()) return false;
    seen[static_cast<std::size_t>(r.day - span.first)] = true;
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

bool is_predictable(std::span<const PredictabilityRecord> records) {
  if (records.empty()) return false;
  const auto latest = std::max_element(
      records.begin(), records.end(),
      [](const PredictabilityRecord& a, const PredictabilityRecord& b) { return a.day < b.day; });
  return is_predictable(records, latest->day + 1);
}

}  // namespace llsched

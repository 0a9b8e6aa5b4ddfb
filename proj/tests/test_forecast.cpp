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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "llsched/classify.hpp"
#include "llsched/forecast.hpp"
#include "support.hpp"

using namespace llsched;
using support::kMonday;

namespace {

bool same_slots(const SlotArray& a, const SlotArray& b) {
  for (int k = 0; k < kSlotsPerDay; ++k) {
    if (std::isnan(a[k]) != std::isnan(b[k])) return false;
    if (!std::isnan(a[k]) && a[k] != b[k]) return false;
  }
  return true;
}

const ForecasterSpec kPrevDay{ForecasterKind::PersistentPrevDay};
const ForecasterSpec kPrevEquiv{ForecasterKind::PersistentPrevEquivDay};
const ForecasterSpec kWeekAvg{ForecasterKind::PrevWeekAverage};

}  // namespace

TEST_CASE("prev-day replay is exact when the day repeats") {
  std::mt19937_64 rng(1);
  const SlotArray day = support::random_slots(rng);
  const auto s = support::series_of("s", kMonday, {day, day});
  const ForecastResult f = forecast(kPrevDay, s, kMonday + 1);
  CHECK(bucket_ratio(f.predicted, slice_day(s, kMonday + 1)) == 100);
  CHECK(f.history_span == DateRange{kMonday, kMonday});
  CHECK(f.target_day == kMonday + 1);
}

TEST_CASE("prev-week-avg on a constant series") {
  const auto s = support::series_of("s", kMonday, support::days_of(7, [](int) { return support::constant(40); }));
  const ForecastResult f = forecast(kWeekAvg, s, kMonday + 7);
  CHECK((f.predicted.values == 40).all());
}

TEST_CASE("prev-week-avg is flat at the mean of the week") {
  const auto s = support::series_of("s", kMonday, support::days_of(7, [](int i) { return support::constant(10.0 * i); }));
  const ForecastResult f = forecast(kWeekAvg, s, kMonday + 7);
  CHECK((f.predicted.values - 30.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("prev-equiv-day reproduces a 7-periodic series") {
  std::mt19937_64 rng(2);
  std::vector<SlotArray> week;
  for (int i = 0; i < 7; ++i) week.push_back(support::random_slots(rng));
  const auto s = support::series_of("s", kMonday, support::days_of(21, [&](int i) { return week[i % 7]; }));
  for (Day d = kMonday + 7; d < kMonday + 21; ++d) {
    const ForecastResult f = forecast(kPrevEquiv, s, d);
    CHECK(same_slots(f.predicted.values, slice_day(s, d).values));
  }
}

TEST_CASE("seasonal naive averages the chosen seasons") {
  const auto s = support::series_of("s", kMonday, support::days_of(21, [](int i) { return support::constant(i < 7 ? 10 : i < 14 ? 20 : 60); }));
  CHECK((forecast(ForecasterSpec::seasonal_naive(7, 2), s, kMonday + 21).predicted.values == 40).all());
  CHECK((forecast(ForecasterSpec::seasonal_naive(7), s, kMonday + 21).predicted.values == 30).all());
  CHECK((forecast(ForecasterSpec::seasonal_naive(1, 1), s, kMonday + 21).predicted.values == 60).all());
  CHECK(forecast(ForecasterSpec::seasonal_naive(7), s, kMonday + 21).history_span ==
        DateRange{kMonday, kMonday + 20});
}

TEST_CASE("required_history") {
  CHECK(required_history(kPrevDay) == 1);
  CHECK(required_history(kPrevEquiv) == 7);
  CHECK(required_history(kWeekAvg) == 7);
  CHECK(required_history(ForecasterSpec::seasonal_naive(7)) == 7);
  CHECK(required_history(ForecasterSpec::seasonal_naive(3, 2)) == 3);
}

TEST_CASE("missing history names the empty days") {
  auto days = support::days_of(7, [](int) { return support::constant(30); });
  days[2].setConstant(kAbsent);
  days[4].setConstant(kAbsent);
  const auto s = support::series_of("s", kMonday, days);
  try {
    forecast(kWeekAvg, s, kMonday + 7);
    FAIL("expected InsufficientHistory");
  } catch (const InsufficientHistory& e) {
    CHECK(e.missing_days() == std::vector<Day>{kMonday + 2, kMonday + 4});
  }
  CHECK_THROWS_AS(forecast(kPrevDay, s, kMonday + 3), InsufficientHistory);
  CHECK_THROWS_AS(forecast(kPrevEquiv, s, kMonday + 6), InsufficientHistory);
}

TEST_CASE("spec parsing and names") {
  for (const char* text : {"prev-day", "prev-equiv-day", "prev-week-avg", "seasonal-naive:7:0", "seasonal-naive:3:2"}) {
    CHECK(ForecasterSpec::parse(text).name() == text);
  }
  CHECK(ForecasterSpec::parse("seasonal-naive") == ForecasterSpec::seasonal_naive(7));
  CHECK(ForecasterSpec::parse("seasonal-naive:14") == ForecasterSpec::seasonal_naive(14));
  CHECK_THROWS_AS(ForecasterSpec::parse("arima"), ConfigError);
  CHECK_THROWS_AS(ForecasterSpec::seasonal_naive(0), ConfigError);
  CHECK_THROWS_AS(ForecasterSpec::seasonal_naive(7, -1), ConfigError);
}

TEST_CASE("property: prev-day forecast equals the previous day's slice, gaps included") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = support::series_of("s", kMonday, support::days_of(4, [&](int) {
      return SlotArray(support::random_slots(rng, 0, 100, 0.2));
    }));
    for (Day d = kMonday + 1; d < kMonday + 4; ++d) {
      CHECK(same_slots(forecast(kPrevDay, s, d).predicted.values, slice_day(s, d - 1).values));
    }
  }
}

TEST_CASE("property: forecasts never look at the target day or later") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    auto days = support::days_of(16, [&](int) { return SlotArray(support::random_slots(rng)); });
    const auto before = support::series_of("s", kMonday, days);
    days[14] = support::random_slots(rng);
    days[15] = support::random_slots(rng);
    const auto after = support::series_of("s", kMonday, days);
    for (const ForecasterSpec& spec : {kPrevDay, kPrevEquiv, kWeekAvg, ForecasterSpec::seasonal_naive(7)}) {
      CHECK(same_slots(forecast(spec, before, kMonday + 14).predicted.values,
                       forecast(spec, after, kMonday + 14).predicted.values));
    }
  }
}

TEST_CASE("make_forecaster adapts the built-ins") {
  const auto s = support::series_of("s", kMonday, support::days_of(8, [](int i) { return support::constant(i); }));
  for (const ForecasterSpec& spec : {kPrevDay, kPrevEquiv, kWeekAvg}) {
    const auto f = make_forecaster(spec);
    CHECK(f->name() == spec.name());
    CHECK(f->required_history() == required_history(spec));
    CHECK(same_slots(f->forecast(s, kMonday + 8).predicted.values,
                     forecast(spec, s, kMonday + 8).predicted.values));
  }
}

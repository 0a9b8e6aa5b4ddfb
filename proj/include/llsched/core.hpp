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

#ifndef LLSCHED_CORE_HPP_
#define LLSCHED_CORE_HPP_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace llsched {

inline constexpr int kSlotMinutes = 5;
inline constexpr int kMinutesPerDay = 1440;
inline constexpr int kSlotsPerDay = kMinutesPerDay / kSlotMinutes;  // 288

/// Minutes since the Unix epoch (UTC).
using Minute = std::int64_t;

/// A UTC calendar day, stored as days since 1970-01-01.
struct Day {
  std::int32_t index = 0;

  constexpr Day() = default;
  constexpr explicit Day(std::int32_t i) : index(i) {}

  static constexpr Day containing(Minute m) {
    // floor division so pre-epoch minutes land on the right day
    Minute q = m / kMinutesPerDay;
    if (m % kMinutesPerDay < 0) --q;
    return Day(static_cast<std::int32_t>(q));
  }

  constexpr Minute start_minute() const { return Minute{index} * kMinutesPerDay; }

  /// 0 = Sunday ... 6 = Saturday.
  constexpr int weekday() const {
    int w = (index + 4) % 7;  // 1970-01-01 was a Thursday
    return w < 0 ? w + 7 : w;
  }

  /// ISO "YYYY-MM-DD".
  std::string iso() const;
  static Day parse_iso(std::string_view text);

  friend constexpr Day operator+(Day d, int n) { return Day(d.index + n); }
  friend constexpr Day operator-(Day d, int n) { return Day(d.index - n); }
  friend constexpr int operator-(Day a, Day b) { return a.index - b.index; }
  Day& operator++() {
    ++index;
    return *this;
  }
  friend constexpr auto operator<=>(Day, Day) = default;
};

/// Inclusive range of consecutive days.
struct DateRange {
  Day first;
  Day last;

  constexpr int size() const { return last - first + 1; }
  constexpr bool contains(Day d) const { return first <= d && d <= last; }

  /// The `n` days ending the day before `end`.
  static constexpr DateRange ending_before(Day end, int n) { return {end - n, end - 1}; }

  friend constexpr bool operator==(const DateRange&, const DateRange&) = default;
};

// Error hierarchy. Every failure raised by the library derives from Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `row` is the 1-based line number (header = 1), 0 when not row-specific.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// A day lacks enough telemetry to take part in evaluation.
class NotEvaluable : public Error {
 public:
  using Error::Error;
};

/// A ratio or metric whose denominator is empty or zero.
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  InsufficientHistory(std::string server_id, std::vector<Day> missing);
  const std::vector<Day>& missing_days() const { return missing_; }

 private:
  std::vector<Day> missing_;
};

/// Invalid configuration or argument value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace llsched

#endif  // LLSCHED_CORE_HPP_

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

// Shared builders and seeded generators for the test binaries.

#ifndef LLSCHED_TESTS_SUPPORT_HPP_
#define LLSCHED_TESTS_SUPPORT_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "llsched/telemetry.hpp"

namespace support {

using namespace llsched;

inline constexpr Day kMonday{18267};  // 2020-01-06

/// A series whose day `first + i` carries `days[i]`; NaN slots are skipped.
/// The default backup window opens at `backup_slot` on the day after the last one.
inline LoadSeries series_of(const std::string& id, Day first, const std::vector<SlotArray>& days,
                            int backup_slot = 24, int backup_slots = 12) {
  LoadSeries s;
  s.server_id = id;
  for (std::size_t i = 0; i < days.size(); ++i) {
    const Day d = first + static_cast<int>(i);
    for (int k = 0; k < kSlotsPerDay; ++k) {
      if (!std::isnan(days[i][k])) s.samples.push_back({d.start_minute() + k * kSlotMinutes, days[i][k]});
    }
  }
  const Day backup = first + static_cast<int>(days.size());
  s.default_backup_start = backup.start_minute() + backup_slot * kSlotMinutes;
  s.default_backup_end = s.default_backup_start + backup_slots * kSlotMinutes;
  return s;
}

/// `n` days produced by `day_fn(day_index)`.
inline std::vector<SlotArray> days_of(int n, const std::function<SlotArray(int)>& day_fn) {
  std::vector<SlotArray> out;
  for (int i = 0; i < n; ++i) out.push_back(day_fn(i));
  return out;
}

inline SlotArray constant(double v) { return SlotArray::Constant(v); }

inline DaySlice slice_of(const SlotArray& v, Day d = kMonday) { return DaySlice("s", d, v); }

/// Uniform load in [lo, hi] with a fraction of absent slots.
inline SlotArray random_slots(std::mt19937_64& rng, double lo = 0.0, double hi = 100.0,
                              double absent = 0.0) {
  std::uniform_real_distribution<double> value(lo, hi);
  std::bernoulli_distribution gone(absent);
  SlotArray a;
  for (int k = 0; k < kSlotsPerDay; ++k) a[k] = gone(rng) ? kAbsent : value(rng);
  return a;
}

/// Random slice with structure: a random walk, optional valley and sparse gaps.
inline SlotArray random_shaped(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SlotArray a;
  double level = 100.0 * u(rng);
  for (int k = 0; k < kSlotsPerDay; ++k) {
    level = std::clamp(level + 20.0 * (u(rng) - 0.5), 0.0, 100.0);
    a[k] = level;
  }
  if (u(rng) < 0.5) {
    const int start = static_cast<int>(u(rng) * 250);
    const int width = 1 + static_cast<int>(u(rng) * 36);
    for (int k = start; k < std::min(kSlotsPerDay, start + width); ++k) a[k] = u(rng) * 5.0;
  }
  if (u(rng) < 0.3) {
    for (int k = 0; k < kSlotsPerDay; ++k) {
      if (u(rng) < 0.05) a[k] = kAbsent;
    }
  }
  return a;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("llsched-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace support

#endif  // LLSCHED_TESTS_SUPPORT_HPP_

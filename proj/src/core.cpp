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

#include "llsched/core.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace llsched {

std::string Day::iso() const {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{index}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Day Day::parse_iso(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto field = [&](std::string_view s, auto& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !field(text.substr(0, 4), y) ||
      !field(text.substr(5, 2), m) || !field(text.substr(8, 2), d)) {
    throw ConfigError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw ConfigError("invalid date '" + std::string(text) + "'");
  return Day(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
}

ParseError::ParseError(std::size_t row, const std::string& what)
    : Error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

namespace {

std::string missing_message(const std::string& server_id, const std::vector<Day>& missing) {
  std::string msg = "insufficient history for server '" + server_id + "': missing";
  for (const Day& d : missing) msg += " " + d.iso();
  return msg;
}

}  // namespace

InsufficientHistory::InsufficientHistory(std::string server_id, std::vector<Day> missing)
    : Error(missing_message(server_id, missing)), missing_(std::move(missing)) {}

}  // namespace llsched

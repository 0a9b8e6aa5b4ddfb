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

#ifndef LLSCHED_SYNTHGEN_HPP_
#define LLSCHED_SYNTHGEN_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "llsched/classify.hpp"

namespace llsched {

/// Shape of the low-load valley shared by every patterned server.
struct ValleySpec {
  int width_minutes = 240;
  int start_minute = 120;   ///< nominal start, minutes after midnight
  int jitter_minutes = 120; ///< per-server start offset drawn from [-jitter, +jitter]
};

/// Synthetic fleet parameters. Servers run until the backup day, which is the day
/// after `weeks` full weeks starting at `start_day`.
struct FleetConfig {
  std::size_t server_count = 100;
  std::map<ServerClass, double> mix{{ServerClass::Stable, 1.0}};
  int weeks = 4;
  /// Peak-to-peak noise: each slot gets an offset uniform in [-noise/2, +noise/2].
  double noise = 3.0;
  ValleySpec valley;
  /// Fraction of the fleet whose default backup window sits on the daily peak.
  /// Drawn from daily- and weekly-pattern servers only.
  double peak_default_fraction = 0.0;
  int backup_minutes = 60;
  bool include_backup_day = true;
  std::uint64_t seed = 1;
  Day start_day = Day(18267);  // 2020-01-06, a Monday

  /// Throws ConfigError for invalid values or an impossible mix.
  void check() const;
  Day backup_day() const { return start_day + 7 * weeks; }
};

struct GeneratedServer {
  LoadSeries series;
  ServerClass label;
  bool default_on_peak = false;
};

struct GroundTruth {
  Day backup_day;
  std::map<std::string, ServerClass> labels;
  std::map<std::string, bool> default_on_peak;
};

/// Reproducible from `config.seed`; servers are named srv-00000, srv-00001, ...
std::vector<GeneratedServer> generate_fleet(const FleetConfig& config);

/// Streams the fleet as telemetry CSV without holding it in memory.
GroundTruth generate_fleet(const FleetConfig& config, std::ostream& csv);

GroundTruth ground_truth(const std::vector<GeneratedServer>& fleet, Day backup_day);

}  // namespace llsched

#endif  // LLSCHED_SYNTHGEN_HPP_

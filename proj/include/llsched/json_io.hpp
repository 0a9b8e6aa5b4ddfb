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

// JSON shapes of everything the pipeline persists. Key order is fixed so that
// identical values always serialize to identical bytes.

#ifndef LLSCHED_JSON_IO_HPP_
#define LLSCHED_JSON_IO_HPP_

#include <json.hpp>

#include "llsched/classify.hpp"
#include "llsched/forecast.hpp"
#include "llsched/lowload.hpp"
#include "llsched/scheduler.hpp"
#include "llsched/synthgen.hpp"
#include "llsched/telemetry.hpp"

namespace llsched {

using Json = nlohmann::ordered_json;

/// `{verdict, anomalies: [{kind, row, message}]}`
Json to_json(const ValidationReport& report);

Json to_json(const SchemaSpec& spec);
SchemaSpec schema_from_json(const Json& j);

/// `{server_id, interval_start, interval_end, class, bucket_ratio_stats}`
Json to_json(const Classification& c);

/// `{server_id, target_day, forecaster, history_start, history_end, predicted: [288 x number|null]}`
Json to_json(const ForecastResult& f);

Json to_json(const PredictabilityRecord& r);
PredictabilityRecord record_from_json(const Json& j);

/// `{server_id, backup_day, start_minute_utc, duration_min, source}`
Json to_json(const BackupSchedule& s);
BackupSchedule schedule_from_json(const Json& j);

Json to_json(const ImpactReport& report);

Json to_json(const FleetConfig& config);
/// Missing keys keep their defaults. Throws ConfigError on unknown classes.
FleetConfig fleet_config_from_json(const Json& j);

Json to_json(const GroundTruth& truth);

}  // namespace llsched

#endif  // LLSCHED_JSON_IO_HPP_

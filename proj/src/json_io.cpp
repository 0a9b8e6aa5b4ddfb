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

#include "llsched/json_io.hpp"

namespace llsched {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json window_json(const Window& w) {
  return Json{{"start_slot", w.start_slot}, {"length_slots", w.length_slots}};
}

Window window_from_json(const Json& j) {
  return Window(j.at("start_slot").get<int>(), j.at("length_slots").get<int>());
}

ColumnType column_type_from(const std::string& s) {
  if (s == "string") return ColumnType::String;
  if (s == "integer") return ColumnType::Integer;
  if (s == "real") return ColumnType::Real;
  throw ConfigError("unknown column type '" + s + "'");
}

Json breakdown_json(const ImpactBreakdown& b) {
  return Json{
      {"servers", b.servers},
      {"moved_and_better", b.fraction(ImpactCategory::MovedAndBetter)},
      {"default_already_good", b.fraction(ImpactCategory::DefaultAlreadyGood)},
      {"predicted_worse", b.fraction(ImpactCategory::PredictedWorse)},
  };
}

}  // namespace

Json to_json(const ValidationReport& report) {
  Json anomalies = Json::array();
  for (const Anomaly& a : report.anomalies) {
    anomalies.push_back(Json{{"kind", to_string(a.kind)}, {"row", a.row}, {"message", a.message}});
  }
  return Json{{"verdict", report.pass ? "pass" : "fail"}, {"anomalies", std::move(anomalies)}};
}

Json to_json(const SchemaSpec& spec) {
  Json cols = Json::array();
  for (const ColumnSpec& c : spec.columns) {
    Json col{{"name", c.name}, {"type", to_string(c.type)}};
    if (c.min) col["min"] = *c.min;
    if (c.max) col["max"] = *c.max;
    if (c.multiple_of) col["multiple_of"] = *c.multiple_of;
    cols.push_back(std::move(col));
  }
  return Json{{"columns", std::move(cols)}};
}

SchemaSpec schema_from_json(const Json& j) {
  SchemaSpec spec;
  for (const Json& col : j.at("columns")) {
    ColumnSpec c;
    c.name = col.at("name").get<std::string>();
    c.type = column_type_from(col.at("type").get<std::string>());
    if (col.contains("min")) c.min = col["min"].get<double>();
    if (col.contains("max")) c.max = col["max"].get<double>();
    if (col.contains("multiple_of")) c.multiple_of = col["multiple_of"].get<std::int64_t>();
    spec.columns.push_back(std::move(c));
  }
  spec.check();
  return spec;
}

Json to_json(const Classification& c) {
  Json j{{"server_id", c.server_id},
         {"interval_start", c.interval.first.iso()},
         {"interval_end", c.interval.last.iso()},
         {"class", c.server_class ? Json(to_string(*c.server_class)) : Json("Unclassifiable")},
         {"bucket_ratio_stats",
          Json{{"stable_min", optional_number(c.stable_min_ratio)},
               {"daily_min", optional_number(c.daily_min_ratio)},
               {"weekly_min", optional_number(c.weekly_min_ratio)}}}};
  if (!c.classifiable()) j["reason"] = c.unclassifiable_reason;
  return j;
}

Json to_json(const ForecastResult& f) {
  Json values = Json::array();
  for (int k = 0; k < kSlotsPerDay; ++k) {
    values.push_back(f.predicted.present(k) ? Json(f.predicted.values[k]) : Json(nullptr));
  }
  return Json{{"server_id", f.server_id},
              {"target_day", f.target_day.iso()},
              {"forecaster", f.forecaster.name()},
              {"history_start", f.history_span.first.iso()},
              {"history_end", f.history_span.last.iso()},
              {"predicted", std::move(values)}};
}

Json to_json(const PredictabilityRecord& r) {
  Json j{{"server_id", r.server_id}, {"day", r.day.iso()}, {"evaluable", r.evaluable}};
  if (!r.evaluable) {
    j["reason"] = r.reason;
    return j;
  }
  j["ll_window_correct"] = r.ll_window_correct;
  j["load_accurate"] = r.load_accurate;
  j["predicted_window"] = window_json(r.predicted_window);
  j["true_window"] = window_json(r.true_window);
  j["bucket_ratio_in_window"] = r.bucket_ratio_in_window;
  j["window_gap"] = r.window_gap;
  j["mean_nrmse"] = optional_number(r.mean_nrmse);
  j["mase"] = optional_number(r.mase);
  return j;
}

PredictabilityRecord record_from_json(const Json& j) {
  PredictabilityRecord r;
  r.server_id = j.at("server_id").get<std::string>();
  r.day = Day::parse_iso(j.at("day").get<std::string>());
  r.evaluable = j.at("evaluable").get<bool>();
  if (!r.evaluable) {
    r.reason = j.value("reason", "");
    return r;
  }
  r.ll_window_correct = j.at("ll_window_correct").get<bool>();
  r.load_accurate = j.at("load_accurate").get<bool>();
  r.predicted_window = window_from_json(j.at("predicted_window"));
  r.true_window = window_from_json(j.at("true_window"));
  r.bucket_ratio_in_window = j.at("bucket_ratio_in_window").get<double>();
  r.window_gap = j.at("window_gap").get<double>();
  if (!j.at("mean_nrmse").is_null()) r.mean_nrmse = j["mean_nrmse"].get<double>();
  if (!j.at("mase").is_null()) r.mase = j["mase"].get<double>();
  return r;
}

Json to_json(const BackupSchedule& s) {
  return Json{{"server_id", s.server_id},
              {"backup_day", s.backup_day.iso()},
              {"start_minute_utc", s.start_minute()},
              {"duration_min", s.window.minutes()},
              {"source", to_string(s.source)}};
}

BackupSchedule schedule_from_json(const Json& j) {
  BackupSchedule s;
  s.server_id = j.at("server_id").get<std::string>();
  s.backup_day = Day::parse_iso(j.at("backup_day").get<std::string>());
  const Minute offset = j.at("start_minute_utc").get<Minute>() - s.backup_day.start_minute();
  s.window = Window(static_cast<int>(offset / kSlotMinutes),
                    j.at("duration_min").get<int>() / kSlotMinutes);
  const auto source = j.at("source").get<std::string>();
  if (source == "Predicted") {
    s.source = ScheduleSource::Predicted;
  } else if (source == "Default") {
    s.source = ScheduleSource::Default;
  } else {
    throw ConfigError("unknown schedule source '" + source + "'");
  }
  return s;
}

Json to_json(const ImpactReport& report) {
  return Json{{"busy_threshold", report.busy_threshold},
              {"overall", breakdown_json(report.overall)},
              {"busy", breakdown_json(report.busy)},
              {"excluded", report.excluded.size()}};
}

Json to_json(const FleetConfig& c) {
  Json mix = Json::object();
  for (ServerClass cls : kAllClasses) {
    const auto it = c.mix.find(cls);
    if (it != c.mix.end()) mix[std::string(to_string(cls))] = it->second;
  }
  return Json{{"server_count", c.server_count},
              {"mix", std::move(mix)},
              {"weeks", c.weeks},
              {"noise", c.noise},
              {"valley",
               Json{{"width_min", c.valley.width_minutes},
                    {"start_min", c.valley.start_minute},
                    {"jitter_min", c.valley.jitter_minutes}}},
              {"peak_default_fraction", c.peak_default_fraction},
              {"backup_min", c.backup_minutes},
              {"include_backup_day", c.include_backup_day},
              {"seed", c.seed},
              {"start_day", c.start_day.iso()}};
}

FleetConfig fleet_config_from_json(const Json& j) {
  FleetConfig c;
  try {
    c.server_count = j.value("server_count", c.server_count);
    if (j.contains("mix")) {
      c.mix.clear();
      for (const auto& [name, frac] : j["mix"].items()) {
        const auto cls = server_class_from_string(name);
        if (!cls) throw ConfigError("unknown server class '" + name + "' in mix");
        c.mix[*cls] = frac.get<double>();
      }
    }
    c.weeks = j.value("weeks", c.weeks);
    c.noise = j.value("noise", c.noise);
    if (j.contains("valley")) {
      const Json& v = j["valley"];
      c.valley.width_minutes = v.value("width_min", c.valley.width_minutes);
      c.valley.start_minute = v.value("start_min", c.valley.start_minute);
      c.valley.jitter_minutes = v.value("jitter_min", c.valley.jitter_minutes);
    }
    c.peak_default_fraction = j.value("peak_default_fraction", c.peak_default_fraction);
    c.backup_minutes = j.value("backup_min", c.backup_minutes);
    c.include_backup_day = j.value("include_backup_day", c.include_backup_day);
    c.seed = j.value("seed", c.seed);
    if (j.contains("start_day")) c.start_day = Day::parse_iso(j["start_day"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("fleet config: ") + e.what());
  }
  c.check();
  return c;
}

Json to_json(const GroundTruth& truth) {
  Json servers = Json::object();
  for (const auto& [id, cls] : truth.labels) {
    const auto peak = truth.default_on_peak.find(id);
    servers[id] = Json{{"class", to_string(cls)},
                       {"default_on_peak", peak != truth.default_on_peak.end() && peak->second}};
  }
  return Json{{"backup_day", truth.backup_day.iso()}, {"servers", std::move(servers)}};
}

}  // namespace llsched

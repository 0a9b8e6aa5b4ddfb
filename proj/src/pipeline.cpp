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

#include "llsched/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "llsched/json_io.hpp"

namespace llsched {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("cannot initialise SHA-256");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    std::string out;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
      std::snprintf(byte, sizeof byte, "%02x", md[i]);
      out += byte;
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

/// Runs fn(i) for i in [0, n) on up to `degree` threads. Rethrows the first failure.
void parallel_for(std::size_t n, int degree, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, degree));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

template <class Range, class ToJson>
void write_jsonl(const fs::path& path, const Range& items, ToJson&& to_json_fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& item : items) out << to_json_fn(item).dump() << '\n';
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<Json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(Json::parse(line));
  }
  return out;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return Json::parse(in);
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

Json config_json(const PipelineConfig& c) {
  return Json{{"forecaster", c.forecaster.name()},
              {"bound", c.bound.str()},
              {"backup_min", c.backup.minutes()},
              {"coverage", c.min_coverage},
              {"interval_days", c.interval_days},
              {"region", c.region}};
}

Json manifest_json(const RunManifest& m, const PipelineConfig& c) {
  Json stages = Json::array();
  for (const StageRecord& s : m.stages) {
    Json counts = Json::object();
    for (const auto& [k, v] : s.counts) counts[k] = v;
    Json js{{"name", s.name},
            {"started_at", s.started_at},
            {"finished_at", s.finished_at},
            {"ok", s.ok},
            {"counts", std::move(counts)}};
    if (!s.ok) js["error"] = s.error;
    stages.push_back(std::move(js));
  }
  return Json{{"run_id", m.run_id},
              {"region", m.region},
              {"tool_version", kVersion},
              {"forecaster", m.forecaster},
              {"config", config_json(c)},
              {"input", Json{{"path", c.input.string()}, {"sha256", m.input_digest}}},
              {"parallelism", m.parallelism},
              {"stages", std::move(stages)},
              {"failures", m.failures},
              {"exit_code", m.exit_code}};
}

MetricsSummary summarize(const std::vector<ServerOutcome>& outcomes) {
  MetricsSummary m;
  std::size_t correct = 0, accurate = 0;
  for (const ServerOutcome& o : outcomes) {
    for (const PredictabilityRecord& r : o.records) {
      if (!r.evaluable) continue;
      ++m.evaluated_windows;
      correct += r.ll_window_correct;
      accurate += r.load_accurate;
    }
    m.long_lived_servers += o.long_lived;
    m.predictable_servers += o.long_lived && o.predictable;
  }
  m.pct_windows_correct = percent(correct, m.evaluated_windows);
  m.pct_windows_accurate = percent(accurate, m.evaluated_windows);
  m.pct_predictable = percent(m.predictable_servers, m.long_lived_servers);
  return m;
}

Json metrics_json(const MetricsSummary& m) {
  return Json{{"pct_windows_correct", m.pct_windows_correct},
              {"pct_windows_accurate", m.pct_windows_accurate},
              {"pct_predictable", m.pct_predictable},
              {"evaluated_windows", m.evaluated_windows},
              {"long_lived_servers", m.long_lived_servers},
              {"predictable_servers", m.predictable_servers}};
}

MetricsSummary metrics_from_json(const Json& j) {
  MetricsSummary m;
  m.pct_windows_correct = j.at("pct_windows_correct").get<double>();
  m.pct_windows_accurate = j.at("pct_windows_accurate").get<double>();
  m.pct_predictable = j.at("pct_predictable").get<double>();
  m.evaluated_windows = j.at("evaluated_windows").get<std::size_t>();
  m.long_lived_servers = j.at("long_lived_servers").get<std::size_t>();
  m.predictable_servers = j.at("predictable_servers").get<std::size_t>();
  return m;
}

/// Tracks one stage in the manifest; marks it failed unless finish() is reached.
class StageScope {
 public:
  StageScope(RunManifest& m, std::string name) : m_(m) {
    m_.stages.push_back({std::move(name), utc_now(), "", false, "incomplete", {}});
  }
  void count(std::string key, std::size_t v) { m_.stages.back().counts.emplace_back(std::move(key), v); }
  void finish() {
    m_.stages.back().finished_at = utc_now();
    m_.stages.back().ok = true;
    m_.stages.back().error.clear();
  }
  void fail(const std::string& why) {
    m_.stages.back().finished_at = utc_now();
    m_.stages.back().ok = false;
    m_.stages.back().error = why;
    m_.failures.push_back(m_.stages.back().name + ": " + why);
  }

 private:
  RunManifest& m_;
};

/// Predictability records for the lookback days, plus the due day when it has data.
void fill_records(const LoadSeries& series, const PipelineConfig& config, ServerOutcome& out) {
  if (series.samples.empty()) return;
  const Day backup = series.default_backup_day();
  out.long_lived = lifespan_class(series, backup) == Lifespan::LongLived;
  const Day first = std::max(series.first_day(), backup - kPredictabilityDays);
  const Day last = series.on(backup).empty() ? backup - 1 : backup;
  for (Day d = first; d <= last; ++d) {
    try {
      const ForecastResult f = forecast(config.forecaster, series, d);
      out.records.push_back(evaluate_server_day(f.predicted, slice_day(series, d), config.backup,
                                                config.bound, config.min_coverage));
    } catch (const Error& e) {
      out.records.push_back(non_evaluable_record(series.server_id, d, e.what()));
    }
  }
  out.predictable = is_predictable(out.records, backup);
}

}  // namespace

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Sha256 sha;
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    sha.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return sha.hex();
}

void PipelineConfig::check() const {
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) {
    throw ConfigError("coverage threshold must be in [0, 1]");
  }
  if (interval_days < 1) throw ConfigError("classification interval must be at least 1 day");
  if (out_dir.empty()) throw ConfigError("results directory not set");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path probe = out_dir / ".write-probe";
  std::ofstream touch(probe);
  if (!touch) throw ConfigError("results directory '" + out_dir.string() + "' is not writable");
  touch.close();
  fs::remove(probe, ec);
}

const StageRecord* RunManifest::stage(std::string_view name) const {
  for (const StageRecord& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::size_t RunManifest::count(std::string_view stage_name, std::string_view key) const {
  const StageRecord* s = stage(stage_name);
  if (s == nullptr) return 0;
  for (const auto& [k, v] : s->counts) {
    if (k == key) return v;
  }
  return 0;
}

ServerOutcome process_server(const LoadSeries& series, const PipelineConfig& config) {
  ServerOutcome out;
  const Day backup = series.default_backup_day();
  const DateRange interval = DateRange::ending_before(backup, config.interval_days);
  out.classification = classify_server(series, interval, config.bound, config.min_coverage);

  if (out.classification.classifiable()) {
    try {
      out.forecast = forecast(config.forecaster, series, backup);
    } catch (const Error& e) {
      out.forecast_error = e.what();
    }
  }

  fill_records(series, config, out);

  const DefaultWindow fallback = default_window(series);
  out.schedule = schedule_one(series.server_id, DueEntry{backup, config.backup},
                              out.forecast ? &*out.forecast : nullptr, out.records, &fallback,
                              config.min_coverage);
  return out;
}

RunManifest run(const PipelineConfig& config) {
  RunManifest m;
  m.region = config.region;
  m.parallelism = config.parallelism;
  m.forecaster = config.forecaster.name() + " (llsched " + kVersion + ")";
  config.check();

  m.input_digest = file_digest(config.input);
  {
    Sha256 id;
    const std::string key = m.input_digest + "|" + config_json(config).dump();
    id.update(key.data(), key.size());
    m.run_id = id.hex().substr(0, 16);
  }
  m.run_dir = config.out_dir / m.run_id;
  fs::create_directories(m.run_dir);

  auto finish = [&](int code) {
    m.exit_code = code;
    write_json(m.run_dir / "manifest.json", manifest_json(m, config));
    std::ofstream(config.out_dir / "LATEST", std::ios::binary) << m.run_id << '\n';
    return m;
  };

  std::vector<LoadSeries> fleet;
  std::vector<ServerOutcome> outcomes;
  // Each stage either finishes or records its failure and ends the run.
  auto stage = [&](const char* name, auto&& body) -> bool {
    StageScope scope(m, name);
    try {
      body(scope);
      scope.finish();
      return true;
    } catch (const std::exception& e) {
      scope.fail(e.what());
      return false;
    }
  };

  bool validation_failed = false;
  if (!stage("validate", [&](StageScope& s) {
        const ValidationReport v = validate(config.input, telemetry_schema());
        write_json(m.run_dir / "validation.json", to_json(v));
        s.count("rows", v.rows);
        s.count("schema_anomalies", v.count(AnomalyKind::Schema));
        s.count("bound_anomalies", v.count(AnomalyKind::Bound));
        s.count("gap_anomalies", v.count(AnomalyKind::Gap));
        if (!v.pass) {
          validation_failed = true;
          throw Error("validation verdict: fail");
        }
      })) {
    return finish(validation_failed ? kExitValidation : kExitFailure);
  }

  if (!stage("parse", [&](StageScope& s) {
        fleet = parse_telemetry(config.input);
        s.count("servers", fleet.size());
      })) {
    return finish(kExitFailure);
  }

  outcomes.resize(fleet.size());
  auto fan_out = [&](auto&& fn) {
    parallel_for(fleet.size(), config.parallelism, [&](std::size_t i) { fn(i); });
  };

  if (!stage("classify", [&](StageScope& s) {
        fan_out([&](std::size_t i) {
          const LoadSeries& series = fleet[i];
          const Day backup = series.default_backup_day();
          outcomes[i].classification = classify_server(
              series, DateRange::ending_before(backup, config.interval_days), config.bound,
              config.min_coverage);
        });
        std::size_t unclassifiable = 0;
        for (const auto& o : outcomes) unclassifiable += !o.classification.classifiable();
        write_jsonl(m.run_dir / "classes.jsonl", outcomes,
                    [](const ServerOutcome& o) { return to_json(o.classification); });
        s.count("servers_in", fleet.size());
        s.count("servers_out", outcomes.size());
        s.count("classified", outcomes.size() - unclassifiable);
        s.count("unclassifiable", unclassifiable);
      })) {
    return finish(kExitFailure);
  }

  if (!stage("forecast", [&](StageScope& s) {
        fan_out([&](std::size_t i) {
          ServerOutcome& o = outcomes[i];
          if (!o.classification.classifiable()) return;
          try {
            o.forecast = forecast(config.forecaster, fleet[i], fleet[i].default_backup_day());
          } catch (const Error& e) {
            o.forecast_error = e.what();
          }
        });
        std::size_t in = 0, produced = 0;
        std::ofstream out(m.run_dir / "forecasts.jsonl", std::ios::binary);
        for (const auto& o : outcomes) {
          in += o.classification.classifiable();
          if (o.forecast) {
            ++produced;
            out << to_json(*o.forecast).dump() << '\n';
          }
        }
        s.count("servers_in", in);
        s.count("forecasts", produced);
        s.count("insufficient_history", in - produced);
      })) {
    return finish(kExitFailure);
  }

  if (!stage("evaluate", [&](StageScope& s) {
        fan_out([&](std::size_t i) {
          fill_records(fleet[i], config, outcomes[i]);
        });
        std::size_t records = 0, evaluable = 0;
        std::ofstream out(m.run_dir / "records.jsonl", std::ios::binary);
        for (const auto& o : outcomes) {
          for (const auto& r : o.records) {
            ++records;
            evaluable += r.evaluable;
            out << to_json(r).dump() << '\n';
          }
        }
        s.count("records", records);
        s.count("evaluable", evaluable);
      })) {
    return finish(kExitFailure);
  }

  if (!stage("schedule", [&](StageScope& s) {
        fan_out([&](std::size_t i) {
          const LoadSeries& series = fleet[i];
          ServerOutcome& o = outcomes[i];
          const DefaultWindow fallback = default_window(series);
          o.schedule = schedule_one(series.server_id,
                                    DueEntry{series.default_backup_day(), config.backup},
                                    o.forecast ? &*o.forecast : nullptr, o.records, &fallback,
                                    config.min_coverage);
        });
        std::size_t predicted = 0, errors = 0;
        std::ofstream out(m.run_dir / "schedules.jsonl", std::ios::binary);
        for (const auto& o : outcomes) {
          if (!o.schedule) {
            ++errors;
            continue;
          }
          predicted += o.schedule->source == ScheduleSource::Predicted;
          out << to_json(*o.schedule).dump() << '\n';
        }
        s.count("due", outcomes.size());
        s.count("predicted", predicted);
        s.count("default", outcomes.size() - predicted - errors);
        s.count("errors", errors);
      })) {
    return finish(kExitFailure);
  }

  if (!stage("summarize", [&](StageScope& s) {
        const MetricsSummary summary = summarize(outcomes);
        write_json(m.run_dir / "metrics.json", metrics_json(summary));
        s.count("evaluated_windows", summary.evaluated_windows);
        s.count("long_lived_servers", summary.long_lived_servers);
      })) {
    return finish(kExitFailure);
  }
  return finish(kExitOk);
}

RunReport report(const fs::path& out_dir, const std::optional<fs::path>& actuals,
                 double busy_threshold, const std::optional<std::string>& run_id) {
  RunReport rep;
  if (run_id) {
    rep.run_id = *run_id;
  } else {
    std::ifstream latest(out_dir / "LATEST");
    if (!(latest >> rep.run_id)) throw Error("no completed run found in " + out_dir.string());
  }
  const fs::path dir = out_dir / rep.run_id;
  if (!fs::exists(dir / "metrics.json")) throw Error("run " + rep.run_id + " did not complete");

  const Json manifest = read_json(dir / "manifest.json");
  const ErrorBound bound = ErrorBound::parse(manifest.at("config").at("bound").get<std::string>());
  rep.metrics = metrics_from_json(read_json(dir / "metrics.json"));

  for (ServerClass c : kAllClasses) rep.class_counts[std::string(to_string(c))] = 0;
  rep.class_counts["Unclassifiable"] = 0;
  for (const Json& j : read_jsonl(dir / "classes.jsonl")) {
    ++rep.class_counts[j.at("class").get<std::string>()];
    ++rep.servers;
  }

  std::ostringstream text;
  char line[160];
  std::snprintf(line, sizeof line, "run %s\n", rep.run_id.c_str());
  text << line;
  std::snprintf(line, sizeof line, "  correctly chosen LL windows   %6.2f%%  (%zu windows)\n",
                rep.metrics.pct_windows_correct, rep.metrics.evaluated_windows);
  text << line;
  std::snprintf(line, sizeof line, "  accurately predicted windows  %6.2f%%\n",
                rep.metrics.pct_windows_accurate);
  text << line;
  std::snprintf(line, sizeof line, "  predictable servers           %6.2f%%  (%zu of %zu long-lived)\n",
                rep.metrics.pct_predictable, rep.metrics.predictable_servers,
                rep.metrics.long_lived_servers);
  text << line << "\n";
  std::snprintf(line, sizeof line, "%-16s %8s %8s\n", "class", "servers", "share");
  text << line;
  for (const auto& [name, n] : rep.class_counts) {
    std::snprintf(line, sizeof line, "%-16s %8zu %7.1f%%\n", name.c_str(), n, percent(n, rep.servers));
    text << line;
  }

  Json out{{"run_id", rep.run_id}, {"metrics", metrics_json(rep.metrics)}};
  Json classes = Json::object();
  for (const auto& [name, n] : rep.class_counts) classes[name] = n;
  out["classes"] = std::move(classes);

  if (actuals) {
    std::vector<BackupSchedule> schedules;
    for (const Json& j : read_jsonl(dir / "schedules.jsonl")) schedules.push_back(schedule_from_json(j));
    const auto truth = parse_telemetry(*actuals);
    std::map<std::string, DaySlice> slices;
    std::map<std::string, DefaultWindow> defaults;
    std::map<std::string, const LoadSeries*> by_id;
    for (const LoadSeries& s : truth) by_id.emplace(s.server_id, &s);
    for (const BackupSchedule& s : schedules) {
      const auto it = by_id.find(s.server_id);
      if (it == by_id.end() || it->second->on(s.backup_day).empty()) continue;
      slices.emplace(s.server_id, slice_day(*it->second, s.backup_day));
      defaults.emplace(s.server_id, default_window(*it->second));
    }
    rep.impact = impact_report(schedules, slices, defaults, busy_threshold, bound);
    text << "\n" << format_impact_table(*rep.impact);
    out["impact"] = to_json(*rep.impact);
  }
  rep.text = text.str();
  write_json(dir / "report.json", out);
  return rep;
}

}  // namespace llsched

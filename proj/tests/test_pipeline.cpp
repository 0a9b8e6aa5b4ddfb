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

#include "llsched/json_io.hpp"
#include "llsched/pipeline.hpp"
#include "llsched/synthgen.hpp"
#include "support.hpp"

using namespace llsched;
namespace fs = std::filesystem;

namespace {

fs::path write_fleet(const fs::path& dir, const FleetConfig& c) {
  const fs::path csv = dir / "fleet.csv";
  std::ofstream out(csv, std::ios::binary);
  generate_fleet(c, out);
  return csv;
}

FleetConfig small_mix(std::uint64_t seed) {
  FleetConfig c;
  c.server_count = 40;
  c.mix = {{ServerClass::Stable, 0.4},
           {ServerClass::DailyPattern, 0.2},
           {ServerClass::WeeklyPattern, 0.1},
           {ServerClass::NoPattern, 0.1},
           {ServerClass::ShortLived, 0.2}};
  c.noise = 4;
  c.seed = seed;
  return c;
}

PipelineConfig config_for(const fs::path& input, const fs::path& out, int parallelism = 1) {
  PipelineConfig p;
  p.input = input;
  p.out_dir = out;
  p.parallelism = parallelism;
  return p;
}

const char* kArtifacts[] = {"validation.json", "classes.jsonl", "forecasts.jsonl",
                            "records.jsonl",   "schedules.jsonl", "metrics.json"};

}  // namespace

TEST_CASE("generated fleet runs through every stage") {
  const fs::path dir = support::scratch_dir("all-stages");
  const RunManifest m = run(config_for(write_fleet(dir, small_mix(1)), dir / "out"));
  CHECK(m.exit_code == kExitOk);
  CHECK(m.failures.empty());
  REQUIRE(m.stages.size() == 7);
  for (const StageRecord& s : m.stages) CHECK(s.ok);
  for (const char* a : kArtifacts) CHECK(fs::exists(m.run_dir / a));
  CHECK(support::slurp(dir / "out" / "LATEST") == m.run_id + "\n");

  CHECK(m.count("classify", "servers_out") ==
        m.count("forecast", "servers_in") + m.count("classify", "unclassifiable"));
  CHECK(m.count("schedule", "due") == 40);
  CHECK(m.count("schedule", "predicted") + m.count("schedule", "default") == 40);

  const Json manifest = Json::parse(support::slurp(m.run_dir / "manifest.json"));
  CHECK(manifest["run_id"] == m.run_id);
  CHECK(manifest["input"]["sha256"] == file_digest(dir / "fleet.csv"));
  CHECK(manifest["forecaster"].get<std::string>().find("prev-day") == 0);
}

TEST_CASE("out-of-bound rows stop the run after validation") {
  const fs::path dir = support::scratch_dir("bad-input");
  const fs::path csv = dir / "bad.csv";
  std::ofstream(csv) << kTelemetryHeader << "\ns,0,150,60,120\ns,5,10,60,120\n";
  const RunManifest m = run(config_for(csv, dir / "out"));
  CHECK(m.exit_code == kExitValidation);
  REQUIRE(m.stages.size() == 1);
  CHECK_FALSE(m.stages[0].ok);
  CHECK(fs::exists(m.run_dir / "validation.json"));
  CHECK_FALSE(fs::exists(m.run_dir / "forecasts.jsonl"));
}

TEST_CASE("missing input and unusable output are errors") {
  const fs::path dir = support::scratch_dir("errors");
  CHECK_THROWS_AS(run(config_for(dir / "nope.csv", dir / "out")), Error);
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(run(config_for(dir / "nope.csv", dir / "file" / "out")), ConfigError);
  CHECK_THROWS_AS(run(config_for(dir / "nope.csv", dir / "out", 0)), ConfigError);
}

TEST_CASE("parallelism and reruns never change the artifacts") {
  const fs::path dir = support::scratch_dir("determinism");
  const fs::path csv = write_fleet(dir, small_mix(9));
  const RunManifest one = run(config_for(csv, dir / "p1", 1));
  const RunManifest eight = run(config_for(csv, dir / "p8", 8));
  const RunManifest again = run(config_for(csv, dir / "again", 1));
  CHECK(one.run_id == eight.run_id);
  for (const char* a : kArtifacts) {
    const std::string base = support::slurp(one.run_dir / a);
    CHECK(base == support::slurp(eight.run_dir / a));
    CHECK(base == support::slurp(again.run_dir / a));
  }
}

TEST_CASE("run id depends on the config") {
  const fs::path dir = support::scratch_dir("run-id");
  const fs::path csv = write_fleet(dir, small_mix(2));
  PipelineConfig a = config_for(csv, dir / "out");
  PipelineConfig b = a;
  b.forecaster = ForecasterSpec(ForecasterKind::PrevWeekAverage);
  CHECK(run(a).run_id != run(b).run_id);
}

TEST_CASE("perfectly persistent stable fleet reports 100 / 100 / 100") {
  const fs::path dir = support::scratch_dir("perfect");
  FleetConfig c;
  c.server_count = 10;
  c.noise = 0;
  const fs::path csv = write_fleet(dir, c);
  run(config_for(csv, dir / "out"));
  const RunReport r = report(dir / "out", csv);
  CHECK(r.metrics.pct_windows_correct == 100);
  CHECK(r.metrics.pct_windows_accurate == 100);
  CHECK(r.metrics.pct_predictable == 100);
  CHECK(r.class_counts.at("Stable") == 10);
  CHECK(r.servers == 10);
  REQUIRE(r.impact);
  CHECK(r.impact->overall.servers == 10);
  CHECK(r.text.find("Stable") != std::string::npos);
  CHECK(fs::exists(dir / "out" / r.run_id / "report.json"));
}

TEST_CASE("report needs a completed run") {
  const fs::path dir = support::scratch_dir("no-run");
  CHECK_THROWS_AS(report(dir), Error);
}

TEST_CASE("process_server matches the staged run") {
  const fs::path dir = support::scratch_dir("process-server");
  const fs::path csv = write_fleet(dir, small_mix(5));
  const PipelineConfig cfg = config_for(csv, dir / "out");
  const RunManifest m = run(cfg);
  std::ifstream sched(m.run_dir / "schedules.jsonl");
  std::string line;
  for (const LoadSeries& s : parse_telemetry(csv)) {
    REQUIRE(std::getline(sched, line));
    const ServerOutcome o = process_server(s, cfg);
    REQUIRE(o.schedule);
    CHECK(to_json(*o.schedule).dump() == line);
    if (o.schedule->source == ScheduleSource::Predicted) {
      CHECK(o.long_lived);
      CHECK(o.predictable);
    }
  }
}

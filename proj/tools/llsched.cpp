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

// Command-line front end: run, report, generate, validate, infer-schema.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "llsched/json_io.hpp"
#include "llsched/pipeline.hpp"

namespace {

using namespace llsched;

struct RunArgs {
  std::string input;
  std::string out = "out";
  std::string forecaster = "prev-day";
  std::string bound = "+10:-5";
  int backup_min = 60;
  double coverage = kDefaultMinCoverage;
  int parallel = 1;
  std::string region = "default";
};

struct ReportArgs {
  std::string out = "out";
  std::string actuals;
  double busy = kDefaultBusyThreshold;
  std::string run_id;
};

struct GenerateArgs {
  std::string config;
  std::string out;
  std::string labels;
};

int do_run(const RunArgs& a) {
  PipelineConfig c;
  c.input = a.input;
  c.out_dir = a.out;
  c.forecaster = ForecasterSpec::parse(a.forecaster);
  c.bound = ErrorBound::parse(a.bound);
  c.backup = BackupDuration(a.backup_min);
  c.min_coverage = a.coverage;
  c.parallelism = a.parallel;
  c.region = a.region;
  const RunManifest m = run(c);
  std::cout << "run " << m.run_id << " -> " << m.run_dir.string() << "\n";
  for (const std::string& f : m.failures) std::cerr << "failed: " << f << "\n";
  return m.exit_code;
}

int do_report(const ReportArgs& a) {
  const RunReport r =
      report(a.out, a.actuals.empty() ? std::nullopt : std::optional<std::filesystem::path>(a.actuals),
             a.busy, a.run_id.empty() ? std::nullopt : std::optional<std::string>(a.run_id));
  std::cout << r.text;
  return kExitOk;
}

int do_generate(const GenerateArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw ConfigError("cannot read " + a.config);
  const FleetConfig config = fleet_config_from_json(Json::parse(in));
  std::ofstream csv(a.out, std::ios::binary);
  if (!csv) throw ConfigError("cannot write " + a.out);
  const GroundTruth truth = generate_fleet(config, csv);
  const std::string labels = a.labels.empty() ? a.out + ".labels.json" : a.labels;
  std::ofstream(labels) << to_json(truth).dump(2) << "\n";
  std::cout << "wrote " << config.server_count << " servers to " << a.out << " (labels: " << labels
            << ")\n";
  return kExitOk;
}

int do_validate(const std::string& input, const std::string& schema_path) {
  SchemaSpec spec = telemetry_schema();
  if (!schema_path.empty()) {
    std::ifstream in(schema_path);
    if (!in) throw ConfigError("cannot read " + schema_path);
    spec = schema_from_json(Json::parse(in));
  }
  const ValidationReport v = validate(input, spec);
  std::cout << to_json(v).dump(2) << "\n";
  return v.pass ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-load backup window scheduler"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Classify, forecast and schedule a fleet");
  run_cmd->add_option("--input", ra.input, "Telemetry CSV")->required()->envname("LLSCHED_INPUT");
  run_cmd->add_option("--out", ra.out, "Results directory")->envname("LLSCHED_OUT");
  run_cmd->add_option("--forecaster", ra.forecaster, "prev-day | prev-equiv-day | prev-week-avg | seasonal-naive[:P[:S]]")
      ->envname("LLSCHED_FORECASTER");
  run_cmd->add_option("--bound", ra.bound, "Error bound as +over:-under")->envname("LLSCHED_BOUND");
  run_cmd->add_option("--backup-min", ra.backup_min, "Backup duration in minutes")
      ->envname("LLSCHED_BACKUP_MIN");
  run_cmd->add_option("--coverage", ra.coverage, "Minimum daily coverage")->envname("LLSCHED_COVERAGE");
  run_cmd->add_option("--parallel", ra.parallel, "Worker threads")->envname("LLSCHED_PARALLEL");
  run_cmd->add_option("--region", ra.region, "Region label")->envname("LLSCHED_REGION");

  ReportArgs pa;
  auto* report_cmd = app.add_subcommand("report", "Summarize a completed run");
  report_cmd->add_option("--out", pa.out, "Results directory")->envname("LLSCHED_OUT");
  report_cmd->add_option("--actuals", pa.actuals, "Telemetry with the backup-day load");
  report_cmd->add_option("--busy", pa.busy, "Busy-server peak threshold");
  report_cmd->add_option("--run", pa.run_id, "Run id (default: latest)");

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic fleet");
  gen_cmd->add_option("--config", ga.config, "Fleet config JSON")->required();
  gen_cmd->add_option("--out", ga.out, "Output CSV")->required();
  gen_cmd->add_option("--labels", ga.labels, "Ground-truth labels JSON");

  std::string v_input, v_schema;
  auto* val_cmd = app.add_subcommand("validate", "Check a telemetry file against a schema");
  val_cmd->add_option("--input", v_input, "CSV file")->required();
  val_cmd->add_option("--schema", v_schema, "Schema JSON (default: telemetry schema)");

  std::string i_input;
  auto* infer_cmd = app.add_subcommand("infer-schema", "Print the schema inferred from a CSV");
  infer_cmd->add_option("--input", i_input, "CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (*run_cmd) return do_run(ra);
    if (*report_cmd) return do_report(pa);
    if (*gen_cmd) return do_generate(ga);
    if (*val_cmd) return do_validate(v_input, v_schema);
    if (*infer_cmd) {
      std::cout << to_json(infer_schema(i_input)).dump(2) << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

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

// Acceptance checks, one PASS/FAIL line each. Exits non-zero if any fails.
// `acceptance 3 7` runs only the listed checks.

#include <chrono>
#include <cstdio>
#include <set>
#include <thread>

#include "llsched/json_io.hpp"
#include "llsched/pipeline.hpp"
#include "llsched/synthgen.hpp"
#include "support.hpp"

using namespace llsched;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// -- oracles -------------------------------------------------------------------

int exhaustive_start(const SlotArray& v, int len) {
  int best = -1;
  double best_mean = 0;
  for (int s = 0; s + len <= kSlotsPerDay; ++s) {
    double sum = 0;
    int n = 0;
    for (int k = s; k < s + len; ++k) {
      if (!std::isnan(v[k])) {
        sum += v[k];
        ++n;
      }
    }
    if (n == 0) continue;
    if (best < 0 || sum / n < best_mean - 1e-9) {
      best = s;
      best_mean = sum / n;
    }
  }
  return best;
}

double count_ratio(const SlotArray& p, const SlotArray& a) {
  long hits = 0, total = 0;
  for (int k = 0; k < kSlotsPerDay; ++k) {
    if (std::isnan(p[k]) || std::isnan(a[k])) continue;
    ++total;
    hits += (p[k] - a[k] >= -5.0) && (p[k] - a[k] <= 10.0);
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<Json> read_jsonl(const fs::path& p) {
  std::vector<Json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(Json::parse(line));
  return out;
}

FleetConfig reference_mix(std::size_t n, std::uint64_t seed) {
  FleetConfig c;
  c.server_count = n;
  c.mix = {{ServerClass::Stable, 0.4},
           {ServerClass::DailyPattern, 0.2},
           {ServerClass::WeeklyPattern, 0.1},
           {ServerClass::NoPattern, 0.1},
           {ServerClass::ShortLived, 0.2}};
  c.noise = 5;
  c.seed = seed;
  return c;
}

struct GeneratedRun {
  GroundTruth truth;
  fs::path csv;
  RunManifest manifest;
};

GeneratedRun generate_and_run(const fs::path& dir, const FleetConfig& c, int parallelism = 1) {
  GeneratedRun g;
  g.csv = dir / "fleet.csv";
  {
    std::ofstream out(g.csv, std::ios::binary);
    g.truth = generate_fleet(c, out);
  }
  PipelineConfig p;
  p.input = g.csv;
  p.out_dir = dir / "out";
  p.parallelism = parallelism;
  g.manifest = run(p);
  return g;
}

// Shared by checks 4 to 6: a 1,000-server reference fleet, generated once.
const GeneratedRun& reference_run() {
  static const GeneratedRun g = generate_and_run(support::scratch_dir("acceptance-ref"), reference_mix(1000, 2024));
  return g;
}

// -- checks --------------------------------------------------------------------

Outcome ll_window_oracle() {
  std::mt19937_64 rng(1001);
  const auto t0 = Clock::now();
  long mismatches = 0, cases = 0;
  for (int i = 0; i < 1000; ++i) {
    const SlotArray v = support::random_shaped(rng);
    const DaySlice day("s", support::kMonday, v);
    for (int minutes : {30, 60, 240}) {
      ++cases;
      const Window w = ll_window(day, BackupDuration(minutes), 0.0);
      mismatches += w.start_slot != exhaustive_start(v, minutes / kSlotMinutes);
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt("%ld/%ld windows match exhaustive search, %.2f s", cases - mismatches, cases, secs)};
}

Outcome bucket_ratio_oracle() {
  std::mt19937_64 rng(1002);
  std::normal_distribution<double> noise(0.0, 7.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const SlotArray a = support::random_slots(rng, 0, 100, 0.05);
    SlotArray p = a;
    for (int k = 0; k < kSlotsPerDay; ++k) {
      p[k] = rng() % 20 == 0 ? kAbsent : std::clamp(p[k] + noise(rng), 0.0, 100.0);
    }
    const double oracle = count_ratio(p, a);
    const double got = bucket_ratio(p, a);
    worst = std::max(worst, std::abs(got - oracle) / std::max(oracle, 1e-300));
  }
  return {worst <= 1e-9, fmt("max relative difference %.3g over 1000 pairs", worst)};
}

Outcome boundary_suite() {
  struct Case {
    double predicted;
    bool in;
  };
  const Case cases[] = {{60.0, true}, {45.0, true}, {60.000001, false}, {44.999999, false}};
  const Eigen::Array<double, 1, 1> actual = Eigen::Array<double, 1, 1>::Constant(50.0);
  int ok = 0;
  for (const Case& c : cases) {
    const double r = bucket_ratio(Eigen::Array<double, 1, 1>::Constant(c.predicted), actual);
    ok += (r == 100.0) == c.in;
  }
  return {ok == 4, fmt("%d/4 deviations (+10, -5, +10.000001, -5.000001) classified as expected", ok)};
}

Outcome classification_fidelity() {
  const GeneratedRun& g = reference_run();
  std::size_t agree = 0, total = 0, short_agree = 0, short_total = 0;
  for (const Json& j : read_jsonl(g.manifest.run_dir / "classes.jsonl")) {
    const ServerClass label = g.truth.labels.at(j["server_id"].get<std::string>());
    const bool same = j["class"].get<std::string>() == to_string(label);
    ++total;
    agree += same;
    if (label == ServerClass::ShortLived) {
      ++short_total;
      short_agree += same;
    }
  }
  const double pct = 100.0 * static_cast<double>(agree) / static_cast<double>(total);
  return {total == 1000 && pct >= 99.0 && short_agree == short_total,
          fmt("label agreement %.1f%% (%zu/%zu), short-lived %zu/%zu", pct, agree, total, short_agree,
              short_total)};
}

Outcome persistent_fidelity() {
  const GeneratedRun& g = reference_run();
  std::size_t windows = 0, correct = 0, acc_windows = 0, accurate = 0;
  for (const Json& j : read_jsonl(g.manifest.run_dir / "records.jsonl")) {
    if (!j["evaluable"].get<bool>()) continue;
    const ServerClass label = g.truth.labels.at(j["server_id"].get<std::string>());
    if (label == ServerClass::Stable || label == ServerClass::DailyPattern ||
        label == ServerClass::WeeklyPattern) {
      ++windows;
      correct += j["ll_window_correct"].get<bool>();
    }
    if (label == ServerClass::Stable || label == ServerClass::DailyPattern) {
      ++acc_windows;
      accurate += j["load_accurate"].get<bool>();
    }
  }
  const double pc = 100.0 * static_cast<double>(correct) / static_cast<double>(windows);
  const double pa = 100.0 * static_cast<double>(accurate) / static_cast<double>(acc_windows);
  return {windows > 0 && pc >= 99.0 && pa >= 99.0,
          fmt("correct windows %.2f%% of %zu, accurate in-window load %.2f%% of %zu", pc, windows, pa,
              acc_windows)};
}

Outcome predictability_gate() {
  const GeneratedRun& g = reference_run();
  std::map<std::string, std::set<int>> good_days;
  for (const Json& j : read_jsonl(g.manifest.run_dir / "records.jsonl")) {
    if (j["evaluable"].get<bool>() && j["ll_window_correct"].get<bool>() && j["load_accurate"].get<bool>()) {
      good_days[j["server_id"].get<std::string>()].insert(Day::parse_iso(j["day"].get<std::string>()).index);
    }
  }
  std::map<std::string, Day> first_day;
  for (const LoadSeries& s : parse_telemetry(g.csv)) first_day.emplace(s.server_id, s.first_day());

  std::size_t predicted = 0, violations = 0;
  for (const Json& j : read_jsonl(g.manifest.run_dir / "schedules.jsonl")) {
    if (j["source"] != "Predicted") continue;
    ++predicted;
    const std::string id = j["server_id"].get<std::string>();
    const Day backup = Day::parse_iso(j["backup_day"].get<std::string>());
    bool ok = backup - first_day.at(id) > 21;
    for (int back = 1; back <= 21; ++back) ok &= good_days[id].count((backup - back).index) == 1;
    violations += !ok;
  }
  return {violations == 0 && predicted > 0,
          fmt("%zu violations among %zu predicted schedules", violations, predicted)};
}

Outcome metric_arithmetic() {
  struct Case {
    std::vector<double> forecast, actual;
    double expected;
  };
  const Case nrmse_cases[] = {{{5, 7, 9}, {5, 7, 9}, 0.0}, {{4, 4, 4, 4}, {2, 2, 2, 2}, 1.0}, {{3, 1}, {1, 3}, 1.0}};
  const Case mase_cases[] = {{{1, 5, 2}, {1, 5, 2}, 0.0}, {{2, 3, 4, 5}, {1, 2, 3, 4}, 1.0}, {{1, 1, 1, 1}, {0, 2, 0, 2}, 0.5}};
  int ok = 0;
  double worst = 0;
  for (const Case& c : nrmse_cases) {
    const double e = std::abs(mean_nrmse(c.forecast, c.actual) - c.expected);
    worst = std::max(worst, e);
    ok += c.expected == 0.0 ? e == 0.0 : e <= 1e-12;
  }
  for (const Case& c : mase_cases) {
    const double e = std::abs(mase(c.forecast, c.actual) - c.expected);
    worst = std::max(worst, e);
    ok += c.expected == 0.0 ? e == 0.0 : e <= 1e-12;
  }
  return {ok == 6, fmt("%d/6 examples reproduced, max error %.3g", ok, worst)};
}

Outcome determinism() {
  const fs::path root = support::scratch_dir("acceptance-determinism");
  int identical = 0;
  std::string first_diff;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const fs::path dir = root / std::to_string(seed);
    fs::create_directories(dir);
    FleetConfig c = reference_mix(60, 9000 + seed);
    c.peak_default_fraction = 0.1;
    const GeneratedRun one = generate_and_run(dir, c, 1);
    PipelineConfig p;
    p.input = one.csv;
    p.out_dir = dir / "out8";
    p.parallelism = 8;
    const RunManifest eight = run(p);
    bool same = one.manifest.exit_code == 0 && eight.exit_code == 0;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(one.manifest.run_dir)) {
      const std::string name = e.path().filename().string();
      if (name == "manifest.json") continue;
      ++files;
      if (support::slurp(e.path()) != support::slurp(eight.run_dir / name)) {
        same = false;
        if (first_diff.empty()) first_diff = fmt(" (first difference: seed %d, %s)", static_cast<int>(seed), name.c_str());
      }
    }
    identical += same && files >= 6;
  }
  return {identical == 10, fmt("%d/10 fleets byte-identical at parallelism 1 and 8%s", identical, first_diff.c_str())};
}

Outcome impact_accounting() {
  const fs::path dir = support::scratch_dir("acceptance-impact");
  FleetConfig c = reference_mix(1000, 77);
  c.peak_default_fraction = 0.1;
  const GeneratedRun g = generate_and_run(dir, c);
  const RunReport r = report(dir / "out", g.csv);
  const double moved = 100.0 * r.impact->overall.fraction(ImpactCategory::MovedAndBetter);
  return {std::abs(moved - 10.0) <= 1.0,
          fmt("moved-and-better %.1f%% of %zu servers (planted 10%%)", moved, r.impact->overall.servers)};
}

Outcome scale_smoke() {
  const fs::path dir = support::scratch_dir("acceptance-scale");
  FleetConfig c = reference_mix(5000, 31337);
  c.weeks = 4;
  const fs::path csv = dir / "region.csv";
  {
    std::ofstream out(csv, std::ios::binary);
    generate_fleet(c, out);
  }
  const double gb = static_cast<double>(fs::file_size(csv)) / 1e9;
  PipelineConfig p;
  p.input = csv;
  p.out_dir = dir / "out";
  p.parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto t0 = Clock::now();
  const RunManifest m = run(p);
  const double secs = seconds_since(t0);
  const bool ok = m.exit_code == 0 && secs < 15 * 60;
  fs::remove_all(dir);  // the region file is large
  return {ok, fmt("5000 servers, %.2f GB CSV, run took %.1f s on %d thread(s)", gb, secs, p.parallelism)};
}

}  // namespace

int main(int argc, char** argv) {
  using Check = Outcome (*)();
  const std::pair<const char*, Check> checks[] = {
      {"LL window oracle equivalence", ll_window_oracle},
      {"bucket ratio oracle equivalence", bucket_ratio_oracle},
      {"error bound boundaries", boundary_suite},
      {"classification fidelity", classification_fidelity},
      {"persistent forecast fidelity", persistent_fidelity},
      {"predictability gate", predictability_gate},
      {"metric arithmetic", metric_arithmetic},
      {"determinism across parallelism", determinism},
      {"impact accounting", impact_accounting},
      {"scale smoke test", scale_smoke},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (int i = 0; i < 10; ++i) {
    if (!only.empty() && only.count(i + 1) == 0) continue;
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

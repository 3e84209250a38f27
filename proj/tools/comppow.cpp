/* Copyright 2026 The CompPow Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// comppow command-line front end. Talks to the simulator exclusively
// through the public C API in comppow/comppow.h.
//
//   comppow run <scenario.json> -o <dir>
//   comppow compare <base.json> <variant.json> -o <dir>
//   comppow sweep <scenario.json> --knob <k> --values v1,v2,... -o <dir>
//   comppow overlap <intervals.csv> -o <dir>
//
// Exit codes: 0 ok, 1 validation error, 2 runtime error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "comppow/comppow.h"

namespace {

namespace fs = std::filesystem;

struct ScenarioDeleter {
  void operator()(comppow_scenario_t* s) const { comppow_scenario_free(s); }
};
struct ResultDeleter {
  void operator()(comppow_result_t* r) const { comppow_result_free(r); }
};
struct ComparisonDeleter {
  void operator()(comppow_comparison_t* c) const { comppow_comparison_free(c); }
};

using ScenarioPtr = std::unique_ptr<comppow_scenario_t, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<comppow_result_t, ResultDeleter>;
using ComparisonPtr = std::unique_ptr<comppow_comparison_t, ComparisonDeleter>;

int fail(comppow_status st) {
  std::fprintf(stderr, "comppow: %s\n", comppow_last_error());
  return static_cast<int>(st);
}

ScenarioPtr load_scenario(const std::string& path, comppow_status* st) {
  comppow_scenario_t* raw = nullptr;
  // COMPPOW_SPEC_DIR is honored by the library when spec_dir is null.
  *st = comppow_scenario_load(path.c_str(), nullptr, &raw);
  return ScenarioPtr(raw);
}

bool ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) std::fprintf(stderr, "comppow: cannot create '%s': %s\n", dir.c_str(),
                       ec.message().c_str());
  return !ec;
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir) {
  comppow_status st;
  ScenarioPtr scenario = load_scenario(scenario_path, &st);
  if (!scenario) return fail(st);
  if (!ensure_dir(out_dir)) return 2;

  comppow_result_t* raw = nullptr;
  st = comppow_run(scenario.get(), &raw);
  ResultPtr result(raw);
  if (!result) return fail(st);

  st = comppow_result_write_trace_csv(result.get(), join(out_dir, "trace.csv").c_str());
  if (st != COMPPOW_OK) return fail(st);
  st = comppow_result_write_metrics_json(result.get(),
                                         join(out_dir, "metrics.json").c_str());
  if (st != COMPPOW_OK) return fail(st);
  st = comppow_scenario_write_effective_config(
      scenario.get(), join(out_dir, "effective_config.json").c_str());
  if (st != COMPPOW_OK) return fail(st);

  std::printf("run: makespan %.9g s, energy %.9g J -> %s\n",
              comppow_result_makespan_s(result.get()),
              comppow_result_energy_j(result.get(), COMPPOW_TOTAL),
              out_dir.c_str());
  return 0;
}

int cmd_compare(const std::string& base_path, const std::string& variant_path,
                const std::string& out_dir) {
  comppow_status st;
  ScenarioPtr base = load_scenario(base_path, &st);
  if (!base) return fail(st);
  ScenarioPtr variant = load_scenario(variant_path, &st);
  if (!variant) return fail(st);

  char digest_a[64], digest_b[64];
  if (comppow_scenario_spec_digest(base.get(), digest_a, sizeof(digest_a)) != COMPPOW_OK ||
      comppow_scenario_spec_digest(variant.get(), digest_b, sizeof(digest_b)) != COMPPOW_OK)
    return fail(COMPPOW_ERR_RUNTIME);
  if (std::string(digest_a) != digest_b) {
    std::fprintf(stderr, "comppow: scenarios use different GPU specs\n");
    return 1;
  }
  if (!ensure_dir(out_dir)) return 2;

  comppow_comparison_t* raw = nullptr;
  st = comppow_compare(base.get(), variant.get(), &raw);
  ComparisonPtr cmp(raw);
  if (!cmp) return fail(st);

  st = comppow_comparison_write_json(cmp.get(), join(out_dir, "comparison.json").c_str());
  if (st != COMPPOW_OK) return fail(st);

  std::printf("compare: savings %.4g%%, loss %.4g%% -> %s\n",
              comppow_comparison_savings_pct(cmp.get()),
              comppow_comparison_loss_pct(cmp.get()), out_dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& knob,
              const std::string& values_csv, const std::string& out_dir) {
  std::vector<double> values;
  {
    std::string tok;
    std::istringstream in(values_csv);
    while (std::getline(in, tok, ',')) {
      if (tok.empty()) continue;
      try {
        values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        std::fprintf(stderr, "comppow: bad sweep value '%s'\n", tok.c_str());
        return 1;
      }
    }
  }
  if (values.empty()) {
    std::fprintf(stderr, "comppow: empty sweep value list\n");
    return 1;
  }

  comppow_status st;
  ScenarioPtr baseline = load_scenario(scenario_path, &st);
  if (!baseline) return fail(st);
  if (!ensure_dir(out_dir)) return 2;

  comppow_result_t* base_raw = nullptr;
  st = comppow_run(baseline.get(), &base_raw);
  ResultPtr base_run(base_raw);
  if (!base_run) return fail(st);
  const double base_energy = comppow_result_energy_j(base_run.get(), COMPPOW_TOTAL);
  const double base_makespan = comppow_result_makespan_s(base_run.get());

  struct Row {
    double value, savings, loss;
  };
  std::vector<Row> rows;
  for (double v : values) {
    // Fresh scenario per value: knob application mutates the handle.
    ScenarioPtr variant = load_scenario(scenario_path, &st);
    if (!variant) return fail(st);
    if (knob == "power_cap")
      st = comppow_scenario_set_power_cap_w(variant.get(), v);
    else if (knob == "freq_cap")
      st = comppow_scenario_set_freq_cap_mhz(variant.get(), v);
    else if (knob.rfind("cu_alloc:", 0) == 0)
      st = comppow_scenario_set_cu_alloc(variant.get(),
                                         knob.substr(9).c_str(),
                                         static_cast<int>(v));
    else {
      std::fprintf(stderr, "comppow: unknown knob '%s'\n", knob.c_str());
      return 1;
    }
    if (st != COMPPOW_OK) {
      std::fprintf(stderr, "comppow: skipping value %g: %s\n", v,
                   comppow_last_error());
      continue;
    }
    comppow_result_t* run_raw = nullptr;
    st = comppow_run(variant.get(), &run_raw);
    ResultPtr run(run_raw);
    if (!run) return fail(st);
    const double energy = comppow_result_energy_j(run.get(), COMPPOW_TOTAL);
    const double makespan = comppow_result_makespan_s(run.get());
    rows.push_back(Row{v, (base_energy - energy) / base_energy * 100.0,
                       (makespan - base_makespan) / base_makespan * 100.0});
  }

  size_t best = 0;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].savings > rows[best].savings) best = i;

  std::ofstream out(join(out_dir, "sweep.csv"), std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "comppow: cannot write sweep.csv\n");
    return 2;
  }
  out << "value,savings_pct,loss_pct,max_savings_flag\n";
  char line[160];
  for (size_t i = 0; i < rows.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%d\n", rows[i].value,
                  rows[i].savings, rows[i].loss, !rows.empty() && i == best ? 1 : 0);
    out << line;
  }
  std::printf("sweep: %zu rows -> %s\n", rows.size(),
              join(out_dir, "sweep.csv").c_str());
  return 0;
}

int cmd_overlap(const std::string& csv_path, const std::string& out_dir) {
  if (!ensure_dir(out_dir)) return 2;
  const comppow_status st = comppow_overlap_from_csv(
      csv_path.c_str(), join(out_dir, "overlap.json").c_str());
  if (st != COMPPOW_OK) return fail(st);
  std::printf("overlap: -> %s\n", join(out_dir, "overlap.json").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"component-level GPU power simulator"};
  app.require_subcommand(1);

  std::string scenario_path, base_path, variant_path, csv_path;
  std::string out_dir = "out";
  std::string knob, values;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario");
  run->add_option("scenario", scenario_path, "scenario JSON")->required();
  run->add_option("-o,--out", out_dir, "output directory");

  CLI::App* compare = app.add_subcommand("compare", "baseline vs variant");
  compare->add_option("base", base_path, "baseline scenario JSON")->required();
  compare->add_option("variant", variant_path, "variant scenario JSON")->required();
  compare->add_option("-o,--out", out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep one actuator knob");
  sweep->add_option("scenario", scenario_path, "scenario JSON")->required();
  sweep->add_option("--knob", knob, "power_cap|freq_cap|cu_alloc:<kernel-id>")
      ->required();
  sweep->add_option("--values", values, "comma-separated knob values")->required();
  sweep->add_option("-o,--out", out_dir, "output directory");

  CLI::App* overlap = app.add_subcommand("overlap", "interval timeline accounting");
  overlap->add_option("intervals", csv_path, "intervals CSV")->required();
  overlap->add_option("-o,--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) return cmd_run(scenario_path, out_dir);
  if (compare->parsed()) return cmd_compare(base_path, variant_path, out_dir);
  if (sweep->parsed()) return cmd_sweep(scenario_path, knob, values, out_dir);
  if (overlap->parsed()) return cmd_overlap(csv_path, out_dir);
  return 1;
}

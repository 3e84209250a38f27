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

#ifndef COMPPOW_EXPERIMENT_HPP_
#define COMPPOW_EXPERIMENT_HPP_

#include <map>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "scenario.hpp"

namespace comppow {

// One finished run bundled with its post-run analytics.
struct RunResult {
  SimTrace trace;
  Metrics metrics;
  OverlapReport overlap;
  // Aggregate duration per op kind ("gemm", "all_gather").
  std::map<std::string, double> op_durations_s;
  std::map<std::string, std::string> kernel_ops;  // id -> op kind
};

RunResult run_and_analyze(const Scenario& scenario);

// Writes trace.csv, metrics.json and effective_config.json into out_dir.
void write_run_artifacts(const Scenario& scenario, const RunResult& result,
                         const std::string& out_dir);

struct ComparisonResult {
  double savings_pct = 0.0;
  double loss_pct = 0.0;
  PowerBreakdown energy_delta_j;  // base - variant, per component
  Metrics base;
  Metrics variant;
  std::map<std::string, double> base_op_durations_s;
  std::map<std::string, double> variant_op_durations_s;
};

// Runs both scenarios and reports the variant against the base. The
// scenarios must share a GPU spec.
ComparisonResult compare_scenarios(const Scenario& base, const Scenario& variant);

nlohmann::json comparison_to_json(const ComparisonResult& c);

struct SweepRow {
  double value = 0.0;
  double savings_pct = 0.0;
  double loss_pct = 0.0;
  bool max_savings = false;
};

enum class SweepKnob { PowerCap, FreqCap, CuAlloc };

struct SweepSpec {
  SweepKnob knob = SweepKnob::PowerCap;
  std::string kernel_id;  // CuAlloc only
};

// "power_cap" | "freq_cap" | "cu_alloc:<kernel-id>"
SweepSpec parse_sweep_knob(const std::string& text);

// Applies one knob value on top of a scenario's policy/allocation. Throws
// ValidationError for out-of-bounds values.
Scenario apply_knob(const Scenario& base, const SweepSpec& knob, double value);

// One comparison row per value against the unswept baseline. Out-of-bounds
// values are skipped with a warning pushed to `warnings`.
std::vector<SweepRow> sweep_scenario(const Scenario& base, const SweepSpec& knob,
                                     const std::vector<double>& values,
                                     std::vector<std::string>* warnings);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace comppow

#endif  // COMPPOW_EXPERIMENT_HPP_

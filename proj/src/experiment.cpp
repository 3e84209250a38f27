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

#include "experiment.hpp"

#include <algorithm>
#include <filesystem>

#include "io.hpp"

namespace comppow {

namespace fs = std::filesystem;
using nlohmann::json;

RunResult run_and_analyze(const Scenario& scenario) {
  RunResult r;
  r.trace = run_scenario(scenario);
  r.metrics = energy(r.trace);
  r.overlap = trace_overlap(r.trace);
  for (const KernelTimeline& tl : r.trace.timelines) {
    r.op_durations_s[tl.op] += tl.end_s - tl.start_s;
    r.kernel_ops[tl.id] = tl.op;
  }
  return r;
}

void write_run_artifacts(const Scenario& scenario, const RunResult& result,
                         const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw EngineError("cannot create output directory '" + out_dir + "'");
  write_trace_csv(result.trace, (fs::path(out_dir) / "trace.csv").string());
  write_json_file((fs::path(out_dir) / "metrics.json").string(),
                  metrics_to_json(result.metrics, result.overlap,
                                  result.trace.warnings));
  write_json_file((fs::path(out_dir) / "effective_config.json").string(),
                  effective_config_json(scenario));
}

ComparisonResult compare_scenarios(const Scenario& base, const Scenario& variant) {
  if (spec_digest(base.gpu) != spec_digest(variant.gpu))
    throw ValidationError("scenarios use different GPU specs and cannot be compared");

  const RunResult rb = run_and_analyze(base);
  const RunResult rv = run_and_analyze(variant);

  ComparisonResult c;
  c.base = rb.metrics;
  c.variant = rv.metrics;
  std::tie(c.savings_pct, c.loss_pct) = savings_and_loss(rb.metrics, rv.metrics);
  c.energy_delta_j =
      PowerBreakdown::make(rb.metrics.energy_j.xcd - rv.metrics.energy_j.xcd,
                           rb.metrics.energy_j.iod - rv.metrics.energy_j.iod,
                           rb.metrics.energy_j.hbm - rv.metrics.energy_j.hbm);
  c.base_op_durations_s = rb.op_durations_s;
  c.variant_op_durations_s = rv.op_durations_s;
  return c;
}

json comparison_to_json(const ComparisonResult& c) {
  json j;
  j["savings_pct"] = c.savings_pct;
  j["loss_pct"] = c.loss_pct;
  j["energy_delta_j"] = {{"xcd", c.energy_delta_j.xcd},
                         {"iod", c.energy_delta_j.iod},
                         {"hbm", c.energy_delta_j.hbm},
                         {"total", c.energy_delta_j.total}};
  j["base"] = {{"energy_j", c.base.energy_j.total},
               {"makespan_s", c.base.makespan_s}};
  j["variant"] = {{"energy_j", c.variant.energy_j.total},
                  {"makespan_s", c.variant.makespan_s}};

  json kernels = json::object();
  for (const auto& [id, base_s] : c.base.kernel_durations_s) {
    auto it = c.variant.kernel_durations_s.find(id);
    if (it == c.variant.kernel_durations_s.end()) continue;
    kernels[id] = {
        {"base_s", base_s},
        {"variant_s", it->second},
        {"improvement_pct", base_s > 0.0 ? (base_s - it->second) / base_s * 100.0 : 0.0}};
  }
  j["kernel_durations"] = kernels;

  json ops = json::object();
  for (const auto& [op, base_s] : c.base_op_durations_s) {
    auto it = c.variant_op_durations_s.find(op);
    if (it == c.variant_op_durations_s.end()) continue;
    ops[op] = {
        {"base_s", base_s},
        {"variant_s", it->second},
        {"improvement_pct", base_s > 0.0 ? (base_s - it->second) / base_s * 100.0 : 0.0}};
  }
  j["op_durations"] = ops;
  return j;
}

SweepSpec parse_sweep_knob(const std::string& text) {
  SweepSpec s;
  if (text == "power_cap") {
    s.knob = SweepKnob::PowerCap;
  } else if (text == "freq_cap") {
    s.knob = SweepKnob::FreqCap;
  } else if (text.rfind("cu_alloc:", 0) == 0) {
    s.knob = SweepKnob::CuAlloc;
    s.kernel_id = text.substr(std::string("cu_alloc:").size());
    if (s.kernel_id.empty())
      throw ValidationError("sweep knob 'cu_alloc:' needs a kernel id");
  } else {
    throw ValidationError("unknown sweep knob '" + text +
                          "' (power_cap|freq_cap|cu_alloc:<kernel-id>)");
  }
  return s;
}

Scenario apply_knob(const Scenario& base, const SweepSpec& knob, double value) {
  Scenario s = base;
  switch (knob.knob) {
    case SweepKnob::PowerCap:
      switch (s.policy.kind) {
        case PolicyConfig::Kind::Baseline:
          s.policy.kind = PolicyConfig::Kind::PowerCap;
          s.policy.power_cap_w = value;
          break;
        case PolicyConfig::Kind::FreqCap:
          s.policy.kind = PolicyConfig::Kind::Combined;
          s.policy.power_cap_w = value;
          break;
        default:
          s.policy.power_cap_w = value;
          if (s.policy.kind == PolicyConfig::Kind::CompPowAuto)
            throw ValidationError("cannot sweep power_cap under comppow_auto");
          break;
      }
      break;
    case SweepKnob::FreqCap:
      switch (s.policy.kind) {
        case PolicyConfig::Kind::Baseline:
          s.policy.kind = PolicyConfig::Kind::FreqCap;
          s.policy.freq_cap_mhz = value;
          break;
        case PolicyConfig::Kind::PowerCap:
          s.policy.kind = PolicyConfig::Kind::Combined;
          s.policy.freq_cap_mhz = value;
          break;
        default:
          s.policy.freq_cap_mhz = value;
          if (s.policy.kind == PolicyConfig::Kind::CompPowAuto)
            throw ValidationError("cannot sweep freq_cap under comppow_auto");
          break;
      }
      break;
    case SweepKnob::CuAlloc: {
      const double rounded = std::round(value);
      if (rounded != value)
        throw ValidationError("cu_alloc sweep values must be whole CU counts");
      s.cu_alloc[knob.kernel_id] = static_cast<int>(rounded);
      break;
    }
  }
  validate_scenario(s);
  return s;
}

std::vector<SweepRow> sweep_scenario(const Scenario& base, const SweepSpec& knob,
                                     const std::vector<double>& values,
                                     std::vector<std::string>* warnings) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");

  const RunResult baseline = run_and_analyze(base);

  std::vector<SweepRow> rows;
  for (double v : values) {
    Scenario variant;
    try {
      variant = apply_knob(base, knob, v);
    } catch (const ValidationError& e) {
      if (warnings)
        warnings->push_back("skipping value " + fmt9(v) + ": " + e.what());
      continue;
    }
    const RunResult rv = run_and_analyze(variant);
    const auto [savings, loss] = savings_and_loss(baseline.metrics, rv.metrics);
    rows.push_back(SweepRow{v, savings, loss, false});
  }
  if (!rows.empty()) {
    auto best = std::max_element(rows.begin(), rows.end(),
                                 [](const SweepRow& a, const SweepRow& b) {
                                   return a.savings_pct < b.savings_pct;
                                 });
    best->max_savings = true;
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,savings_pct,loss_pct,max_savings_flag\n";
  for (const SweepRow& r : rows) {
    out += fmt9(r.value);
    out += ',';
    out += fmt9(r.savings_pct);
    out += ',';
    out += fmt9(r.loss_pct);
    out += ',';
    out += r.max_savings ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace comppow

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

#include "comppow/comppow.h"

#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "experiment.hpp"
#include "io.hpp"

// Handle definitions. The public types are opaque; they own the C++ state.
struct comppow_scenario_t {
  comppow::Scenario scenario;
};

struct comppow_result_t {
  comppow::RunResult result;
  std::vector<std::string> kernel_order;  // completion order, stable
};

struct comppow_comparison_t {
  comppow::ComparisonResult cmp;
};

namespace {

thread_local std::string g_last_error;

comppow_status set_error(comppow_status st, const std::string& message) {
  g_last_error = message;
  return st;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
comppow_status guarded(Fn&& fn) {
  try {
    fn();
    return COMPPOW_OK;
  } catch (const comppow::ValidationError& e) {
    return set_error(COMPPOW_ERR_VALIDATION, e.what());
  } catch (const comppow::EngineError& e) {
    return set_error(COMPPOW_ERR_RUNTIME, e.what());
  } catch (const std::exception& e) {
    return set_error(COMPPOW_ERR_RUNTIME, e.what());
  }
}

comppow_status copy_out(const std::string& s, char* buf, size_t buf_len) {
  if (!buf || buf_len == 0)
    return set_error(COMPPOW_ERR_VALIDATION, "output buffer is null or empty");
  if (s.size() + 1 > buf_len)
    return set_error(COMPPOW_ERR_VALIDATION, "output buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return COMPPOW_OK;
}

double breakdown_value(const comppow::PowerBreakdown& b, comppow_component c) {
  switch (c) {
    case COMPPOW_XCD: return b.xcd;
    case COMPPOW_IOD: return b.iod;
    case COMPPOW_HBM: return b.hbm;
    case COMPPOW_TOTAL: return b.total;
  }
  return 0.0;
}

}  // namespace

extern "C" {

const char* comppow_version(void) { return "1.0.0"; }

const char* comppow_last_error(void) { return g_last_error.c_str(); }

comppow_status comppow_scenario_load(const char* path, const char* spec_dir,
                                     comppow_scenario_t** out) {
  if (!path || !out)
    return set_error(COMPPOW_ERR_VALIDATION, "path and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<comppow_scenario_t>();
    if (spec_dir) {
      const std::string dir(spec_dir);
      handle->scenario = comppow::parse_scenario(path, &dir);
    } else {
      handle->scenario = comppow::parse_scenario(path);
    }
    *out = handle.release();
  });
}

void comppow_scenario_free(comppow_scenario_t* s) { delete s; }

comppow_status comppow_scenario_set_power_cap_w(comppow_scenario_t* s,
                                                double watts) {
  if (!s) return set_error(COMPPOW_ERR_VALIDATION, "null scenario");
  return guarded([&] {
    const comppow::SweepSpec knob{comppow::SweepKnob::PowerCap, ""};
    s->scenario = comppow::apply_knob(s->scenario, knob, watts);
  });
}

comppow_status comppow_scenario_set_freq_cap_mhz(comppow_scenario_t* s,
                                                 double mhz) {
  if (!s) return set_error(COMPPOW_ERR_VALIDATION, "null scenario");
  return guarded([&] {
    const comppow::SweepSpec knob{comppow::SweepKnob::FreqCap, ""};
    s->scenario = comppow::apply_knob(s->scenario, knob, mhz);
  });
}

comppow_status comppow_scenario_set_cu_alloc(comppow_scenario_t* s,
                                             const char* kernel_id, int cus) {
  if (!s || !kernel_id)
    return set_error(COMPPOW_ERR_VALIDATION, "null scenario or kernel id");
  return guarded([&] {
    const comppow::SweepSpec knob{comppow::SweepKnob::CuAlloc, kernel_id};
    s->scenario = comppow::apply_knob(s->scenario, knob, static_cast<double>(cus));
  });
}

comppow_status comppow_scenario_spec_digest(const comppow_scenario_t* s,
                                            char* buf, size_t buf_len) {
  if (!s) return set_error(COMPPOW_ERR_VALIDATION, "null scenario");
  return copy_out(comppow::spec_digest(s->scenario.gpu), buf, buf_len);
}

comppow_status comppow_scenario_write_effective_config(
    const comppow_scenario_t* s, const char* path) {
  if (!s || !path) return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  return guarded([&] {
    comppow::write_json_file(path, comppow::effective_config_json(s->scenario));
  });
}

comppow_status comppow_run(const comppow_scenario_t* s, comppow_result_t** out) {
  if (!s || !out) return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<comppow_result_t>();
    handle->result = comppow::run_and_analyze(s->scenario);
    for (const comppow::KernelTimeline& tl : handle->result.trace.timelines) {
      if (std::find(handle->kernel_order.begin(), handle->kernel_order.end(),
                    tl.id) == handle->kernel_order.end())
        handle->kernel_order.push_back(tl.id);
    }
    *out = handle.release();
  });
}

void comppow_result_free(comppow_result_t* r) { delete r; }

double comppow_result_makespan_s(const comppow_result_t* r) {
  return r ? r->result.metrics.makespan_s : 0.0;
}

double comppow_result_energy_j(const comppow_result_t* r, comppow_component c) {
  return r ? breakdown_value(r->result.metrics.energy_j, c) : 0.0;
}

double comppow_result_avg_power_w(const comppow_result_t* r,
                                  comppow_component c) {
  return r ? breakdown_value(r->result.metrics.avg_power_w, c) : 0.0;
}

int comppow_result_kernel_count(const comppow_result_t* r) {
  return r ? static_cast<int>(r->kernel_order.size()) : 0;
}

comppow_status comppow_result_kernel_id(const comppow_result_t* r, int index,
                                        char* buf, size_t buf_len) {
  if (!r) return set_error(COMPPOW_ERR_VALIDATION, "null result");
  if (index < 0 || index >= static_cast<int>(r->kernel_order.size()))
    return set_error(COMPPOW_ERR_VALIDATION, "kernel index out of range");
  return copy_out(r->kernel_order[static_cast<size_t>(index)], buf, buf_len);
}

comppow_status comppow_result_kernel_op(const comppow_result_t* r,
                                        const char* kernel_id, char* buf,
                                        size_t buf_len) {
  if (!r || !kernel_id) return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  auto it = r->result.kernel_ops.find(kernel_id);
  if (it == r->result.kernel_ops.end())
    return set_error(COMPPOW_ERR_VALIDATION,
                     std::string("unknown kernel id '") + kernel_id + "'");
  return copy_out(it->second, buf, buf_len);
}

comppow_status comppow_result_kernel_duration_s(const comppow_result_t* r,
                                                const char* kernel_id,
                                                double* out) {
  if (!r || !kernel_id || !out)
    return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  auto it = r->result.metrics.kernel_durations_s.find(kernel_id);
  if (it == r->result.metrics.kernel_durations_s.end())
    return set_error(COMPPOW_ERR_VALIDATION,
                     std::string("unknown kernel id '") + kernel_id + "'");
  *out = it->second;
  return COMPPOW_OK;
}

comppow_status comppow_result_write_trace_csv(const comppow_result_t* r,
                                              const char* path) {
  if (!r || !path) return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  return guarded([&] { comppow::write_trace_csv(r->result.trace, path); });
}

comppow_status comppow_result_write_metrics_json(const comppow_result_t* r,
                                                 const char* path) {
  if (!r || !path) return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  return guarded([&] {
    comppow::write_json_file(
        path, comppow::metrics_to_json(r->result.metrics, r->result.overlap,
                                       r->result.trace.warnings));
  });
}

comppow_status comppow_compare(const comppow_scenario_t* base,
                               const comppow_scenario_t* variant,
                               comppow_comparison_t** out) {
  if (!base || !variant || !out)
    return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<comppow_comparison_t>();
    handle->cmp = comppow::compare_scenarios(base->scenario, variant->scenario);
    *out = handle.release();
  });
}

void comppow_comparison_free(comppow_comparison_t* c) { delete c; }

double comppow_comparison_savings_pct(const comppow_comparison_t* c) {
  return c ? c->cmp.savings_pct : 0.0;
}

double comppow_comparison_loss_pct(const comppow_comparison_t* c) {
  return c ? c->cmp.loss_pct : 0.0;
}

double comppow_comparison_energy_delta_j(const comppow_comparison_t* c,
                                         comppow_component comp) {
  return c ? breakdown_value(c->cmp.energy_delta_j, comp) : 0.0;
}

comppow_status comppow_comparison_op_duration_s(const comppow_comparison_t* c,
                                                const char* op, int which,
                                                double* out) {
  if (!c || !op || !out) return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  const auto& durations =
      which == 0 ? c->cmp.base_op_durations_s : c->cmp.variant_op_durations_s;
  auto it = durations.find(op);
  if (it == durations.end())
    return set_error(COMPPOW_ERR_VALIDATION,
                     std::string("no kernels of op '") + op + "'");
  *out = it->second;
  return COMPPOW_OK;
}

comppow_status comppow_comparison_kernel_duration_s(
    const comppow_comparison_t* c, const char* kernel_id, int which,
    double* out) {
  if (!c || !kernel_id || !out)
    return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  const auto& durations = which == 0 ? c->cmp.base.kernel_durations_s
                                     : c->cmp.variant.kernel_durations_s;
  auto it = durations.find(kernel_id);
  if (it == durations.end())
    return set_error(COMPPOW_ERR_VALIDATION,
                     std::string("unknown kernel id '") + kernel_id + "'");
  *out = it->second;
  return COMPPOW_OK;
}

comppow_status comppow_comparison_write_json(const comppow_comparison_t* c,
                                             const char* path) {
  if (!c || !path) return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  return guarded(
      [&] { comppow::write_json_file(path, comppow::comparison_to_json(c->cmp)); });
}

comppow_status comppow_overlap_from_csv(const char* intervals_csv_path,
                                        const char* out_json_path) {
  if (!intervals_csv_path || !out_json_path)
    return set_error(COMPPOW_ERR_VALIDATION, "null argument");
  return guarded([&] {
    std::vector<comppow::IntervalRecord> intervals =
        comppow::read_intervals_csv(intervals_csv_path);
    double makespan = 0.0;
    for (const comppow::IntervalRecord& iv : intervals)
      makespan = std::max(makespan, iv.end_s);
    const comppow::OverlapReport rep =
        comppow::overlap_accounting(std::move(intervals), makespan);
    comppow::write_json_file(out_json_path, comppow::overlap_to_json(rep));
  });
}

}  // extern "C"

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

/* Public C interface to the CompPow simulator.
 *
 * The library is a deterministic simulator of component-level (XCD/IOD/HBM)
 * GPU power behavior with a pluggable power-management policy engine.
 * All state lives behind opaque handles; every fallible call returns a
 * comppow_status and leaves a human-readable message in
 * comppow_last_error() (thread local).
 */

#ifndef COMPPOW_COMPPOW_H_
#define COMPPOW_COMPPOW_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum comppow_status {
  COMPPOW_OK = 0,
  COMPPOW_ERR_VALIDATION = 1, /* bad input: scenario, spec, knob value */
  COMPPOW_ERR_RUNTIME = 2     /* engine stall, I/O failure, internal error */
} comppow_status;

typedef enum comppow_component {
  COMPPOW_XCD = 0,
  COMPPOW_IOD = 1,
  COMPPOW_HBM = 2,
  COMPPOW_TOTAL = 3
} comppow_component;

/* Opaque handles. */
typedef struct comppow_scenario_t comppow_scenario_t;
typedef struct comppow_result_t comppow_result_t;
typedef struct comppow_comparison_t comppow_comparison_t;

const char* comppow_version(void);

/* Message for the most recent failing call on this thread. Never NULL. */
const char* comppow_last_error(void);

/* ---- Scenario lifecycle ------------------------------------------------ */

/* Loads and fully validates a scenario JSON file. spec_dir may be NULL; when
 * set it takes precedence over the COMPPOW_SPEC_DIR environment variable as
 * the GPU-spec search path. */
comppow_status comppow_scenario_load(const char* path, const char* spec_dir,
                                     comppow_scenario_t** out);
void comppow_scenario_free(comppow_scenario_t* s);

/* Sweep knobs. Values outside the actuator bounds fail validation and leave
 * the scenario untouched. */
comppow_status comppow_scenario_set_power_cap_w(comppow_scenario_t* s,
                                                double watts);
comppow_status comppow_scenario_set_freq_cap_mhz(comppow_scenario_t* s,
                                                 double mhz);
comppow_status comppow_scenario_set_cu_alloc(comppow_scenario_t* s,
                                             const char* kernel_id, int cus);

/* Stable digest of the resolved GPU spec; two scenarios are comparable only
 * when their digests match. */
comppow_status comppow_scenario_spec_digest(const comppow_scenario_t* s,
                                            char* buf, size_t buf_len);

comppow_status comppow_scenario_write_effective_config(
    const comppow_scenario_t* s, const char* path);

/* ---- Running ----------------------------------------------------------- */

comppow_status comppow_run(const comppow_scenario_t* s, comppow_result_t** out);
void comppow_result_free(comppow_result_t* r);

double comppow_result_makespan_s(const comppow_result_t* r);
double comppow_result_energy_j(const comppow_result_t* r, comppow_component c);
double comppow_result_avg_power_w(const comppow_result_t* r,
                                  comppow_component c);

int comppow_result_kernel_count(const comppow_result_t* r);
comppow_status comppow_result_kernel_id(const comppow_result_t* r, int index,
                                        char* buf, size_t buf_len);
/* Writes "gemm" or "all_gather". */
comppow_status comppow_result_kernel_op(const comppow_result_t* r,
                                        const char* kernel_id, char* buf,
                                        size_t buf_len);
comppow_status comppow_result_kernel_duration_s(const comppow_result_t* r,
                                                const char* kernel_id,
                                                double* out);

comppow_status comppow_result_write_trace_csv(const comppow_result_t* r,
                                              const char* path);
comppow_status comppow_result_write_metrics_json(const comppow_result_t* r,
                                                 const char* path);

/* ---- Comparisons (baseline vs variant) --------------------------------- */

/* Runs both scenarios (they must share a GPU spec) and reports energy
 * savings and performance loss of the variant relative to the base. */
comppow_status comppow_compare(const comppow_scenario_t* base,
                               const comppow_scenario_t* variant,
                               comppow_comparison_t** out);
void comppow_comparison_free(comppow_comparison_t* c);

double comppow_comparison_savings_pct(const comppow_comparison_t* c);
double comppow_comparison_loss_pct(const comppow_comparison_t* c);
double comppow_comparison_energy_delta_j(const comppow_comparison_t* c,
                                         comppow_component comp);
/* Aggregate duration over all kernels of one op kind ("gemm"/"all_gather");
 * which = 0 selects the base run, 1 the variant. */
comppow_status comppow_comparison_op_duration_s(const comppow_comparison_t* c,
                                                const char* op, int which,
                                                double* out);
comppow_status comppow_comparison_kernel_duration_s(
    const comppow_comparison_t* c, const char* kernel_id, int which,
    double* out);
comppow_status comppow_comparison_write_json(const comppow_comparison_t* c,
                                             const char* path);

/* ---- Timeline analysis ------------------------------------------------- */

/* Reads a `stream,category,start_s,end_s` interval CSV and writes the
 * exposed/overlapped accounting report as JSON. */
comppow_status comppow_overlap_from_csv(const char* intervals_csv_path,
                                        const char* out_json_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COMPPOW_COMPPOW_H_ */

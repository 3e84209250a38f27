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

#ifndef COMPPOW_POLICY_HPP_
#define COMPPOW_POLICY_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "actuators.hpp"
#include "workload.hpp"

namespace comppow {

struct PolicyConfig {
  enum class Kind { Baseline, PowerCap, FreqCap, Combined, CompPowAuto };

  Kind kind = Kind::Baseline;
  double power_cap_w = 0.0;   // PowerCap / Combined
  double freq_cap_mhz = 0.0;  // FreqCap / Combined

  // CompPowAuto knobs.
  double cap_ratio = 0.78;          // frequency cap for data-movement phases
  double ewma_lambda = 0.5;         // online-affinity smoothing
  int warmup_iters = 2;             // observations before learned affinity counts
  int reallocation_floor_cus = 8;   // CU floor for the traded-off kernel

  static const char* kind_name(Kind k);
};

void validate_policy(const PolicyConfig& cfg, const ValidatedSpec& spec);

// Online-learned component affinity per kernel id.
struct AffinityRecord {
  ComponentArray ewma{};  // EWMA of observed per-component utilization
  int count = 0;          // completed observations
};
using AffinityHistory = std::map<std::string, AffinityRecord>;

// EWMA update e <- lambda*obs + (1-lambda)*e; the first observation
// initializes e = obs. Returns the updated history.
AffinityHistory learn_affinity_online(AffinityHistory history,
                                      const std::string& kernel_id,
                                      const ComponentArray& observed,
                                      double lambda);

// Learned affinity once warmup observations exist; argmax with ties broken
// Xcd > Iod > Hbm.
std::optional<ComponentKind> learned_affinity(const AffinityHistory& history,
                                              const std::string& kernel_id,
                                              int warmup_iters);

// What a policy may observe about one active kernel. Deliberately excludes
// internals such as remaining duration.
struct ActiveKernelInfo {
  std::string id;
  bool is_gemm = false;
  DemandVector demand;
  Criticality criticality = Criticality::Unspecified;
  std::optional<ComponentKind> affinity_hint;
  // Hinted utilization of the currently executing phase, when the kernel
  // carries phase hints.
  std::optional<ComponentArray> phase_utilization;
};

struct PolicySnapshot {
  std::vector<ActiveKernelInfo> active;
  std::map<std::string, int> default_cu_alloc;  // scenario-configured CUs
};

// Resolves the actuator settings for one control step. Appends to
// `warnings` when it has to fall back (e.g. conflicting criticality hints).
ActuatorSettings apply_policy(const PolicyConfig& cfg,
                              const PolicySnapshot& snapshot,
                              const AffinityHistory& history,
                              const ValidatedSpec& spec,
                              std::vector<std::string>* warnings);

// Per-phase actuator settings for a phase-hinted kernel: full clock for
// compute-leaning phases, cap_ratio*f_max for movement-leaning ones.
// Phase fractions must sum to 1 (1e-9 tolerance).
std::vector<ActuatorSettings> phase_budgets(const std::vector<PhaseHint>& phases,
                                            const PolicyConfig& cfg,
                                            const ValidatedSpec& spec);

}  // namespace comppow

#endif  // COMPPOW_POLICY_HPP_

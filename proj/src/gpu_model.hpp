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

#ifndef COMPPOW_GPU_MODEL_HPP_
#define COMPPOW_GPU_MODEL_HPP_

#include <cstdint>
#include <string>

#include "types.hpp"

namespace comppow {

// Power parameters of one component (die). Dynamic power scales linearly
// with utilization and polynomially with the governed clock:
//   P = idle_power + u * dyn_power_max * (f / f_ref)^freq_exponent
struct ComponentSpec {
  double idle_power_w = 0.0;
  double dyn_power_max_w = 0.0;  // dynamic power at u=1.0 and f=f_ref
  double freq_exponent = 0.0;    // 0 for components not on the GPU clock
};

// The simulated machine. Only the XCD (GPU) clock is a controllable
// frequency domain; IOD and HBM clocks are fixed in this model.
struct GpuSpec {
  std::string name;
  std::array<ComponentSpec, 3> components{};  // indexed by ComponentKind

  double f_min_mhz = 0.0;
  double f_max_mhz = 0.0;
  double f_ref_mhz = 0.0;
  double tdp_w = 0.0;
  std::int64_t cu_total = 0;

  double peak_flops = 0.0;        // flop/s at f_max with all CUs
  double hbm_bw = 0.0;            // bytes/s
  double iod_bw = 0.0;            // bytes/s
  double link_bw = 0.0;           // bytes/s, aggregate inter-GPU
  double copy_rate_per_cu = 0.0;  // bytes/s per CU at f_ref
  double copy_freq_exponent = 1.0;

  const ComponentSpec& component(ComponentKind k) const {
    return components[static_cast<size_t>(k)];
  }
  ComponentSpec& component(ComponentKind k) {
    return components[static_cast<size_t>(k)];
  }
  double sum_idle_power() const {
    return components[0].idle_power_w + components[1].idle_power_w +
           components[2].idle_power_w;
  }
};

class ValidatedSpec;
ValidatedSpec validate_spec(const GpuSpec& spec);

// A GpuSpec that passed validate_spec(). The engine only accepts this type.
class ValidatedSpec {
 public:
  const GpuSpec& get() const { return spec_; }
  const GpuSpec* operator->() const { return &spec_; }
  const GpuSpec& operator*() const { return spec_; }

  // peak_flops / hbm_bw; the compute-vs-movement affinity threshold.
  double machine_balance() const { return spec_.peak_flops / spec_.hbm_bw; }

 private:
  friend ValidatedSpec validate_spec(const GpuSpec&);
  explicit ValidatedSpec(GpuSpec spec) : spec_(std::move(spec)) {}
  GpuSpec spec_;
};

// P = idle + u * dyn_max * (f/f_ref)^alpha. Utilization outside [0,1] is a
// contract violation and throws; it is never silently clamped.
double component_power(const ComponentSpec& cspec, double utilization,
                       double f_mhz, double f_ref_mhz);

// Whole-GPU power at clock f for the given per-component utilizations.
PowerBreakdown gpu_power(const ValidatedSpec& spec, double f_mhz,
                         const ComponentArray& utilization);

// peak_flops * (f/f_max) * cu_frac. cu_frac must be in (0, 1].
double peak_compute_tp(const ValidatedSpec& spec, double f_mhz,
                       double cu_frac);

}  // namespace comppow

#endif  // COMPPOW_GPU_MODEL_HPP_

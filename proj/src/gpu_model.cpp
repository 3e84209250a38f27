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

#include "gpu_model.hpp"

#include <cmath>
#include <vector>

namespace comppow {

ValidatedSpec validate_spec(const GpuSpec& spec) {
  std::vector<std::string> bad;

  for (ComponentKind k : kAllComponents) {
    const ComponentSpec& c = spec.component(k);
    const std::string who = to_string(k);
    if (c.idle_power_w < 0.0) bad.push_back(who + ": negative idle power");
    if (c.dyn_power_max_w < 0.0) bad.push_back(who + ": negative dynamic power");
    if (c.freq_exponent < 0.0) bad.push_back(who + ": negative frequency exponent");
    if (!(c.idle_power_w + c.dyn_power_max_w > 0.0))
      bad.push_back(who + ": zero power envelope (idle + dyn_max must be > 0)");
  }

  if (!(spec.f_min_mhz > 0.0)) bad.push_back("f_min must be positive");
  if (spec.f_min_mhz > spec.f_max_mhz) bad.push_back("frequency domain inverted (f_min > f_max)");
  if (spec.f_ref_mhz < spec.f_min_mhz || spec.f_ref_mhz > spec.f_max_mhz)
    bad.push_back("f_ref outside [f_min, f_max]");
  if (!(spec.tdp_w > spec.sum_idle_power()))
    bad.push_back("no dynamic headroom (tdp must exceed total idle power)");
  if (spec.cu_total < 1) bad.push_back("cu_total must be >= 1");

  if (!(spec.peak_flops > 0.0)) bad.push_back("peak_flops must be positive");
  if (!(spec.hbm_bw > 0.0)) bad.push_back("hbm_bw must be positive");
  if (!(spec.iod_bw > 0.0)) bad.push_back("iod_bw must be positive");
  if (!(spec.link_bw > 0.0)) bad.push_back("link_bw must be positive");
  if (!(spec.copy_rate_per_cu > 0.0)) bad.push_back("copy_rate_per_cu must be positive");
  if (spec.copy_freq_exponent < 0.0 || spec.copy_freq_exponent > 1.0)
    bad.push_back("copy_freq_exponent outside [0, 1]");

  if (!bad.empty()) throw ValidationError(std::move(bad));
  return ValidatedSpec(spec);
}

double component_power(const ComponentSpec& cspec, double utilization,
                       double f_mhz, double f_ref_mhz) {
  if (!(utilization >= 0.0 && utilization <= 1.0))
    throw ValidationError("utilization outside [0, 1]: " + std::to_string(utilization));
  if (!(f_ref_mhz > 0.0)) throw ValidationError("f_ref must be positive");
  double scale = 1.0;
  if (cspec.freq_exponent != 0.0)
    scale = std::pow(f_mhz / f_ref_mhz, cspec.freq_exponent);
  return cspec.idle_power_w + utilization * cspec.dyn_power_max_w * scale;
}

PowerBreakdown gpu_power(const ValidatedSpec& spec, double f_mhz,
                         const ComponentArray& utilization) {
  const GpuSpec& g = spec.get();
  return PowerBreakdown::make(
      component_power(g.component(ComponentKind::Xcd), at(utilization, ComponentKind::Xcd), f_mhz, g.f_ref_mhz),
      component_power(g.component(ComponentKind::Iod), at(utilization, ComponentKind::Iod), f_mhz, g.f_ref_mhz),
      component_power(g.component(ComponentKind::Hbm), at(utilization, ComponentKind::Hbm), f_mhz, g.f_ref_mhz));
}

double peak_compute_tp(const ValidatedSpec& spec, double f_mhz,
                       double cu_frac) {
  if (!(cu_frac > 0.0 && cu_frac <= 1.0))
    throw ValidationError("cu_frac outside (0, 1]: " + std::to_string(cu_frac));
  return spec->peak_flops * (f_mhz / spec->f_max_mhz) * cu_frac;
}

}  // namespace comppow

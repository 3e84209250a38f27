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

#ifndef COMPPOW_ACTUATORS_HPP_
#define COMPPOW_ACTUATORS_HPP_

#include <map>
#include <string>
#include <vector>

#include "gpu_model.hpp"

namespace comppow {

// The control surface a power-management policy can set each step.
struct ActuatorSettings {
  double freq_cap_mhz = 0.0;
  double power_cap_w = 0.0;
  // Explicit CU counts per kernel id. Active kernels absent from the map
  // share the remaining CUs equally.
  std::map<std::string, int> cu_alloc;
};

// Enforced before every step. `active_ids` are the kernels the allocation
// must cover.
void validate_settings(const ActuatorSettings& s, const ValidatedSpec& spec,
                       const std::vector<std::string>& active_ids);

}  // namespace comppow

#endif  // COMPPOW_ACTUATORS_HPP_

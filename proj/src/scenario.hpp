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

#ifndef COMPPOW_SCENARIO_HPP_
#define COMPPOW_SCENARIO_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "policy.hpp"
#include "workload.hpp"

namespace comppow {

struct StreamDef {
  std::string name;
  std::vector<KernelDesc> kernels;  // run in order
};

// A complete experiment description: machine, kernels, policy, timing.
struct Scenario {
  GpuSpec gpu;
  std::string spec_source;  // resolved path, or "<inline>"
  std::vector<StreamDef> streams;  // at most two
  PolicyConfig policy;
  double dt_s = 1e-4;
  int iterations = 1;
  std::map<std::string, int> cu_alloc;  // default per-kernel CU counts

  std::vector<const KernelDesc*> all_kernels() const;
};

// Load + validate. `spec_dir_override` wins over the COMPPOW_SPEC_DIR
// environment variable when resolving a spec referenced by file name.
Scenario parse_scenario(const std::string& path,
                        const std::string* spec_dir_override = nullptr);
Scenario scenario_from_json(const nlohmann::json& j,
                            const std::string& base_dir,
                            const std::string* spec_dir_override = nullptr);

// Throws ValidationError listing every violation (field paths included).
void validate_scenario(const Scenario& s);

// Effective configuration with every default applied; parsing its dump
// yields the same scenario again.
nlohmann::json effective_config_json(const Scenario& s);

GpuSpec gpu_spec_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json gpu_spec_to_json(const GpuSpec& spec);

// Stable content digest of a spec; used to refuse cross-spec comparisons.
std::string spec_digest(const GpuSpec& spec);

nlohmann::json policy_to_json(const PolicyConfig& p);

}  // namespace comppow

#endif  // COMPPOW_SCENARIO_HPP_

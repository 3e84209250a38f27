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

#include "scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace comppow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path.empty() ? msg : path + ": " + msg);
}

const json& require(const json& j, const std::string& key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) fail(ctx.empty() ? key : ctx + "." + key, "missing required field");
  return *it;
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = require(j, key, ctx);
  if (!v.is_number()) fail(ctx + "." + key, "expected a number");
  return v.get<double>();
}

std::int64_t require_int(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = require(j, key, ctx);
  if (!v.is_number_integer()) fail(ctx + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string require_string(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = require(j, key, ctx);
  if (!v.is_string()) fail(ctx + "." + key, "expected a string");
  return v.get<std::string>();
}

ComponentSpec component_from_json(const json& j, const std::string& ctx) {
  ComponentSpec c;
  c.idle_power_w = require_number(j, "idle_power_w", ctx);
  c.dyn_power_max_w = require_number(j, "dyn_power_max_w", ctx);
  c.freq_exponent = j.value("freq_exponent", 0.0);
  return c;
}

Criticality criticality_from_string(const std::string& s, const std::string& ctx) {
  if (s == "critical") return Criticality::Critical;
  if (s == "deferrable") return Criticality::Deferrable;
  if (s == "unspecified") return Criticality::Unspecified;
  fail(ctx, "unknown criticality '" + s + "' (critical|deferrable|unspecified)");
}

KernelDesc kernel_from_json(const json& j, const std::string& ctx) {
  KernelDesc k;
  k.id = require_string(j, "id", ctx);
  const std::string op = require_string(j, "op", ctx);
  if (op == "gemm") {
    GemmOp g;
    g.m = require_int(j, "m", ctx);
    g.n = require_int(j, "n", ctx);
    g.k = require_int(j, "k", ctx);
    g.dtype_bytes = static_cast<int>(j.value("dtype_bytes", 2));
    g.traffic_multiplier = j.value("traffic_multiplier", 1.0);
    k.op = g;
  } else if (op == "all_gather") {
    AllGatherOp a;
    a.total_bytes = require_int(j, "total_bytes", ctx);
    a.world_size = static_cast<int>(j.value("world_size", 8));
    k.op = a;
  } else {
    fail(ctx + ".op", "unknown op '" + op + "' (gemm|all_gather)");
  }

  if (j.contains("criticality"))
    k.criticality = criticality_from_string(j["criticality"].get<std::string>(),
                                            ctx + ".criticality");
  if (j.contains("affinity_hint")) {
    const std::string h = j["affinity_hint"].get<std::string>();
    auto kind = component_from_string(h);
    if (!kind) fail(ctx + ".affinity_hint", "unknown component '" + h + "'");
    k.affinity_hint = *kind;
  }
  if (j.contains("phases")) {
    for (size_t i = 0; i < j["phases"].size(); ++i) {
      const json& pj = j["phases"][i];
      const std::string pctx = ctx + ".phases[" + std::to_string(i) + "]";
      PhaseHint p;
      p.fraction = require_number(pj, "fraction", pctx);
      at(p.utilization, ComponentKind::Xcd) = require_number(pj, "u_xcd", pctx);
      at(p.utilization, ComponentKind::Iod) = require_number(pj, "u_iod", pctx);
      at(p.utilization, ComponentKind::Hbm) = require_number(pj, "u_hbm", pctx);
      k.phases.push_back(p);
    }
  }
  return k;
}

json kernel_to_json(const KernelDesc& k) {
  json j;
  j["id"] = k.id;
  if (const GemmOp* g = std::get_if<GemmOp>(&k.op)) {
    j["op"] = "gemm";
    j["m"] = g->m;
    j["n"] = g->n;
    j["k"] = g->k;
    j["dtype_bytes"] = g->dtype_bytes;
    j["traffic_multiplier"] = g->traffic_multiplier;
  } else {
    const AllGatherOp& a = std::get<AllGatherOp>(k.op);
    j["op"] = "all_gather";
    j["total_bytes"] = a.total_bytes;
    j["world_size"] = a.world_size;
  }
  switch (k.criticality) {
    case Criticality::Critical: j["criticality"] = "critical"; break;
    case Criticality::Deferrable: j["criticality"] = "deferrable"; break;
    case Criticality::Unspecified: j["criticality"] = "unspecified"; break;
  }
  if (k.affinity_hint) j["affinity_hint"] = to_string(*k.affinity_hint);
  if (!k.phases.empty()) {
    json phases = json::array();
    for (const PhaseHint& p : k.phases) {
      json pj;
      pj["fraction"] = p.fraction;
      pj["u_xcd"] = at(p.utilization, ComponentKind::Xcd);
      pj["u_iod"] = at(p.utilization, ComponentKind::Iod);
      pj["u_hbm"] = at(p.utilization, ComponentKind::Hbm);
      phases.push_back(pj);
    }
    j["phases"] = phases;
  }
  return j;
}

PolicyConfig policy_from_json(const json& j, const std::string& ctx) {
  PolicyConfig p;
  const std::string variant = require_string(j, "variant", ctx);
  if (variant == "baseline") {
    p.kind = PolicyConfig::Kind::Baseline;
  } else if (variant == "power_cap") {
    p.kind = PolicyConfig::Kind::PowerCap;
    p.power_cap_w = require_number(j, "cap_w", ctx);
  } else if (variant == "freq_cap") {
    p.kind = PolicyConfig::Kind::FreqCap;
    p.freq_cap_mhz = require_number(j, "cap_mhz", ctx);
  } else if (variant == "combined") {
    p.kind = PolicyConfig::Kind::Combined;
    p.power_cap_w = require_number(j, "power_cap_w", ctx);
    p.freq_cap_mhz = require_number(j, "freq_cap_mhz", ctx);
  } else if (variant == "comppow_auto") {
    p.kind = PolicyConfig::Kind::CompPowAuto;
    p.cap_ratio = j.value("cap_ratio", 0.78);
    p.ewma_lambda = j.value("ewma_lambda", 0.5);
    p.warmup_iters = static_cast<int>(j.value("warmup_iters", 2));
    p.reallocation_floor_cus = static_cast<int>(j.value("reallocation_floor_cus", 8));
  } else {
    fail(ctx + ".variant", "unknown policy variant '" + variant + "'");
  }
  return p;
}

// Spec files referenced by name are searched in the override dir, the
// COMPPOW_SPEC_DIR environment variable, next to the scenario, and in a
// specs/ directory up to two levels above the scenario file.
fs::path resolve_spec_path(const std::string& ref, const std::string& base_dir,
                           const std::string* spec_dir_override) {
  const fs::path p(ref);
  std::vector<fs::path> candidates;
  if (p.is_absolute()) {
    candidates.push_back(p);
  } else {
    if (spec_dir_override && !spec_dir_override->empty())
      candidates.push_back(fs::path(*spec_dir_override) / p);
    if (const char* env = std::getenv("COMPPOW_SPEC_DIR"))
      if (*env) candidates.push_back(fs::path(env) / p);
    const fs::path base(base_dir.empty() ? "." : base_dir);
    candidates.push_back(base / p);
    candidates.push_back(base / "specs" / p);
    candidates.push_back(base / ".." / "specs" / p);
    candidates.push_back(base / ".." / ".." / "specs" / p);
    candidates.push_back(fs::path("specs") / p);
    candidates.push_back(p);
  }
  for (const fs::path& c : candidates)
    if (fs::exists(c)) return c;
  std::string tried;
  for (const fs::path& c : candidates) tried += "\n  " + c.string();
  fail("spec", "cannot resolve spec file '" + ref + "'; tried:" + tried);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(path, std::string("JSON parse error: ") + e.what());
  }
  return j;
}

}  // namespace

std::vector<const KernelDesc*> Scenario::all_kernels() const {
  std::vector<const KernelDesc*> out;
  for (const StreamDef& s : streams)
    for (const KernelDesc& k : s.kernels) out.push_back(&k);
  return out;
}

GpuSpec gpu_spec_from_json(const json& j, const std::string& ctx) {
  GpuSpec g;
  g.name = j.value("name", "");
  const json& comps = require(j, "components", ctx);
  for (ComponentKind k : kAllComponents) {
    const std::string key = to_string(k);
    g.component(k) = component_from_json(require(comps, key, ctx + ".components"),
                                         ctx + ".components." + key);
  }
  g.f_min_mhz = require_number(j, "f_min_mhz", ctx);
  g.f_max_mhz = require_number(j, "f_max_mhz", ctx);
  g.f_ref_mhz = require_number(j, "f_ref_mhz", ctx);
  g.tdp_w = require_number(j, "tdp_w", ctx);
  g.cu_total = require_int(j, "cu_total", ctx);
  g.peak_flops = require_number(j, "peak_flops", ctx);
  g.hbm_bw = require_number(j, "hbm_bw_bytes_per_s", ctx);
  g.iod_bw = require_number(j, "iod_bw_bytes_per_s", ctx);
  g.link_bw = require_number(j, "link_bw_bytes_per_s", ctx);
  g.copy_rate_per_cu = require_number(j, "copy_rate_per_cu_bytes_per_s", ctx);
  g.copy_freq_exponent = j.value("copy_freq_exponent", 1.0);
  return g;
}

json gpu_spec_to_json(const GpuSpec& g) {
  json comps;
  for (ComponentKind k : kAllComponents) {
    const ComponentSpec& c = g.component(k);
    comps[to_string(k)] = {{"idle_power_w", c.idle_power_w},
                           {"dyn_power_max_w", c.dyn_power_max_w},
                           {"freq_exponent", c.freq_exponent}};
  }
  json j;
  if (!g.name.empty()) j["name"] = g.name;
  j["components"] = comps;
  j["f_min_mhz"] = g.f_min_mhz;
  j["f_max_mhz"] = g.f_max_mhz;
  j["f_ref_mhz"] = g.f_ref_mhz;
  j["tdp_w"] = g.tdp_w;
  j["cu_total"] = g.cu_total;
  j["peak_flops"] = g.peak_flops;
  j["hbm_bw_bytes_per_s"] = g.hbm_bw;
  j["iod_bw_bytes_per_s"] = g.iod_bw;
  j["link_bw_bytes_per_s"] = g.link_bw;
  j["copy_rate_per_cu_bytes_per_s"] = g.copy_rate_per_cu;
  j["copy_freq_exponent"] = g.copy_freq_exponent;
  return j;
}

std::string spec_digest(const GpuSpec& spec) {
  // Canonical dump (sorted keys) hashed; stable across runs of one build.
  GpuSpec unnamed = spec;
  unnamed.name.clear();
  const std::string canon = gpu_spec_to_json(unnamed).dump();
  std::ostringstream out;
  out << std::hex << std::hash<std::string>{}(canon);
  return out.str();
}

json policy_to_json(const PolicyConfig& p) {
  json j;
  j["variant"] = PolicyConfig::kind_name(p.kind);
  switch (p.kind) {
    case PolicyConfig::Kind::Baseline:
      break;
    case PolicyConfig::Kind::PowerCap:
      j["cap_w"] = p.power_cap_w;
      break;
    case PolicyConfig::Kind::FreqCap:
      j["cap_mhz"] = p.freq_cap_mhz;
      break;
    case PolicyConfig::Kind::Combined:
      j["power_cap_w"] = p.power_cap_w;
      j["freq_cap_mhz"] = p.freq_cap_mhz;
      break;
    case PolicyConfig::Kind::CompPowAuto:
      j["cap_ratio"] = p.cap_ratio;
      j["ewma_lambda"] = p.ewma_lambda;
      j["warmup_iters"] = p.warmup_iters;
      j["reallocation_floor_cus"] = p.reallocation_floor_cus;
      break;
  }
  return j;
}

Scenario scenario_from_json(const json& j, const std::string& base_dir,
                            const std::string* spec_dir_override) {
  Scenario s;

  const json& spec_ref = require(j, "spec", "");
  if (spec_ref.is_string()) {
    const fs::path path =
        resolve_spec_path(spec_ref.get<std::string>(), base_dir, spec_dir_override);
    s.gpu = gpu_spec_from_json(load_json_file(path.string()), "spec");
    s.spec_source = path.string();
  } else if (spec_ref.is_object()) {
    s.gpu = gpu_spec_from_json(spec_ref, "spec");
    s.spec_source = "<inline>";
  } else {
    fail("spec", "expected a file name or an inline spec object");
  }

  s.dt_s = j.value("dt_s", 1e-4);
  s.iterations = static_cast<int>(j.value("iterations", 1));

  const json& streams = require(j, "streams", "");
  if (!streams.is_array()) fail("streams", "expected an array");
  for (size_t i = 0; i < streams.size(); ++i) {
    const std::string ctx = "streams[" + std::to_string(i) + "]";
    StreamDef def;
    def.name = streams[i].value("name", "stream" + std::to_string(i));
    const json& kernels = require(streams[i], "kernels", ctx);
    for (size_t ki = 0; ki < kernels.size(); ++ki)
      def.kernels.push_back(
          kernel_from_json(kernels[ki], ctx + ".kernels[" + std::to_string(ki) + "]"));
    s.streams.push_back(std::move(def));
  }

  if (j.contains("policy"))
    s.policy = policy_from_json(j["policy"], "policy");
  if (j.contains("cu_alloc")) {
    if (!j["cu_alloc"].is_object()) fail("cu_alloc", "expected an object");
    for (auto it = j["cu_alloc"].begin(); it != j["cu_alloc"].end(); ++it)
      s.cu_alloc[it.key()] = it.value().get<int>();
  }

  validate_scenario(s);
  return s;
}

Scenario parse_scenario(const std::string& path,
                        const std::string* spec_dir_override) {
  const json j = load_json_file(path);
  const std::string base_dir = fs::path(path).parent_path().string();
  return scenario_from_json(j, base_dir, spec_dir_override);
}

void validate_scenario(const Scenario& s) {
  ValidatedSpec vspec = validate_spec(s.gpu);  // throws with named violations

  std::vector<std::string> bad;
  if (s.streams.size() > 2)
    bad.push_back("streams: at most two streams are supported");
  size_t total_kernels = 0;
  std::set<std::string> ids;
  for (const StreamDef& st : s.streams) {
    total_kernels += st.kernels.size();
    for (const KernelDesc& k : st.kernels) {
      if (!ids.insert(k.id).second)
        bad.push_back("duplicate kernel id '" + k.id + "'");
      try {
        validate_kernel(k);
        if (!kernel_demand(k).runnable() ) {
          // Zero-demand kernels complete instantly; allowed (world_size 1).
        }
      } catch (const ValidationError& e) {
        for (const std::string& v : e.violations()) bad.push_back(v);
      }
    }
  }
  if (total_kernels == 0) bad.push_back("no kernels");
  if (!(s.dt_s > 0.0)) bad.push_back("dt_s must be positive");
  if (s.iterations < 1) bad.push_back("iterations must be >= 1");

  for (const auto& [id, cus] : s.cu_alloc) {
    if (!ids.count(id)) bad.push_back("cu_alloc: unknown kernel id '" + id + "'");
    if (cus < 1) bad.push_back("cu_alloc." + id + ": must be >= 1");
    if (cus > s.gpu.cu_total) bad.push_back("cu_alloc." + id + ": exceeds cu_total");
  }

  try {
    validate_policy(s.policy, vspec);
  } catch (const ValidationError& e) {
    for (const std::string& v : e.violations()) bad.push_back(v);
  }

  if (!bad.empty()) throw ValidationError(std::move(bad));
}

json effective_config_json(const Scenario& s) {
  json j;
  j["spec"] = gpu_spec_to_json(s.gpu);
  j["dt_s"] = s.dt_s;
  j["iterations"] = s.iterations;
  json streams = json::array();
  for (const StreamDef& st : s.streams) {
    json sj;
    sj["name"] = st.name;
    json kernels = json::array();
    for (const KernelDesc& k : st.kernels) kernels.push_back(kernel_to_json(k));
    sj["kernels"] = kernels;
    streams.push_back(sj);
  }
  j["streams"] = streams;
  j["policy"] = policy_to_json(s.policy);
  json cu = json::object();
  for (const auto& [id, n] : s.cu_alloc) cu[id] = n;
  j["cu_alloc"] = cu;
  return j;
}

}  // namespace comppow

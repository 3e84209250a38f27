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

#include "policy.hpp"

#include <algorithm>
#include <cmath>

namespace comppow {

const char* PolicyConfig::kind_name(Kind k) {
  switch (k) {
    case Kind::Baseline: return "baseline";
    case Kind::PowerCap: return "power_cap";
    case Kind::FreqCap: return "freq_cap";
    case Kind::Combined: return "combined";
    case Kind::CompPowAuto: return "comppow_auto";
  }
  return "?";
}

void validate_policy(const PolicyConfig& cfg, const ValidatedSpec& spec) {
  std::vector<std::string> bad;
  const GpuSpec& g = spec.get();

  const bool has_power_cap = cfg.kind == PolicyConfig::Kind::PowerCap ||
                             cfg.kind == PolicyConfig::Kind::Combined;
  const bool has_freq_cap = cfg.kind == PolicyConfig::Kind::FreqCap ||
                            cfg.kind == PolicyConfig::Kind::Combined;
  if (has_power_cap) {
    if (!(cfg.power_cap_w > g.sum_idle_power()))
      bad.push_back("policy.cap_w: power cap must exceed total idle power");
    if (cfg.power_cap_w > g.tdp_w) bad.push_back("policy.cap_w: power cap above tdp");
  }
  if (has_freq_cap) {
    if (cfg.freq_cap_mhz < g.f_min_mhz || cfg.freq_cap_mhz > g.f_max_mhz)
      bad.push_back("policy.cap_mhz: frequency cap outside [f_min, f_max]");
  }
  if (cfg.kind == PolicyConfig::Kind::CompPowAuto) {
    if (!(cfg.cap_ratio > 0.0 && cfg.cap_ratio <= 1.0))
      bad.push_back("policy.cap_ratio: must be in (0, 1]");
    if (!(cfg.ewma_lambda > 0.0 && cfg.ewma_lambda <= 1.0))
      bad.push_back("policy.ewma_lambda: must be in (0, 1]");
    if (cfg.warmup_iters < 1) bad.push_back("policy.warmup_iters: must be >= 1");
    if (cfg.reallocation_floor_cus < 1)
      bad.push_back("policy.reallocation_floor_cus: must be >= 1");
    if (cfg.cap_ratio * g.f_max_mhz < g.f_min_mhz)
      bad.push_back("policy.cap_ratio: cap_ratio*f_max below f_min");
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

AffinityHistory learn_affinity_online(AffinityHistory history,
                                      const std::string& kernel_id,
                                      const ComponentArray& observed,
                                      double lambda) {
  for (double u : observed)
    if (!(u >= 0.0 && u <= 1.0))
      throw ValidationError("observed utilization outside [0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw ValidationError("ewma lambda must be in (0, 1]");

  AffinityRecord& rec = history[kernel_id];
  if (rec.count == 0) {
    rec.ewma = observed;
  } else {
    for (size_t i = 0; i < rec.ewma.size(); ++i)
      rec.ewma[i] = lambda * observed[i] + (1.0 - lambda) * rec.ewma[i];
  }
  rec.count += 1;
  return history;
}

std::optional<ComponentKind> learned_affinity(const AffinityHistory& history,
                                              const std::string& kernel_id,
                                              int warmup_iters) {
  auto it = history.find(kernel_id);
  if (it == history.end() || it->second.count < warmup_iters) return std::nullopt;
  // Iterating in Xcd, Iod, Hbm order and replacing only on strictly-greater
  // values implements the tie-break rule Xcd > Iod > Hbm.
  ComponentKind best = ComponentKind::Xcd;
  double best_u = at(it->second.ewma, ComponentKind::Xcd);
  for (ComponentKind k : {ComponentKind::Iod, ComponentKind::Hbm}) {
    if (at(it->second.ewma, k) > best_u) {
      best = k;
      best_u = at(it->second.ewma, k);
    }
  }
  return best;
}

namespace {

ActuatorSettings baseline_settings(const PolicySnapshot& snapshot,
                                   const ValidatedSpec& spec) {
  ActuatorSettings s;
  s.freq_cap_mhz = spec->f_max_mhz;
  s.power_cap_w = spec->tdp_w;
  s.cu_alloc = snapshot.default_cu_alloc;
  return s;
}

ComponentKind resolve_affinity(const ActiveKernelInfo& info,
                               const AffinityHistory& history,
                               const PolicyConfig& cfg,
                               const ValidatedSpec& spec) {
  if (info.affinity_hint) return *info.affinity_hint;
  if (auto learned = learned_affinity(history, info.id, cfg.warmup_iters))
    return *learned;
  return infer_affinity(info.demand, spec);
}

bool movement_affine(ComponentKind k) { return k != ComponentKind::Xcd; }

}  // namespace

ActuatorSettings apply_policy(const PolicyConfig& cfg,
                              const PolicySnapshot& snapshot,
                              const AffinityHistory& history,
                              const ValidatedSpec& spec,
                              std::vector<std::string>* warnings) {
  ActuatorSettings s = baseline_settings(snapshot, spec);

  switch (cfg.kind) {
    case PolicyConfig::Kind::Baseline:
      return s;
    case PolicyConfig::Kind::PowerCap:
      s.power_cap_w = cfg.power_cap_w;
      return s;
    case PolicyConfig::Kind::FreqCap:
      s.freq_cap_mhz = cfg.freq_cap_mhz;
      return s;
    case PolicyConfig::Kind::Combined:
      s.power_cap_w = cfg.power_cap_w;
      s.freq_cap_mhz = cfg.freq_cap_mhz;
      return s;
    case PolicyConfig::Kind::CompPowAuto:
      break;
  }

  if (snapshot.active.empty()) return s;

  int critical = 0;
  for (const ActiveKernelInfo& k : snapshot.active)
    if (k.criticality == Criticality::Critical) ++critical;
  if (critical >= 2) {
    if (warnings)
      warnings->push_back("conflicting criticality hints: more than one active "
                          "kernel is marked critical; falling back to baseline");
    return s;
  }

  // Phase-hinted control. A single hinted kernel uses its current phase
  // signature directly; hinted concurrent kernels without criticality are
  // combined by summing their hinted utilization vectors.
  bool all_hinted = true;
  ComponentArray hinted_sum{};
  for (const ActiveKernelInfo& k : snapshot.active) {
    if (!k.phase_utilization) {
      all_hinted = false;
      break;
    }
    for (size_t i = 0; i < hinted_sum.size(); ++i)
      hinted_sum[i] += (*k.phase_utilization)[i];
  }
  if (all_hinted && critical == 0) {
    const bool compute_leaning = at(hinted_sum, ComponentKind::Xcd) >=
                                 at(hinted_sum, ComponentKind::Iod);
    s.freq_cap_mhz = compute_leaning ? spec->f_max_mhz
                                     : cfg.cap_ratio * spec->f_max_mhz;
    return s;
  }

  std::vector<ComponentKind> affinity;
  affinity.reserve(snapshot.active.size());
  bool all_movement = true;
  for (const ActiveKernelInfo& k : snapshot.active) {
    affinity.push_back(resolve_affinity(k, history, cfg, spec));
    if (!movement_affine(affinity.back())) all_movement = false;
  }

  if (all_movement) s.freq_cap_mhz = cfg.cap_ratio * spec->f_max_mhz;

  if (snapshot.active.size() >= 2 && critical == 1) {
    // Reallocate power toward the critical kernel by shrinking the CU
    // allocation of non-critical data-movement kernels.
    for (size_t i = 0; i < snapshot.active.size(); ++i) {
      const ActiveKernelInfo& k = snapshot.active[i];
      if (k.criticality != Criticality::Critical && movement_affine(affinity[i]))
        s.cu_alloc[k.id] = cfg.reallocation_floor_cus;
    }
  }
  return s;
}

std::vector<ActuatorSettings> phase_budgets(const std::vector<PhaseHint>& phases,
                                            const PolicyConfig& cfg,
                                            const ValidatedSpec& spec) {
  if (phases.empty()) throw ValidationError("phase list is empty");
  double sum = 0.0;
  for (const PhaseHint& p : phases) sum += p.fraction;
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("phase fractions sum to " + std::to_string(sum) +
                          ", expected 1");

  std::vector<ActuatorSettings> out;
  out.reserve(phases.size());
  for (const PhaseHint& p : phases) {
    ActuatorSettings s;
    s.power_cap_w = spec->tdp_w;
    const bool compute_leaning = at(p.utilization, ComponentKind::Xcd) >=
                                 at(p.utilization, ComponentKind::Iod);
    s.freq_cap_mhz = compute_leaning ? spec->f_max_mhz
                                     : cfg.cap_ratio * spec->f_max_mhz;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace comppow

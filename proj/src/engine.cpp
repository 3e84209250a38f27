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

#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace comppow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Float-noise guard when comparing against the power cap; the governor
// itself stays on the feasible side of the 1 MHz lattice.
constexpr double kPowerEps = 1e-9;

double copy_capacity(const ValidatedSpec& spec, double f_mhz, double cu_frac) {
  const GpuSpec& g = spec.get();
  double scale = 1.0;
  if (g.copy_freq_exponent != 0.0)
    scale = std::pow(f_mhz / g.f_ref_mhz, g.copy_freq_exponent);
  return cu_frac * static_cast<double>(g.cu_total) * g.copy_rate_per_cu * scale;
}

struct KernelEval {
  ResourceRates rates;
  double t_full = 0.0;       // seconds for the whole kernel at these rates
  ComponentArray op_util{};  // per-kernel utilization (xcd, iod, hbm)
  double flops_rate = 0.0;   // achieved rates while running
  double hbm_rate = 0.0;
  double iod_rate = 0.0;
  double xcd_busy = 0.0;     // busy fraction of the kernel's CU partition
};

KernelEval evaluate_kernel(const ValidatedSpec& spec, const GovernorKernel& k,
                           double f_mhz) {
  KernelEval e;
  const GpuSpec& g = spec.get();
  e.rates.compute_flops_per_s = peak_compute_tp(spec, f_mhz, k.cu_frac);
  e.rates.hbm_bytes_per_s = g.hbm_bw * k.hbm_share;
  e.rates.iod_bytes_per_s = g.iod_bw * k.iod_share;
  double copy_cap = kInf;
  if (k.is_allgather) {
    copy_cap = std::min(g.link_bw, copy_capacity(spec, f_mhz, k.cu_frac));
    e.rates.hbm_bytes_per_s = std::min(e.rates.hbm_bytes_per_s, copy_cap);
    e.rates.iod_bytes_per_s = std::min(e.rates.iod_bytes_per_s, copy_cap);
  }

  const double tc = k.demand.flops > 0.0
                        ? k.demand.flops / e.rates.compute_flops_per_s : 0.0;
  const double th = k.demand.hbm_bytes > 0.0
                        ? (e.rates.hbm_bytes_per_s > 0.0
                               ? k.demand.hbm_bytes / e.rates.hbm_bytes_per_s : kInf)
                        : 0.0;
  const double ti = k.demand.iod_bytes > 0.0
                        ? (e.rates.iod_bytes_per_s > 0.0
                               ? k.demand.iod_bytes / e.rates.iod_bytes_per_s : kInf)
                        : 0.0;
  e.t_full = std::max({tc, th, ti});
  if (e.t_full <= 0.0 || std::isinf(e.t_full)) return e;

  at(e.op_util, ComponentKind::Xcd) = tc / e.t_full;
  at(e.op_util, ComponentKind::Iod) = ti / e.t_full;
  at(e.op_util, ComponentKind::Hbm) = th / e.t_full;
  e.flops_rate = k.demand.flops / e.t_full;
  e.hbm_rate = k.demand.hbm_bytes / e.t_full;
  e.iod_rate = k.demand.iod_bytes / e.t_full;

  if (k.is_allgather) {
    // The CUs driving copies are busy issuing loads/stores in proportion to
    // how much of the allocated copy capacity the achieved rate uses.
    const double cap = copy_capacity(spec, f_mhz, k.cu_frac);
    e.xcd_busy = cap > 0.0 ? std::min(1.0, e.hbm_rate / cap) : 0.0;
  } else {
    e.xcd_busy = at(e.op_util, ComponentKind::Xcd);
  }
  return e;
}

double clamp01(double u) {
  if (u > 1.0) {
    if (u > 1.0 + 1e-6)
      throw EngineError("internal: utilization " + std::to_string(u) + " above 1");
    return 1.0;
  }
  return u < 0.0 ? 0.0 : u;
}

}  // namespace

void validate_settings(const ActuatorSettings& s, const ValidatedSpec& spec,
                       const std::vector<std::string>& active_ids) {
  std::vector<std::string> bad;
  const GpuSpec& g = spec.get();
  if (s.freq_cap_mhz < g.f_min_mhz || s.freq_cap_mhz > g.f_max_mhz)
    bad.push_back("freq_cap outside [f_min, f_max]");
  if (!(s.power_cap_w > g.sum_idle_power()))
    bad.push_back("power_cap must exceed total idle power");
  if (s.power_cap_w > g.tdp_w) bad.push_back("power_cap above tdp");

  std::int64_t allocated = 0;
  int unlisted = 0;
  for (const std::string& id : active_ids) {
    auto it = s.cu_alloc.find(id);
    if (it == s.cu_alloc.end()) {
      ++unlisted;
      continue;
    }
    if (it->second < 1) bad.push_back("kernel '" + id + "' allocated no CUs");
    allocated += it->second;
  }
  if (allocated > g.cu_total)
    bad.push_back("cu_alloc exceeds cu_total for the active kernels");
  else if (unlisted > 0 && g.cu_total - allocated < unlisted)
    bad.push_back("not enough CUs left to give every active kernel at least one");

  if (!bad.empty()) throw ValidationError(std::move(bad));
}

ResourceRates kernel_rates(const KernelDesc& desc, const ValidatedSpec& spec,
                           double f_mhz, double cu_frac, double hbm_share,
                           double iod_share) {
  GovernorKernel k;
  k.demand = kernel_demand(desc);
  k.is_allgather = !desc.is_gemm();
  k.cu_frac = cu_frac;
  k.hbm_share = hbm_share;
  k.iod_share = iod_share;
  return evaluate_kernel(spec, k, f_mhz).rates;
}

double kernel_remaining_seconds(const DemandVector& demand, double progress,
                                const ResourceRates& rates) {
  if (!(progress >= 0.0 && progress <= 1.0))
    throw ValidationError("progress outside [0, 1]");
  double t_full = 0.0;
  if (demand.flops > 0.0)
    t_full = rates.compute_flops_per_s > 0.0
                 ? demand.flops / rates.compute_flops_per_s : kInf;
  if (demand.hbm_bytes > 0.0)
    t_full = std::max(t_full, rates.hbm_bytes_per_s > 0.0
                                  ? demand.hbm_bytes / rates.hbm_bytes_per_s : kInf);
  if (demand.iod_bytes > 0.0)
    t_full = std::max(t_full, rates.iod_bytes_per_s > 0.0
                                  ? demand.iod_bytes / rates.iod_bytes_per_s : kInf);
  return (1.0 - progress) * t_full;
}

ComponentArray kernel_utilizations(const DemandVector& demand,
                                   const ResourceRates& rates) {
  GovernorKernel k;
  k.demand = demand;
  k.is_allgather = false;
  k.cu_frac = 1.0;
  // Rates are supplied, so re-derive utilizations directly from the terms.
  const double tc = demand.flops > 0.0 ? demand.flops / rates.compute_flops_per_s : 0.0;
  const double th = demand.hbm_bytes > 0.0 ? demand.hbm_bytes / rates.hbm_bytes_per_s : 0.0;
  const double ti = demand.iod_bytes > 0.0 ? demand.iod_bytes / rates.iod_bytes_per_s : 0.0;
  const double t_full = std::max({tc, th, ti});
  ComponentArray u{};
  if (t_full <= 0.0) return u;
  at(u, ComponentKind::Xcd) = tc / t_full;
  at(u, ComponentKind::Iod) = ti / t_full;
  at(u, ComponentKind::Hbm) = th / t_full;
  return u;
}

GpuLoad evaluate_gpu(const ValidatedSpec& spec,
                     const std::vector<GovernorKernel>& kernels, double f_mhz) {
  double u_xcd = 0.0, u_iod = 0.0, u_hbm = 0.0;
  for (const GovernorKernel& k : kernels) {
    const KernelEval e = evaluate_kernel(spec, k, f_mhz);
    if (std::isinf(e.t_full))
      throw EngineError("kernel stalled: no progress possible at current rates");
    u_xcd += k.cu_frac * e.xcd_busy;
    u_iod += e.iod_rate / spec->iod_bw;
    u_hbm += e.hbm_rate / spec->hbm_bw;
  }
  GpuLoad load;
  at(load.utilization, ComponentKind::Xcd) = clamp01(u_xcd);
  at(load.utilization, ComponentKind::Iod) = clamp01(u_iod);
  at(load.utilization, ComponentKind::Hbm) = clamp01(u_hbm);
  load.power = gpu_power(spec, f_mhz, load.utilization);
  return load;
}

ResourceScales contention_shares(const ValidatedSpec& spec,
                                 const std::vector<ByteDemandRates>& demands) {
  double hbm = 0.0, iod = 0.0;
  for (const ByteDemandRates& d : demands) {
    hbm += d.hbm;
    iod += d.iod;
  }
  ResourceScales s;
  if (hbm > spec->hbm_bw) s.hbm = spec->hbm_bw / hbm;
  if (iod > spec->iod_bw) s.iod = spec->iod_bw / iod;
  return s;
}

double solve_frequency(const ValidatedSpec& spec,
                       const std::vector<GovernorKernel>& kernels,
                       const ActuatorSettings& settings) {
  const GpuSpec& g = spec.get();
  const double f_hi_d = std::min(g.f_max_mhz, settings.freq_cap_mhz);
  const auto fits = [&](double f) {
    return evaluate_gpu(spec, kernels, f).power.total <=
           settings.power_cap_w + kPowerEps;
  };

  if (fits(f_hi_d)) return f_hi_d;

  // Power is monotone in f (freq exponents >= 0 and achieved rates scale at
  // most linearly), so binary-search the 1 MHz lattice for the largest
  // feasible clock.
  long lo = static_cast<long>(std::ceil(g.f_min_mhz));
  long hi = static_cast<long>(std::floor(f_hi_d));
  if (!fits(static_cast<double>(lo))) return g.f_min_mhz;
  while (lo + 1 < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (fits(static_cast<double>(mid)))
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<double>(lo);
}

// ---- Simulation ---------------------------------------------------------- //

namespace {

struct RunningKernel {
  const KernelDesc* desc = nullptr;
  DemandVector demand;
  int stream = 0;
  int iteration = 0;
  double progress = 0.0;
  double start_s = 0.0;
  int cu = 0;
  double hbm_share = 1.0;
  double iod_share = 1.0;
  // Accumulators for conservation and online learning.
  double flops_done = 0.0;
  double hbm_done = 0.0;
  double iod_done = 0.0;
  ComponentArray util_integral{};
  double busy_s = 0.0;
};

class Simulation {
 public:
  Simulation(const Scenario& sc, const ValidatedSpec& spec)
      : sc_(sc), spec_(spec) {}

  SimTrace run() {
    trace_.dt_s = sc_.dt_s;

    size_t total = 0;
    for (const StreamDef& s : sc_.streams) total += s.kernels.size();
    if (total == 0) {
      emit_idle_sample();
      trace_.makespan_s = 0.0;
      return std::move(trace_);
    }

    for (int iter = 0; iter < sc_.iterations; ++iter) {
      next_index_.assign(sc_.streams.size(), 0);
      active_.clear();
      for (size_t s = 0; s < sc_.streams.size(); ++s) launch_next(s, iter);
      while (!active_.empty()) step(iter);
    }

    trace_.makespan_s = last_end_;
    return std::move(trace_);
  }

 private:
  void emit_idle_sample() {
    PolicySnapshot snap;
    snap.default_cu_alloc = sc_.cu_alloc;
    ActuatorSettings settings =
        apply_policy(sc_.policy, snap, history_, spec_, nullptr);
    validate_settings(settings, spec_, {});
    const double f = solve_frequency(spec_, {}, settings);
    PowerSample sample;
    sample.t_s = 0.0;
    sample.f_mhz = f;
    sample.power = evaluate_gpu(spec_, {}, f).power;
    trace_.samples.push_back(std::move(sample));
  }

  void launch_next(size_t stream, int iter) {
    if (next_index_[stream] >= sc_.streams[stream].kernels.size()) return;
    const KernelDesc& desc = sc_.streams[stream].kernels[next_index_[stream]];
    ++next_index_[stream];
    RunningKernel rk;
    rk.desc = &desc;
    rk.demand = kernel_demand(desc);
    rk.stream = static_cast<int>(stream);
    rk.iteration = iter;
    rk.start_s = t_;
    active_.push_back(std::move(rk));
    std::sort(active_.begin(), active_.end(),
              [](const RunningKernel& a, const RunningKernel& b) {
                return a.stream < b.stream;
              });
  }

  std::optional<ComponentArray> current_phase_util(const RunningKernel& rk) const {
    if (rk.desc->phases.empty()) return std::nullopt;
    double cum = 0.0;
    for (const PhaseHint& p : rk.desc->phases) {
      cum += p.fraction;
      if (rk.progress < cum - 1e-12) return p.utilization;
    }
    return rk.desc->phases.back().utilization;
  }

  ActuatorSettings resolve_settings() {
    PolicySnapshot snap;
    snap.default_cu_alloc = sc_.cu_alloc;
    for (const RunningKernel& rk : active_) {
      ActiveKernelInfo info;
      info.id = rk.desc->id;
      info.is_gemm = rk.desc->is_gemm();
      info.demand = rk.demand;
      info.criticality = rk.desc->criticality;
      info.affinity_hint = rk.desc->affinity_hint;
      info.phase_utilization = current_phase_util(rk);
      snap.active.push_back(std::move(info));
    }
    std::vector<std::string> warn;
    ActuatorSettings settings =
        apply_policy(sc_.policy, snap, history_, spec_, &warn);
    for (std::string& w : warn)
      if (warned_.insert(w).second) trace_.warnings.push_back(std::move(w));

    std::vector<std::string> ids;
    for (const RunningKernel& rk : active_) ids.push_back(rk.desc->id);
    validate_settings(settings, spec_, ids);
    return settings;
  }

  void assign_cus(const ActuatorSettings& settings) {
    std::int64_t used = 0;
    std::vector<RunningKernel*> unlisted;
    for (RunningKernel& rk : active_) {
      auto it = settings.cu_alloc.find(rk.desc->id);
      if (it != settings.cu_alloc.end()) {
        rk.cu = it->second;
        used += it->second;
      } else {
        unlisted.push_back(&rk);
      }
    }
    if (!unlisted.empty()) {
      const std::int64_t left = spec_->cu_total - used;
      const std::int64_t each = left / static_cast<std::int64_t>(unlisted.size());
      std::int64_t extra = left % static_cast<std::int64_t>(unlisted.size());
      for (RunningKernel* rk : unlisted) {
        rk->cu = static_cast<int>(each + (extra > 0 ? 1 : 0));
        if (extra > 0) --extra;
      }
    }
  }

  GovernorKernel to_governor(const RunningKernel& rk) const {
    GovernorKernel k;
    k.demand = rk.demand;
    k.is_allgather = !rk.desc->is_gemm();
    k.cu_frac = static_cast<double>(rk.cu) / static_cast<double>(spec_->cu_total);
    k.hbm_share = rk.hbm_share;
    k.iod_share = rk.iod_share;
    return k;
  }

  void apply_contention(const ActuatorSettings& settings) {
    // Demand rates are probed at the highest permitted clock; the resulting
    // shares stay fixed for the step.
    const double f_probe = std::min(spec_->f_max_mhz, settings.freq_cap_mhz);
    std::vector<ByteDemandRates> demands;
    demands.reserve(active_.size());
    for (RunningKernel& rk : active_) {
      rk.hbm_share = 1.0;
      rk.iod_share = 1.0;
      const KernelEval e = evaluate_kernel(spec_, to_governor(rk), f_probe);
      demands.push_back(ByteDemandRates{e.hbm_rate, e.iod_rate});
    }
    const ResourceScales scale = contention_shares(spec_, demands);
    if (scale.hbm >= 1.0 && scale.iod >= 1.0) return;
    for (size_t i = 0; i < active_.size(); ++i) {
      // share = scale * demand / peak, so the kernel's byte-rate ceiling
      // becomes exactly its proportional slice of the resource.
      if (scale.hbm < 1.0 && demands[i].hbm > 0.0)
        active_[i].hbm_share = scale.hbm * demands[i].hbm / spec_->hbm_bw;
      if (scale.iod < 1.0 && demands[i].iod > 0.0)
        active_[i].iod_share = scale.iod * demands[i].iod / spec_->iod_bw;
    }
  }

  void step(int iter) {
    const ActuatorSettings settings = resolve_settings();
    assign_cus(settings);
    apply_contention(settings);

    std::vector<GovernorKernel> gov;
    gov.reserve(active_.size());
    for (const RunningKernel& rk : active_) gov.push_back(to_governor(rk));

    const double f = solve_frequency(spec_, gov, settings);
    const GpuLoad load = evaluate_gpu(spec_, gov, f);

    PowerSample sample;
    sample.t_s = t_;
    sample.f_mhz = f;
    sample.power = load.power;
    sample.utilization = load.utilization;
    for (const RunningKernel& rk : active_) sample.active_ids.push_back(rk.desc->id);
    trace_.samples.push_back(std::move(sample));

    // Advance kernels under this step's frozen conditions. Completions land
    // on their exact instants; freed streams launch at the next boundary.
    const double dt = sc_.dt_s;
    std::set<size_t> freed_streams;
    std::vector<RunningKernel> still_active;
    for (size_t i = 0; i < active_.size(); ++i) {
      RunningKernel& rk = active_[i];
      const KernelEval e = evaluate_kernel(spec_, gov[i], f);
      if (std::isinf(e.t_full))
        throw EngineError("kernel '" + rk.desc->id +
                          "' stalled: demanded resources have zero rate");
      const double remaining = e.t_full * (1.0 - rk.progress);
      const double advance = std::min(dt, remaining);
      rk.flops_done += e.flops_rate * advance;
      rk.hbm_done += e.hbm_rate * advance;
      rk.iod_done += e.iod_rate * advance;
      for (size_t c = 0; c < rk.util_integral.size(); ++c)
        rk.util_integral[c] += e.op_util[c] * advance;
      rk.busy_s += advance;

      if (remaining <= dt) {
        finish_kernel(rk, t_ + remaining);
        freed_streams.insert(static_cast<size_t>(rk.stream));
      } else {
        rk.progress += e.t_full > 0.0 ? dt / e.t_full : 1.0;
        still_active.push_back(std::move(rk));
      }
    }
    active_ = std::move(still_active);

    t_ += dt;
    for (size_t s : freed_streams) launch_next(s, iter);
  }

  void finish_kernel(RunningKernel& rk, double end_s) {
    rk.progress = 1.0;
    last_end_ = std::max(last_end_, end_s);

    KernelTimeline tl;
    tl.id = rk.desc->id;
    tl.op = rk.desc->op_name();
    tl.stream = rk.stream;
    tl.iteration = rk.iteration;
    tl.start_s = rk.start_s;
    tl.end_s = end_s;
    tl.flops_done = rk.flops_done;
    tl.hbm_bytes_done = rk.hbm_done;
    tl.iod_bytes_done = rk.iod_done;
    ComponentArray avg{};
    if (rk.busy_s > 0.0)
      for (size_t c = 0; c < avg.size(); ++c) {
        avg[c] = rk.util_integral[c] / rk.busy_s;
        if (avg[c] > 1.0) avg[c] = 1.0;
      }
    tl.avg_utilization = avg;
    trace_.timelines.push_back(std::move(tl));

    history_ = learn_affinity_online(std::move(history_), rk.desc->id, avg,
                                     sc_.policy.ewma_lambda);
  }

  const Scenario& sc_;
  const ValidatedSpec& spec_;
  double t_ = 0.0;
  double last_end_ = 0.0;
  std::vector<size_t> next_index_;
  std::vector<RunningKernel> active_;
  AffinityHistory history_;
  std::set<std::string> warned_;
  SimTrace trace_;
};

}  // namespace

SimTrace run_scenario(const Scenario& scenario) {
  const ValidatedSpec spec = validate_spec(scenario.gpu);
  Simulation sim(scenario, spec);
  return sim.run();
}

}  // namespace comppow

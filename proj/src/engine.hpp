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

#ifndef COMPPOW_ENGINE_HPP_
#define COMPPOW_ENGINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "actuators.hpp"
#include "policy.hpp"
#include "scenario.hpp"
#include "workload.hpp"

namespace comppow {

// Peak rates available to one kernel during a control step.
struct ResourceRates {
  double compute_flops_per_s = 0.0;
  double hbm_bytes_per_s = 0.0;
  double iod_bytes_per_s = 0.0;
};

// Common contention scale per byte resource: every kernel's consumption is
// scaled by this factor so the resource totals at most its peak.
struct ResourceScales {
  double hbm = 1.0;
  double iod = 1.0;
};

// Unconstrained byte consumption rate of one kernel (what it would draw
// with the whole resource to itself at the current clock and CU split).
struct ByteDemandRates {
  double hbm = 0.0;
  double iod = 0.0;
};

struct KernelState {
  KernelDesc desc;
  DemandVector demand;
  double progress = 0.0;  // fraction of demand completed, in [0,1]
  std::optional<double> start_time_s;
  std::optional<double> end_time_s;
};

struct PowerSample {
  double t_s = 0.0;
  double f_mhz = 0.0;
  PowerBreakdown power;
  std::vector<std::string> active_ids;  // stream order
  ComponentArray utilization{};         // GPU-level per-component
};

struct KernelTimeline {
  std::string id;
  std::string op;        // "gemm" | "all_gather"
  int stream = 0;
  int iteration = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  // Integrated work over the kernel's active window, for conservation checks.
  double flops_done = 0.0;
  double hbm_bytes_done = 0.0;
  double iod_bytes_done = 0.0;
  ComponentArray avg_utilization{};  // time-weighted per-kernel utilization
};

struct SimTrace {
  double dt_s = 0.0;
  double makespan_s = 0.0;
  std::vector<PowerSample> samples;
  std::vector<KernelTimeline> timelines;
  std::vector<std::string> warnings;
};

// ---- Per-kernel roofline ----------------------------------------------- //

// Rates a kernel sees at clock f with `cu_frac` of the CUs and the given
// fractions of the byte resources. All-gather byte rates are additionally
// gated by min(link_bw, allocated-CU copy rate), the copy rate scaling with
// (f/f_ref)^copy_freq_exponent.
ResourceRates kernel_rates(const KernelDesc& desc, const ValidatedSpec& spec,
                           double f_mhz, double cu_frac, double hbm_share,
                           double iod_share);

// Remaining seconds: (1-progress) * max over resources of demand/rate, with
// zero-demand terms excluded. Infinite when some demanded resource has zero
// rate (a stall); zero when the kernel has no demand at all.
double kernel_remaining_seconds(const DemandVector& demand, double progress,
                                const ResourceRates& rates);

// Per-kernel utilization of (xcd, iod, hbm): each resource's busy time over
// the bottleneck time. The bottleneck resource reads exactly 1.
ComponentArray kernel_utilizations(const DemandVector& demand,
                                   const ResourceRates& rates);

// ---- GPU-level aggregation ---------------------------------------------- //

// One active kernel as seen by the frequency governor.
struct GovernorKernel {
  DemandVector demand;
  bool is_allgather = false;
  double cu_frac = 1.0;
  double hbm_share = 1.0;
  double iod_share = 1.0;
};

struct GpuLoad {
  ComponentArray utilization{};  // die-level utilization driving power
  PowerBreakdown power;
};

// Die-level utilizations at clock f. XCD busy-ness sums each kernel's CU
// partition weighted by how busy the partition is (compute occupancy for
// GEMM, copy-issue occupancy for all-gather); IOD/HBM divide the summed
// achieved byte rates by the respective peak.
GpuLoad evaluate_gpu(const ValidatedSpec& spec,
                     const std::vector<GovernorKernel>& kernels, double f_mhz);

// Common per-resource scale so summed consumption never exceeds the peak:
// min(1, peak / sum of unconstrained demand rates).
ResourceScales contention_shares(const ValidatedSpec& spec,
                                 const std::vector<ByteDemandRates>& demands);

// Largest f on the 1 MHz lattice within [f_min, min(f_max, freq_cap)] whose
// total power stays within settings.power_cap_w; f_min when even that
// exceeds the cap (the governor cannot gate below f_min).
double solve_frequency(const ValidatedSpec& spec,
                       const std::vector<GovernorKernel>& kernels,
                       const ActuatorSettings& settings);

// ---- Simulation --------------------------------------------------------- //

// Fixed-step, deterministic simulation of a validated scenario. Kernel
// completions land on exact instants; stream successors launch at the next
// step boundary.
SimTrace run_scenario(const Scenario& scenario);

}  // namespace comppow

#endif  // COMPPOW_ENGINE_HPP_

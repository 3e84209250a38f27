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

#include "workload.hpp"

#include <cmath>

namespace comppow {

namespace {

// Overflow-checked product of non-negative 64-bit counts.
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw ValidationError(std::string(what) + " overflows the 64-bit counter");
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    throw ValidationError(std::string(what) + " overflows the 64-bit counter");
  return out;
}

}  // namespace

void validate_kernel(const KernelDesc& desc) {
  std::vector<std::string> bad;
  if (desc.id.empty()) bad.push_back("kernel id must be non-empty");

  if (const GemmOp* g = std::get_if<GemmOp>(&desc.op)) {
    if (g->m < 1 || g->n < 1 || g->k < 1) bad.push_back(desc.id + ": gemm dimensions must be >= 1");
    if (g->dtype_bytes != 1 && g->dtype_bytes != 2 && g->dtype_bytes != 4 && g->dtype_bytes != 8)
      bad.push_back(desc.id + ": dtype_bytes must be one of {1,2,4,8}");
    if (!(g->traffic_multiplier >= 1.0))
      bad.push_back(desc.id + ": traffic_multiplier must be >= 1");
  } else {
    const AllGatherOp& a = std::get<AllGatherOp>(desc.op);
    if (a.world_size < 1) bad.push_back(desc.id + ": world_size must be >= 1");
    if (a.total_bytes < 0) bad.push_back(desc.id + ": total_bytes must be >= 0");
    if (a.world_size >= 1 && a.total_bytes % a.world_size != 0)
      bad.push_back(desc.id + ": total_bytes not divisible by world_size (pad before submitting)");
  }

  if (!desc.phases.empty()) {
    double sum = 0.0;
    for (const PhaseHint& p : desc.phases) {
      sum += p.fraction;
      if (!(p.fraction > 0.0)) bad.push_back(desc.id + ": phase fraction must be positive");
      for (double u : p.utilization)
        if (u < 0.0 || u > 1.0) bad.push_back(desc.id + ": phase utilization outside [0,1]");
    }
    if (std::abs(sum - 1.0) > 1e-9) bad.push_back(desc.id + ": phase fractions must sum to 1");
  }

  if (!bad.empty()) throw ValidationError(std::move(bad));
}

DemandVector gemm_demand(const GemmOp& g) {
  if (g.m < 1 || g.n < 1 || g.k < 1)
    throw ValidationError("gemm dimensions must be >= 1");
  const auto m = static_cast<std::uint64_t>(g.m);
  const auto n = static_cast<std::uint64_t>(g.n);
  const auto k = static_cast<std::uint64_t>(g.k);

  const std::uint64_t flops =
      checked_mul(2, checked_mul(checked_mul(m, n, "gemm flop count"), k, "gemm flop count"),
                  "gemm flop count");
  std::uint64_t elems = checked_add(checked_mul(m, k, "gemm traffic"),
                                    checked_mul(k, n, "gemm traffic"), "gemm traffic");
  elems = checked_add(elems, checked_mul(m, n, "gemm traffic"), "gemm traffic");
  const std::uint64_t ideal_bytes =
      checked_mul(elems, static_cast<std::uint64_t>(g.dtype_bytes), "gemm traffic");

  const double bytes = static_cast<double>(ideal_bytes) * g.traffic_multiplier;
  return DemandVector{static_cast<double>(flops), bytes, bytes};
}

DemandVector allgather_demand(const AllGatherOp& a) {
  if (a.world_size < 1) throw ValidationError("world_size must be >= 1");
  if (a.total_bytes % a.world_size != 0)
    throw ValidationError("total_bytes not divisible by world_size");
  const std::int64_t shard = a.total_bytes / a.world_size;
  // Each GPU sends its shard to every peer and receives every peer's shard.
  const double moved = 2.0 * static_cast<double>(a.world_size - 1) *
                       static_cast<double>(shard);
  return DemandVector{0.0, moved, moved};
}

DemandVector kernel_demand(const KernelDesc& desc) {
  if (const GemmOp* g = std::get_if<GemmOp>(&desc.op)) return gemm_demand(*g);
  return allgather_demand(std::get<AllGatherOp>(desc.op));
}

double arithmetic_intensity(const DemandVector& d) {
  if (!(d.hbm_bytes > 0.0))
    throw ValidationError("arithmetic intensity undefined: no HBM traffic");
  return d.flops / d.hbm_bytes;
}

ComponentKind infer_affinity(const DemandVector& d, const ValidatedSpec& spec) {
  if (d.flops <= 0.0) return ComponentKind::Iod;   // pure data movement
  if (d.hbm_bytes <= 0.0) return ComponentKind::Xcd;  // pure compute
  return arithmetic_intensity(d) >= spec.machine_balance() ? ComponentKind::Xcd
                                                           : ComponentKind::Iod;
}

}  // namespace comppow

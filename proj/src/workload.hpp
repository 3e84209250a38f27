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

#ifndef COMPPOW_WORKLOAD_HPP_
#define COMPPOW_WORKLOAD_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gpu_model.hpp"
#include "types.hpp"

namespace comppow {

enum class Criticality { Critical, Deferrable, Unspecified };

// Intra-kernel phase hint: a fraction of the kernel's work plus the
// utilization signature software expects during that phase.
struct PhaseHint {
  double fraction = 0.0;
  ComponentArray utilization{};  // hinted (u_xcd, u_iod, u_hbm)
};

struct GemmOp {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t k = 0;
  int dtype_bytes = 2;
  // Measured-vs-ideal traffic gap; >= 1. Scales both HBM and IOD bytes.
  double traffic_multiplier = 1.0;
};

struct AllGatherOp {
  std::int64_t total_bytes = 0;  // result size; every rank ends with this
  int world_size = 8;
};

struct KernelDesc {
  std::string id;
  std::variant<GemmOp, AllGatherOp> op;
  Criticality criticality = Criticality::Unspecified;
  std::optional<ComponentKind> affinity_hint;
  std::vector<PhaseHint> phases;  // optional; empty = no phase hints

  bool is_gemm() const { return std::holds_alternative<GemmOp>(op); }
  const char* op_name() const { return is_gemm() ? "gemm" : "all_gather"; }
};

// Resource demands of one kernel execution.
struct DemandVector {
  double flops = 0.0;
  double hbm_bytes = 0.0;
  double iod_bytes = 0.0;

  bool runnable() const { return flops > 0.0 || hbm_bytes > 0.0 || iod_bytes > 0.0; }
};

// Throws ValidationError listing every violated field constraint.
void validate_kernel(const KernelDesc& desc);

// flops = 2*m*n*k; bytes = dtype * (m*k + k*n + m*n) * traffic_multiplier.
// Rejects on 64-bit overflow of the flop or byte counters.
DemandVector gemm_demand(const GemmOp& g);

// shard = total/world; moved bytes = sent + received = 2*(world-1)*shard.
DemandVector allgather_demand(const AllGatherOp& a);

DemandVector kernel_demand(const KernelDesc& desc);

// flops per HBM byte. Zero hbm_bytes has no defined intensity and throws;
// callers treat that case as pure compute.
double arithmetic_intensity(const DemandVector& d);

// Compute-affine iff intensity >= machine balance; pure data movement is
// IOD-affine. Ties go to the compute side.
ComponentKind infer_affinity(const DemandVector& d, const ValidatedSpec& spec);

}  // namespace comppow

#endif  // COMPPOW_WORKLOAD_HPP_

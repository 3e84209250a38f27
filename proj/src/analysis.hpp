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

#ifndef COMPPOW_ANALYSIS_HPP_
#define COMPPOW_ANALYSIS_HPP_

#include <map>
#include <string>
#include <vector>

#include "engine.hpp"
#include "types.hpp"

namespace comppow {

struct Metrics {
  PowerBreakdown energy_j;      // per-component + total joules
  double makespan_s = 0.0;
  PowerBreakdown avg_power_w;   // energy / makespan (zeros for empty traces)
  std::map<std::string, double> kernel_durations_s;  // last completion per id
};

// Exposed/overlapped wall-clock accounting over [0, makespan].
struct OverlapReport {
  double gemm_only_s = 0.0;
  double comm_only_s = 0.0;
  double other_only_s = 0.0;
  double overlapped_s = 0.0;
  double idle_s = 0.0;
  double makespan_s = 0.0;

  double fraction(double v) const { return makespan_s > 0.0 ? v / makespan_s : 0.0; }
};

// Rectangle-rule integration of the trace. Samples hold between control
// steps, so for this engine the rule is exact; the final (possibly
// shortened) step is weighted by its actual width.
Metrics energy(const SimTrace& trace);

// savings% = (E_base - E_var)/E_base * 100; loss% = (T_var - T_base)/T_base
// * 100. Negative loss is a speedup.
std::pair<double, double> savings_and_loss(const Metrics& base,
                                           const Metrics& variant);

std::vector<double> normalize(const std::vector<double>& series, double reference);

// Sample Pearson correlation; both series must be non-constant.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct IntervalRecord {
  int stream = 0;
  std::string category;  // "gemm" | "comm" | anything else => other
  double start_s = 0.0;
  double end_s = 0.0;
};

// Sweep-line accounting: instants with >= 2 streams active are overlapped,
// exactly one exposes that stream's category, zero is idle. Intervals are
// half-open, so touching endpoints do not overlap. Intervals within one
// stream must not overlap each other.
OverlapReport overlap_accounting(std::vector<IntervalRecord> intervals,
                                 double makespan_s);

// Per-category timeline intervals of a finished run.
std::vector<IntervalRecord> trace_intervals(const SimTrace& trace);

OverlapReport trace_overlap(const SimTrace& trace);

}  // namespace comppow

#endif  // COMPPOW_ANALYSIS_HPP_

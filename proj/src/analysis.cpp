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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>

namespace comppow {

Metrics energy(const SimTrace& trace) {
  Metrics m;
  m.makespan_s = trace.makespan_s;
  if (trace.samples.empty()) return m;

  double ex = 0.0, ei = 0.0, eh = 0.0;
  for (size_t i = 0; i < trace.samples.size(); ++i) {
    const PowerSample& s = trace.samples[i];
    const double t_next = i + 1 < trace.samples.size()
                              ? trace.samples[i + 1].t_s
                              : trace.makespan_s;
    const double width = std::max(0.0, t_next - s.t_s);
    ex += s.power.xcd * width;
    ei += s.power.iod * width;
    eh += s.power.hbm * width;
  }
  m.energy_j = PowerBreakdown::make(ex, ei, eh);
  if (m.makespan_s > 0.0)
    m.avg_power_w = PowerBreakdown::make(ex / m.makespan_s, ei / m.makespan_s,
                                         eh / m.makespan_s);
  for (const KernelTimeline& tl : trace.timelines)
    m.kernel_durations_s[tl.id] = tl.end_s - tl.start_s;
  return m;
}

std::pair<double, double> savings_and_loss(const Metrics& base,
                                           const Metrics& variant) {
  if (!(base.energy_j.total > 0.0))
    throw ValidationError("baseline energy must be positive");
  if (!(base.makespan_s > 0.0))
    throw ValidationError("baseline makespan must be positive");
  const double savings =
      (base.energy_j.total - variant.energy_j.total) / base.energy_j.total * 100.0;
  const double loss =
      (variant.makespan_s - base.makespan_s) / base.makespan_s * 100.0;
  return {savings, loss};
}

std::vector<double> normalize(const std::vector<double>& series,
                              double reference) {
  if (reference == 0.0) throw ValidationError("normalization reference is zero");
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series) out.push_back(v / reference);
  return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw ValidationError("pearson: series lengths differ");
  const size_t n = xs.size();
  if (n < 2) throw ValidationError("pearson: need at least two points");

  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ValidationError("pearson: correlation undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

int category_index(const std::string& c) {
  if (c == "gemm") return 0;
  if (c == "comm") return 1;
  return 2;  // other
}

}  // namespace

OverlapReport overlap_accounting(std::vector<IntervalRecord> intervals,
                                 double makespan_s) {
  if (!(makespan_s >= 0.0)) throw ValidationError("negative makespan");
  OverlapReport rep;
  rep.makespan_s = makespan_s;
  if (makespan_s == 0.0) return rep;

  std::map<int, std::vector<IntervalRecord>> per_stream;
  for (const IntervalRecord& iv : intervals) {
    if (iv.end_s < iv.start_s)
      throw ValidationError("interval with end before start");
    if (iv.start_s < 0.0 || iv.end_s > makespan_s + 1e-12)
      throw ValidationError("interval outside [0, makespan]");
    if (iv.end_s > iv.start_s) per_stream[iv.stream].push_back(iv);
  }
  for (auto& [stream, ivs] : per_stream) {
    std::sort(ivs.begin(), ivs.end(),
              [](const IntervalRecord& a, const IntervalRecord& b) {
                return a.start_s < b.start_s;
              });
    for (size_t i = 1; i < ivs.size(); ++i)
      if (ivs[i].start_s < ivs[i - 1].end_s - 1e-12)
        throw ValidationError("overlapping intervals within stream " +
                              std::to_string(stream));
  }

  std::vector<double> bounds{0.0, makespan_s};
  for (const auto& [stream, ivs] : per_stream)
    for (const IntervalRecord& iv : ivs) {
      bounds.push_back(iv.start_s);
      bounds.push_back(iv.end_s);
    }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  for (size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double lo = bounds[b];
    const double hi = bounds[b + 1];
    if (hi <= lo || lo >= makespan_s) continue;
    const double mid = lo + (hi - lo) / 2.0;
    const double width = std::min(hi, makespan_s) - lo;

    int streams_active = 0;
    int category = -1;
    for (const auto& [stream, ivs] : per_stream) {
      for (const IntervalRecord& iv : ivs) {
        if (iv.start_s <= mid && mid < iv.end_s) {
          ++streams_active;
          category = category_index(iv.category);
          break;
        }
      }
    }
    if (streams_active == 0)
      rep.idle_s += width;
    else if (streams_active >= 2)
      rep.overlapped_s += width;
    else if (category == 0)
      rep.gemm_only_s += width;
    else if (category == 1)
      rep.comm_only_s += width;
    else
      rep.other_only_s += width;
  }
  return rep;
}

std::vector<IntervalRecord> trace_intervals(const SimTrace& trace) {
  std::vector<IntervalRecord> out;
  out.reserve(trace.timelines.size());
  for (const KernelTimeline& tl : trace.timelines)
    out.push_back(IntervalRecord{tl.stream,
                                 tl.op == "gemm" ? "gemm" : "comm",
                                 tl.start_s, tl.end_s});
  return out;
}

OverlapReport trace_overlap(const SimTrace& trace) {
  return overlap_accounting(trace_intervals(trace), trace.makespan_s);
}

}  // namespace comppow

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

#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace comppow {

using nlohmann::json;

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string trace_to_csv(const SimTrace& trace) {
  std::string out =
      "t_s,f_mhz,p_xcd_w,p_iod_w,p_hbm_w,p_total_w,active_kernels,u_xcd,u_iod,u_hbm\n";
  for (const PowerSample& s : trace.samples) {
    out += fmt9(s.t_s);
    out += ',';
    out += fmt9(s.f_mhz);
    out += ',';
    out += fmt9(s.power.xcd);
    out += ',';
    out += fmt9(s.power.iod);
    out += ',';
    out += fmt9(s.power.hbm);
    out += ',';
    out += fmt9(s.power.total);
    out += ',';
    for (size_t i = 0; i < s.active_ids.size(); ++i) {
      if (i) out += ';';
      out += s.active_ids[i];
    }
    out += ',';
    out += fmt9(at(s.utilization, ComponentKind::Xcd));
    out += ',';
    out += fmt9(at(s.utilization, ComponentKind::Iod));
    out += ',';
    out += fmt9(at(s.utilization, ComponentKind::Hbm));
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EngineError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw EngineError("failed writing '" + path + "'");
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_trace_csv(const SimTrace& trace, const std::string& path) {
  write_text_file(path, trace_to_csv(trace));
}

json overlap_to_json(const OverlapReport& rep) {
  json j;
  j["gemm_only_s"] = rep.gemm_only_s;
  j["comm_only_s"] = rep.comm_only_s;
  j["other_s"] = rep.other_only_s;
  j["overlapped_s"] = rep.overlapped_s;
  j["idle_s"] = rep.idle_s;
  j["gemm_only_frac"] = rep.fraction(rep.gemm_only_s);
  j["comm_only_frac"] = rep.fraction(rep.comm_only_s);
  j["other_frac"] = rep.fraction(rep.other_only_s);
  j["overlapped_frac"] = rep.fraction(rep.overlapped_s);
  j["idle_frac"] = rep.fraction(rep.idle_s);
  j["makespan_s"] = rep.makespan_s;
  return j;
}

json metrics_to_json(const Metrics& metrics, const OverlapReport& overlap,
                     const std::vector<std::string>& warnings) {
  json j;
  j["energy_j"] = {{"xcd", metrics.energy_j.xcd},
                   {"iod", metrics.energy_j.iod},
                   {"hbm", metrics.energy_j.hbm},
                   {"total", metrics.energy_j.total}};
  j["makespan_s"] = metrics.makespan_s;
  j["avg_power_w"] = {{"xcd", metrics.avg_power_w.xcd},
                      {"iod", metrics.avg_power_w.iod},
                      {"hbm", metrics.avg_power_w.hbm},
                      {"total", metrics.avg_power_w.total}};
  j["overlap"] = overlap_to_json(overlap);
  json durations = json::object();
  for (const auto& [id, d] : metrics.kernel_durations_s) durations[id] = d;
  j["kernel_durations_s"] = durations;
  j["warnings"] = warnings;
  return j;
}

void write_metrics_json(const SimTrace& trace, const std::string& path) {
  write_json_file(path, metrics_to_json(energy(trace), trace_overlap(trace),
                                        trace.warnings));
}

std::vector<IntervalRecord> read_intervals_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError(path + ": empty file");
  // Tolerate a UTF-8 BOM and whitespace around the header.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);
  if (line.find("stream") == std::string::npos)
    throw ValidationError(path + ": expected header 'stream,category,start_s,end_s'");

  std::vector<IntervalRecord> out;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string stream_s, category, start_s, end_s;
    if (!std::getline(row, stream_s, ',') || !std::getline(row, category, ',') ||
        !std::getline(row, start_s, ',') || !std::getline(row, end_s))
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected 4 comma-separated fields");
    IntervalRecord rec;
    try {
      rec.stream = std::stoi(stream_s);
      rec.start_s = std::stod(start_s);
      rec.end_s = std::stod(end_s);
    } catch (const std::exception&) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": malformed numeric field");
    }
    rec.category = category;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace comppow

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

#ifndef COMPPOW_IO_HPP_
#define COMPPOW_IO_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "engine.hpp"

namespace comppow {

// %.9g — nine significant digits, for reproducible CSV output.
std::string fmt9(double v);

// CSV with header
//   t_s,f_mhz,p_xcd_w,p_iod_w,p_hbm_w,p_total_w,active_kernels,u_xcd,u_iod,u_hbm
// one row per sample, active kernel ids joined with ';'.
std::string trace_to_csv(const SimTrace& trace);
void write_trace_csv(const SimTrace& trace, const std::string& path);

nlohmann::json metrics_to_json(const Metrics& metrics, const OverlapReport& overlap,
                               const std::vector<std::string>& warnings);
void write_metrics_json(const SimTrace& trace, const std::string& path);

nlohmann::json overlap_to_json(const OverlapReport& rep);

// `stream,category,start_s,end_s` rows, header required.
std::vector<IntervalRecord> read_intervals_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace comppow

#endif  // COMPPOW_IO_HPP_

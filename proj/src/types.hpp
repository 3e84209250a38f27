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

#ifndef COMPPOW_TYPES_HPP_
#define COMPPOW_TYPES_HPP_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace comppow {

// The three power-relevant dies of the modeled GPU. Every power breakdown
// covers exactly these three.
enum class ComponentKind { Xcd = 0, Iod = 1, Hbm = 2 };

inline constexpr std::array<ComponentKind, 3> kAllComponents = {
    ComponentKind::Xcd, ComponentKind::Iod, ComponentKind::Hbm};

inline constexpr const char* to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::Xcd: return "xcd";
    case ComponentKind::Iod: return "iod";
    case ComponentKind::Hbm: return "hbm";
  }
  return "?";
}

inline std::optional<ComponentKind> component_from_string(std::string_view s) {
  if (s == "xcd") return ComponentKind::Xcd;
  if (s == "iod") return ComponentKind::Iod;
  if (s == "hbm") return ComponentKind::Hbm;
  return std::nullopt;
}

// Per-component utilization (or power) triple, indexed by ComponentKind.
using ComponentArray = std::array<double, 3>;

inline double& at(ComponentArray& a, ComponentKind k) {
  return a[static_cast<size_t>(k)];
}
inline double at(const ComponentArray& a, ComponentKind k) {
  return a[static_cast<size_t>(k)];
}

struct PowerBreakdown {
  double xcd = 0.0;
  double iod = 0.0;
  double hbm = 0.0;
  double total = 0.0;

  // Single construction point so the summation order is identical everywhere
  // and `total == xcd + iod + hbm` holds bit-exactly.
  static PowerBreakdown make(double x, double i, double h) {
    return PowerBreakdown{x, i, h, x + i + h};
  }
  double component(ComponentKind k) const {
    switch (k) {
      case ComponentKind::Xcd: return xcd;
      case ComponentKind::Iod: return iod;
      case ComponentKind::Hbm: return hbm;
    }
    return 0.0;
  }
};

// Invalid input: bad spec, bad scenario, contract violation. Carries every
// violated invariant, not just the first one found.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::string message)
      : std::runtime_error(std::move(message)), violations_{what()} {}
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) out += "; ";
      out += v[i];
    }
    return out.empty() ? std::string("validation failed") : out;
  }
  std::vector<std::string> violations_;
};

// Failure while running: engine stall, file I/O, internal inconsistency.
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace comppow

#endif  // COMPPOW_TYPES_HPP_

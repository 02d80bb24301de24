#pragma once

#include <string>
#include <vector>

namespace spm {

/// Outcome of one numerically checked property. `worst` is the worst observed
/// margin (negative means the property was violated by that amount).
struct CheckResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;

  bool ok() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

}  // namespace spm

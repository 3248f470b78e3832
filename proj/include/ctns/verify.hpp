#pragma once

#include <string>
#include <vector>

namespace ctns {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// operators, coefficients, inequality, energy, weak
const std::vector<std::string>& suite_names();

/// Runs one named property suite. Throws InvalidArgument for unknown names.
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace ctns

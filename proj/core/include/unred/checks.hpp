#pragma once

// Fast invariant checks for every module, run by `unred check`.

#include <string>
#include <vector>

namespace unred {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;  // bound it is compared against
  std::string detail;      // error text when the check threw
};

std::vector<CheckResult> run_builtin_checks();

}  // namespace unred

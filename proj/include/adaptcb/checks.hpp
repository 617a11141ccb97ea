#pragma once

#include <string>
#include <vector>

namespace adaptcb {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runnable invariants with fixed internal seeds. `suite` is one of
/// selectors, master, oracle, env, all; anything else is a ConfigError.
std::vector<CheckResult> run_checks(const std::string& suite);

}  // namespace adaptcb

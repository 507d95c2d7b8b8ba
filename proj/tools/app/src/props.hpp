#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace compactness::app {

struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
};

/// Runs the built-in randomized property suites with fixed seeds. `cases`
/// caps the randomized case count per suite (default 10^4).
std::vector<PropertyResult> run_property_suites(std::optional<std::size_t> cases);

}  // namespace compactness::app

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace compactness {

using VarId = std::uint64_t;

enum class Stability {
  Stabilized,
  Unstable,
  /// The variable did not occur in any solved prefix of the window.
  Unassigned,
};

/// Heuristic: agreement across the window. Strong: the variable's whole
/// constraint component lies inside the solved prefix, so its canonical
/// value can no longer change.
enum class CertificateStrength { Heuristic, Strong };

std::string_view to_string(Stability s);
std::string_view to_string(CertificateStrength s);

template <typename Value>
struct CoordinateReport {
  VarId var = 0;
  Stability status = Stability::Unassigned;
  std::optional<Value> value;
  /// One entry per schedule step, absent where the variable was unassigned.
  std::vector<std::optional<Value>> history;
  CertificateStrength strength = CertificateStrength::Heuristic;
};

/// Outcome of limit extraction from prefix solutions. Stabilization is a
/// heuristic certificate; the verified prefix level is exact.
template <typename Value>
struct StabilizationReport {
  std::vector<std::size_t> levels;
  std::size_t verified_prefix = 0;
  std::vector<CoordinateReport<Value>> coordinates;
  std::map<VarId, Value> final_assignment;

  bool all_stabilized() const {
    for (const auto& c : coordinates) {
      if (c.status != Stability::Stabilized) return false;
    }
    return true;
  }
};

inline constexpr std::string_view kStabilizationNote =
    "stabilization is a heuristic certificate: existence of a global "
    "solution does not imply that canonical prefix solutions converge; "
    "verified prefix levels are exact";

}  // namespace compactness

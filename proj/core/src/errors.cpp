#include "compactness/errors.hpp"

#include <sstream>

namespace compactness {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EnvelopeStall: return "EnvelopeStall";
    case ErrorKind::NotPSummable: return "NotPSummable";
    case ErrorKind::InvalidRing: return "InvalidRing";
    case ErrorKind::UnassignedVariable: return "UnassignedVariable";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorKind::PrefixUnsatisfiable: return "PrefixUnsatisfiable";
    case ErrorKind::InconsistentSubsystem: return "InconsistentSubsystem";
    case ErrorKind::RankDeficiencyUnresolved: return "RankDeficiencyUnresolved";
    case ErrorKind::NormBudgetExceeded: return "NormBudgetExceeded";
    case ErrorKind::NoFeasibleSection: return "NoFeasibleSection";
    case ErrorKind::PrefixRootNotFound: return "PrefixRootNotFound";
  }
  return "Unknown";
}

std::string_view to_string(RootFailure cause) {
  switch (cause) {
    case RootFailure::None: return "none";
    case RootFailure::BudgetExhausted: return "budget_exhausted";
    case RootFailure::Stagnated: return "stagnated";
    case RootFailure::CertifiedInfeasible: return "certified_infeasible";
  }
  return "unknown";
}

namespace {

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << args);
  return os.str();
}

}  // namespace

EnvelopeStall::EnvelopeStall(double threshold, std::size_t max_depth)
    : Error(ErrorKind::EnvelopeStall,
            concat("tail envelope did not drop below ", threshold,
                   " within depth ", max_depth)),
      threshold_(threshold),
      max_depth_(max_depth) {}

NotPSummable::NotPSummable(std::string sequence, double exponent,
                           std::string reason)
    : Error(ErrorKind::NotPSummable,
            concat("sequence '", sequence, "' is not certifiably in l^",
                   exponent, ": ", reason)),
      sequence_(std::move(sequence)),
      exponent_(exponent),
      reason_(std::move(reason)) {}

UnassignedVariable::UnassignedVariable(std::uint64_t var)
    : Error(ErrorKind::UnassignedVariable,
            concat("variable x", var, " is not assigned")),
      var_(var) {}

SearchBudgetExceeded::SearchBudgetExceeded(std::size_t budget)
    : Error(ErrorKind::SearchBudgetExceeded,
            concat("search budget of ", budget, " evaluations exceeded")),
      budget_(budget) {}

PrefixUnsatisfiable::PrefixUnsatisfiable(std::size_t level,
                                         std::size_t scheduled_level)
    : Error(ErrorKind::PrefixUnsatisfiable,
            concat("prefix of length ", level, " has no common root")),
      level_(level),
      scheduled_level_(scheduled_level) {}

InconsistentSubsystem::InconsistentSubsystem(std::size_t rows,
                                             std::size_t truncation,
                                             double residual,
                                             bool persists_to_cap)
    : Error(ErrorKind::InconsistentSubsystem,
            concat("section with ", rows, " rows at truncation ", truncation,
                   " is inconsistent (residual ", residual, ")",
                   persists_to_cap ? ", also at the truncation cap" : "")),
      rows_(rows),
      truncation_(truncation),
      residual_(residual),
      persists_to_cap_(persists_to_cap) {}

NormBudgetExceeded::NormBudgetExceeded(std::size_t rows,
                                       std::size_t truncation,
                                       double section_norm,
                                       double lower_bound, double budget,
                                       bool certified)
    : Error(ErrorKind::NormBudgetExceeded,
            concat("minimum-norm section solution (", rows, " rows, H=",
                   truncation, ") has norm ", section_norm,
                   " above budget ", budget,
                   certified ? " (certified by dual bound)" : "")),
      rows_(rows),
      truncation_(truncation),
      section_norm_(section_norm),
      lower_bound_(lower_bound),
      budget_(budget),
      certified_(certified) {}

NoFeasibleSection::NoFeasibleSection(std::size_t step, std::size_t rows,
                                     std::string clause)
    : Error(ErrorKind::NoFeasibleSection,
            concat("no section vector satisfies the approximate conditions "
                   "at step ", step, " (", rows, " rows); failing clause ",
                   clause)),
      step_(step),
      rows_(rows),
      clause_(std::move(clause)) {}

PrefixRootNotFound::PrefixRootNotFound(std::size_t level, double best_value,
                                       RootFailure cause)
    : Error(ErrorKind::PrefixRootNotFound,
            concat("no common root found for prefix ", level,
                   " (best max residual ", best_value, ", ",
                   to_string(cause), ")")),
      level_(level),
      best_value_(best_value),
      cause_(cause) {}

}  // namespace compactness

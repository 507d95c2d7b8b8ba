#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace compactness {

enum class ErrorKind {
  EnvelopeStall,
  NotPSummable,
  InvalidRing,
  UnassignedVariable,
  SearchBudgetExceeded,
  PrefixUnsatisfiable,
  InconsistentSubsystem,
  RankDeficiencyUnresolved,
  NormBudgetExceeded,
  NoFeasibleSection,
  PrefixRootNotFound,
};

std::string_view to_string(ErrorKind kind);

/// Base of every domain error raised by the solvers and verifiers.
///
/// Precondition violations on arguments (non-positive tolerances, bad
/// schedules) are reported with std::invalid_argument instead.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class EnvelopeStall : public Error {
public:
  EnvelopeStall(double threshold, std::size_t max_depth);
  double threshold() const noexcept { return threshold_; }
  std::size_t max_depth() const noexcept { return max_depth_; }

private:
  double threshold_;
  std::size_t max_depth_;
};

class NotPSummable : public Error {
public:
  NotPSummable(std::string sequence, double exponent, std::string reason);
  const std::string& sequence() const noexcept { return sequence_; }
  double exponent() const noexcept { return exponent_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  std::string sequence_;
  double exponent_;
  std::string reason_;
};

class InvalidRing : public Error {
public:
  explicit InvalidRing(const std::string& reason)
      : Error(ErrorKind::InvalidRing, "invalid ring: " + reason) {}
};

class UnassignedVariable : public Error {
public:
  explicit UnassignedVariable(std::uint64_t var);
  std::uint64_t var() const noexcept { return var_; }

private:
  std::uint64_t var_;
};

class SearchBudgetExceeded : public Error {
public:
  explicit SearchBudgetExceeded(std::size_t budget);
  std::size_t budget() const noexcept { return budget_; }

private:
  std::size_t budget_;
};

/// A finite prefix of a ring constraint stream has no common root.
/// `level` is the shortest unsatisfiable prefix; `scheduled_level` is the
/// schedule entry at which the failure was first observed.
class PrefixUnsatisfiable : public Error {
public:
  PrefixUnsatisfiable(std::size_t level, std::size_t scheduled_level);
  std::size_t level() const noexcept { return level_; }
  std::size_t scheduled_level() const noexcept { return scheduled_level_; }

private:
  std::size_t level_;
  std::size_t scheduled_level_;
};

/// A finite section has no solution within tolerance. `persists_to_cap`
/// records whether the section stays inconsistent at the truncation cap,
/// which is what separates a truncation artifact from infeasibility.
class InconsistentSubsystem : public Error {
public:
  InconsistentSubsystem(std::size_t rows, std::size_t truncation,
                        double residual, bool persists_to_cap = false);
  std::size_t rows() const noexcept { return rows_; }
  std::size_t truncation() const noexcept { return truncation_; }
  double residual() const noexcept { return residual_; }
  bool persists_to_cap() const noexcept { return persists_to_cap_; }

private:
  std::size_t rows_;
  std::size_t truncation_;
  double residual_;
  bool persists_to_cap_;
};

class RankDeficiencyUnresolved : public Error {
public:
  explicit RankDeficiencyUnresolved(const std::string& detail)
      : Error(ErrorKind::RankDeficiencyUnresolved,
              "rank deficiency unresolved: " + detail) {}
};

/// The minimum-norm section solution is larger than the norm budget.
/// `certified` is set when a dual lower bound valid for every solution of
/// the full (untruncated) rows also exceeds the budget.
class NormBudgetExceeded : public Error {
public:
  NormBudgetExceeded(std::size_t rows, std::size_t truncation,
                     double section_norm, double lower_bound, double budget,
                     bool certified);
  std::size_t rows() const noexcept { return rows_; }
  std::size_t truncation() const noexcept { return truncation_; }
  double section_norm() const noexcept { return section_norm_; }
  double lower_bound() const noexcept { return lower_bound_; }
  double budget() const noexcept { return budget_; }
  bool certified() const noexcept { return certified_; }

private:
  std::size_t rows_;
  std::size_t truncation_;
  double section_norm_;
  double lower_bound_;
  double budget_;
  bool certified_;
};

class NoFeasibleSection : public Error {
public:
  NoFeasibleSection(std::size_t step, std::size_t rows, std::string clause);
  /// 1-based schedule step.
  std::size_t step() const noexcept { return step_; }
  std::size_t rows() const noexcept { return rows_; }
  const std::string& clause() const noexcept { return clause_; }

private:
  std::size_t step_;
  std::size_t rows_;
  std::string clause_;
};

enum class RootFailure {
  None,
  BudgetExhausted,
  Stagnated,
  CertifiedInfeasible,
};

std::string_view to_string(RootFailure cause);

class PrefixRootNotFound : public Error {
public:
  PrefixRootNotFound(std::size_t level, double best_value, RootFailure cause);
  std::size_t level() const noexcept { return level_; }
  double best_value() const noexcept { return best_value_; }
  RootFailure cause() const noexcept { return cause_; }

private:
  std::size_t level_;
  double best_value_;
  RootFailure cause_;
};

}  // namespace compactness

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "compactness/errors.hpp"
#include "compactness/stabilization.hpp"

namespace compactness {

/// A continuous function of finitely many real variables.
class FiniteSupportFunction {
public:
  /// Arguments arrive in the order of `support`.
  using Evaluator = std::function<double(std::span<const double>)>;
  /// Upper bound on the l-infinity Lipschitz constant over the sub-box
  /// [lo, hi] (both indexed like `support`).
  using Modulus = std::function<double(std::span<const double> lo,
                                       std::span<const double> hi)>;

  FiniteSupportFunction(std::vector<VarId> support, Evaluator evaluate,
                        Modulus modulus = {});

  struct RealTerm {
    double coeff = 0.0;
    std::vector<VarId> vars;  // multiset; repeats are powers
  };
  /// Real polynomial with an automatically derived Lipschitz modulus.
  static FiniteSupportFunction polynomial(std::vector<RealTerm> terms);

  const std::vector<VarId>& support() const noexcept { return support_; }
  double operator()(std::span<const double> args) const {
    return evaluate_(args);
  }
  bool has_modulus() const noexcept { return static_cast<bool>(modulus_); }
  double modulus(std::span<const double> lo, std::span<const double> hi) const {
    return modulus_(lo, hi);
  }

private:
  std::vector<VarId> support_;
  Evaluator evaluate_;
  Modulus modulus_;
};

/// Product of intervals [-M_i, M_i].
class VariableBox {
public:
  static VariableBox uniform(double M);
  /// Per-variable bounds, `rest` for unlisted variables (nullopt: unlisted
  /// variables are an error).
  static VariableBox per_var(std::map<VarId, double> bounds,
                             std::optional<double> rest = std::nullopt);

  double bound(VarId v) const;
  bool contains(VarId v, double x) const { return std::abs(x) <= bound(v); }

private:
  std::map<VarId, double> bounds_;
  std::optional<double> rest_;
};

struct RootSearchOptions {
  double tol = 1e-6;
  std::size_t budget = 1'000'000;
};

struct RootSearchResult {
  /// Sorted union of the functions' supports.
  std::vector<VarId> vars;
  /// Present iff max_f |f(point)| <= tol.
  std::optional<std::vector<double>> point;
  std::vector<double> best_point;
  double best_value = 0.0;
  /// Best value after each grid round and each refinement sweep.
  std::vector<double> progress;
  RootFailure failure = RootFailure::None;
  std::size_t evaluations = 0;
};

/// Grid refinement (grid doubled each round, minimizing max_f |f| with
/// lexicographic tie-breaking) followed by coordinate-wise bracket
/// refinement. `start`, when given, replaces the grid phase as the initial
/// point for the variables it lists.
RootSearchResult root_search(std::span<const FiniteSupportFunction> fs,
                             const VariableBox& box,
                             const RootSearchOptions& options = {},
                             const std::map<VarId, double>* start = nullptr);

/// A point (ordered like the sorted union support) with max_f |f| <= tol,
/// or nullopt when the budget runs out first.
std::optional<std::vector<double>> finite_root_search(
    std::span<const FiniteSupportFunction> fs, const VariableBox& box,
    double tol, std::size_t budget);

/// True when a Lipschitz covering proves that no point of the box has
/// max_f |f| <= tol. Needs moduli on the functions involved.
bool certify_no_root(std::span<const FiniteSupportFunction> fs,
                     const VariableBox& box, double tol, std::size_t budget);

struct FunctionStream {
  std::function<FiniteSupportFunction(std::size_t)> at;
  std::optional<std::size_t> length;

  std::vector<FiniteSupportFunction> prefix(std::size_t L) const;
  static FunctionStream from_list(std::vector<FiniteSupportFunction> fs);
};

struct BoxExtractOptions {
  std::size_t window = 2;
  double coord_tol = 1e-6;
  double tol = 1e-6;
  /// Evaluations per prefix.
  std::size_t budget = 1'000'000;
};

/// Root search on each scheduled prefix (warm-started from the previous
/// prefix), with per-coordinate stabilization. Throws PrefixRootNotFound.
StabilizationReport<double> box_compactness_extract(
    const FunctionStream& stream, const VariableBox& box,
    std::span<const std::size_t> schedule,
    const BoxExtractOptions& options = {});

}  // namespace compactness

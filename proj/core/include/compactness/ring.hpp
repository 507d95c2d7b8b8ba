#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compactness/stabilization.hpp"

namespace compactness {

using Element = std::uint32_t;

/// A finite ring given by explicit operation tables over ids 0..size-1.
class FiniteRing {
public:
  using Table = std::vector<std::vector<Element>>;

  /// Validates the ring axioms exhaustively; throws InvalidRing.
  static FiniteRing from_tables(Table add, Table mul, Element zero,
                                Element one);
  static FiniteRing zmod(std::size_t n);

  std::size_t size() const noexcept { return add_.size(); }
  Element zero() const noexcept { return zero_; }
  Element one() const noexcept { return one_; }
  Element add(Element a, Element b) const { return add_[a][b]; }
  Element mul(Element a, Element b) const { return mul_[a][b]; }
  const Table& add_table() const noexcept { return add_; }
  const Table& mul_table() const noexcept { return mul_; }

private:
  FiniteRing(Table add, Table mul, Element zero, Element one);

  Table add_;
  Table mul_;
  Element zero_;
  Element one_;
};

/// First violated axiom, or nullopt for a valid ring. Checks that addition
/// is an abelian group with identity `zero`, multiplication is associative
/// and distributes over addition on both sides, and `one` is a two-sided
/// identity.
std::optional<std::string> ring_axiom_violation(const FiniteRing::Table& add,
                                                const FiniteRing::Table& mul,
                                                Element zero, Element one);

struct RingTerm {
  Element coeff = 0;
  /// Monomial as a multiset of variable ids (repeats are powers).
  std::vector<VarId> vars;
};

class RingPolynomial {
public:
  RingPolynomial() = default;
  explicit RingPolynomial(std::vector<RingTerm> terms);

  static RingPolynomial constant(Element c);
  /// c * x_v
  static RingPolynomial variable(VarId v, Element c = 1);

  RingPolynomial operator+(const RingPolynomial& other) const;

  const std::vector<RingTerm>& terms() const noexcept { return terms_; }
  /// Sorted, duplicate-free union of the monomials' variables.
  const std::vector<VarId>& support() const noexcept { return support_; }

private:
  std::vector<RingTerm> terms_;
  std::vector<VarId> support_;
};

class PartialAssignment {
public:
  void set(VarId v, Element value) { values_[v] = value; }
  std::optional<Element> get(VarId v) const;
  bool contains(VarId v) const { return values_.count(v) != 0; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::map<VarId, Element>& values() const noexcept { return values_; }

  friend bool operator==(const PartialAssignment&,
                         const PartialAssignment&) = default;

private:
  std::map<VarId, Element> values_;
};

/// Countable presentation of a constraint set: enumerate(k) is the k-th
/// polynomial (0-based).
struct RingConstraintStream {
  std::function<RingPolynomial(std::size_t)> enumerate;
  /// nullopt for an unbounded stream.
  std::optional<std::size_t> length;
  /// Optional locality oracle: every constraint index touching a variable.
  /// Enables strong stabilization certificates.
  std::function<std::optional<std::vector<std::size_t>>(VarId)> touching;

  RingPolynomial at(std::size_t k) const;
  std::vector<RingPolynomial> prefix(std::size_t L) const;

  static RingConstraintStream from_list(std::vector<RingPolynomial> polys);
};

struct RingSearchOptions {
  /// Maximum number of search nodes (partial assignments) visited.
  std::size_t budget = 10'000'000;
};

/// Throws UnassignedVariable when a support variable is missing.
Element eval_poly(const RingPolynomial& p, const PartialAssignment& a,
                  const FiniteRing& ring);

/// Lexicographically least common root of `polys` (variables ordered by id,
/// values by element id) extending `fixed`, or nullopt. Complete
/// backtracking search; throws SearchBudgetExceeded.
std::optional<PartialAssignment> finite_sat(
    std::span<const RingPolynomial> polys, const FiniteRing& ring,
    const PartialAssignment& fixed, const RingSearchOptions& options = {});

std::optional<PartialAssignment> solve_prefix_canonical(
    const RingConstraintStream& stream, std::size_t L, const FiniteRing& ring,
    const RingSearchOptions& options = {});

/// Canonical prefix solutions at each scheduled length, with per-variable
/// stabilization over the last `window` steps. Throws PrefixUnsatisfiable
/// with the shortest failing prefix.
StabilizationReport<Element> compactness_solve_ring(
    const RingConstraintStream& stream, const FiniteRing& ring,
    std::span<const std::size_t> schedule, std::size_t window,
    std::span<const VarId> vars, const RingSearchOptions& options = {});

}  // namespace compactness

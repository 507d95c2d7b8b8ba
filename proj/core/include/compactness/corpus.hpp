#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "compactness/box.hpp"
#include "compactness/linear.hpp"
#include "compactness/ring.hpp"

namespace compactness::corpus {

/// Abian's system over the reals: the k-th function (k = 1..n_max) is
/// (x - k) - y_k^2, with x = variable 0 and y_k = variable k. The prefix
/// {1..n} has a root exactly when x >= n.
FunctionStream abian_family(std::size_t n_max);

/// Helly's row i (1-based): ones from position i on, stored 0-based from
/// index i - 1. Never in l^p, so this always throws NotPSummable.
LinearRow helly_row(std::size_t i, double p);

/// Attempts to build Helly's system; throws NotPSummable.
InfiniteLinearSystem helly_system(const ConjugatePair& pair);

/// The first k Helly rows cut to coordinates 0..width-1 (finite data, no
/// l^p claim about the full rows).
std::vector<LinearRow> helly_prefix_rows(std::size_t k, std::size_t width,
                                         double p);

/// x_k = 1 (1-based), every other coordinate 0: solves the first k rows.
std::vector<double> helly_prefix_solution(std::size_t k);

/// Rows with pseudo-random heads of `head_length` entries followed by a
/// geometric tail of ratio `decay`; b_i = a_i . x_star over x_star's support
/// and the norm budget is 1.5 ||x_star||_q (1 when x_star = 0).
///
/// All rows share the tail ratio, so with head_length or more rows the
/// coordinates 0..head_length-2 are determined by the system.
InfiniteLinearSystem planted_system(const std::vector<double>& x_star,
                                    const std::vector<std::uint64_t>& row_seeds,
                                    const ConjugatePair& pair, double decay,
                                    std::size_t head_length = 4);

/// x_k + x_{k+1} for k < length (unbounded when length is 0).
RingConstraintStream ring_chain(std::size_t length);
/// x_0 + 1, repeated `length` times.
RingConstraintStream ring_forced(std::size_t length);
/// x_0, x_0 + 1, x_0, ...
RingConstraintStream ring_alternating(std::size_t length);

/// f_0 = x_0 - 1/2, f_k = x_{k-1} - x_k for k >= 1.
FunctionStream box_chain(std::size_t length);
/// `length` copies of the constant zero function of x_0.
FunctionStream box_zero(std::size_t length);

struct FamilyDescriptor {
  std::string name;
  std::map<std::string, double> params;
};

/// Linear families: "helly" (throws NotPSummable) and "planted" with
/// params rows, support, x_ratio, decay, seed, head_length. x_star_n is
/// x_ratio^n for n < support.
InfiniteLinearSystem linear_family(const FamilyDescriptor& family,
                                   const ConjugatePair& pair);
/// Ring families: "chain", "forced", "alternating", each with `length`.
RingConstraintStream ring_family(const FamilyDescriptor& family);
/// Box families: "abian" (n_max), "chain" and "zero" (length).
FunctionStream box_family(const FamilyDescriptor& family);

std::vector<std::string> linear_families();
std::vector<std::string> ring_families();
std::vector<std::string> box_families();

/// Planted vector used by the "planted" family.
std::vector<double> planted_vector(const FamilyDescriptor& family);

}  // namespace compactness::corpus

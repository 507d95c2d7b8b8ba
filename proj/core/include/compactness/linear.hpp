#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compactness/sequences.hpp"
#include "compactness/stabilization.hpp"

namespace compactness {

struct LinearRow {
  PSummableSequence a;
  double b = 0.0;
};

/// Rows a_i . x = b_i with a_i in l^p, presented as a countable enumeration.
class InfiniteLinearSystem {
public:
  using RowFn = std::function<LinearRow(std::size_t)>;

  InfiniteLinearSystem(ConjugatePair pair, RowFn rows,
                       std::optional<std::size_t> row_count,
                       std::optional<double> norm_budget);

  static InfiniteLinearSystem from_rows(ConjugatePair pair,
                                        std::vector<LinearRow> rows,
                                        std::optional<double> norm_budget);

  const ConjugatePair& pair() const noexcept { return pair_; }
  std::optional<std::size_t> row_count() const noexcept { return row_count_; }
  std::optional<double> norm_budget() const noexcept { return norm_budget_; }
  /// Throws std::out_of_range beyond row_count, std::invalid_argument when
  /// the row's exponent is not pair().p().
  LinearRow row(std::size_t i) const;
  std::vector<LinearRow> rows(std::size_t k) const;

private:
  ConjugatePair pair_;
  RowFn rows_;
  std::optional<std::size_t> row_count_;
  std::optional<double> norm_budget_;
};

/// Per-coordinate bounds |x_n| <= M_n, M_n > 0.
class CoordinateBounds {
public:
  explicit CoordinateBounds(std::function<double(std::size_t)> bound);
  static CoordinateBounds uniform(double M);
  /// values[n] for n < values.size(), `rest` beyond.
  static CoordinateBounds from_values(std::vector<double> values, double rest);

  double operator()(std::size_t n) const;

private:
  std::function<double(std::size_t)> bound_;
};

/// Positive sequence e_N with a computable witness that it tends to zero.
class EnvelopeSequence {
public:
  EnvelopeSequence(std::vector<double> table,
                   std::function<double(std::size_t)> tail, double floor);

  double operator()(std::size_t N) const;
  /// Least N with e(N) < eps; throws EnvelopeStall past max_depth.
  std::size_t witness(double eps,
                      std::size_t max_depth = kDefaultMaxDepth) const;
  std::size_t table_size() const noexcept { return table_.size(); }

private:
  std::vector<double> table_;
  std::function<double(std::size_t)> tail_;
  double floor_;
};

inline constexpr double kEnvelopeFloor = 1e-300;

/// One step of a finite-section schedule: the first `rows` rows restricted
/// to coordinates 0..truncation.
struct SectionStep {
  std::size_t rows = 0;
  std::size_t truncation = 0;
};

struct MinNormOptions {
  /// Absolute residual tolerance for calling the section consistent,
  /// scaled by max(1, max |b_i|).
  double consistency_tol = 1e-9;
  /// Gram eigenvalues below cutoff * (largest eigenvalue) are dropped.
  double rank_cutoff = 1e-12;
};

/// Dense row-major section matrix.
struct SectionMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data[i * cols + j];
  }
};

SectionMatrix section_matrix(std::span<const LinearRow> rows,
                             std::size_t truncation);

/// Full minimum-norm solve of A x = b via the Gram matrix A A^T.
struct MinNormSection {
  std::vector<double> x;
  /// Multipliers lambda with x = A^T lambda.
  std::vector<double> multipliers;
  std::size_t rank = 0;
  double residual = 0.0;
  /// Diagonal of the projector onto the row space; coordinate n is
  /// determined by the section iff projector_diagonal[n] is 1.
  std::vector<double> projector_diagonal;
};

/// Throws InconsistentSubsystem when ||A x - b||_inf exceeds the tolerance
/// and RankDeficiencyUnresolved when the Gram solve is not finite.
MinNormSection solve_min_norm_section(const SectionMatrix& A,
                                      std::span<const double> b,
                                      const MinNormOptions& options = {});

/// Minimum-norm least-squares solution; never throws InconsistentSubsystem.
MinNormSection least_squares_section(const SectionMatrix& A,
                                     std::span<const double> b,
                                     const MinNormOptions& options = {});

/// Minimum Euclidean-norm solution on coordinates 0..H. Requires q = 2.
std::vector<double> min_norm_solve(std::span<const LinearRow> rows,
                                   std::size_t H, const ConjugatePair& pair,
                                   const MinNormOptions& options = {});

/// ||a^N||_p * M: bound on |b - sum_{n<=N} a_n x_n| for any solution x of the
/// row with ||x||_q <= M.
double residual_bound(const LinearRow& row, std::size_t N, double M,
                      double tol, std::size_t max_depth = kDefaultMaxDepth);

struct ResidualCertificate {
  std::size_t row = 0;
  double head_residual = 0.0;
  double tail_bound = 0.0;
  bool pass = false;
};

struct CoordinateEstimate {
  std::size_t index = 0;
  double value = 0.0;
  Stability status = Stability::Unstable;
  /// e_n lies in the row space of the last section.
  bool determined = false;
  std::vector<std::optional<double>> history;
};

struct TailNormCheck {
  std::size_t N = 0;
  double norm = 0.0;
  double envelope = 0.0;
  bool pass = false;
};

struct SolutionCandidate {
  /// Coordinates 0..H of the last section; zero beyond.
  std::vector<double> y;
  double q_norm_cert = 0.0;
  std::vector<ResidualCertificate> residuals;
  std::vector<std::size_t> verified_rows;
  std::vector<CoordinateEstimate> coordinates;
  std::vector<TailNormCheck> tail_checks;
  std::vector<SectionStep> schedule;

  bool all_certificates_pass() const;
  /// Vacuously true when no coordinate is determined.
  bool determined_coordinates_stabilized() const;
};

struct ExtractOptions {
  std::size_t window = 3;
  double coord_tol = 1e-9;
  /// Tolerance for norm computations in certificates.
  double tol = 1e-12;
  /// Largest truncation tried when a section looks inconsistent.
  std::size_t truncation_cap = 1024;
  std::size_t max_depth = kDefaultMaxDepth;
  MinNormOptions solver;
};

SolutionCandidate compactness_extract(const InfiniteLinearSystem& sys,
                                      std::span<const SectionStep> schedule,
                                      const ExtractOptions& options = {});

struct RowVerdict {
  std::size_t row = 0;
  double head_residual = 0.0;
  double bound = 0.0;
  bool pass = false;
};

std::vector<RowVerdict> verify_solution(const InfiniteLinearSystem& sys,
                                        std::span<const double> y,
                                        std::span<const std::size_t> rows,
                                        std::size_t N, double tol,
                                        std::size_t max_depth = kDefaultMaxDepth);

/// e(N) = ||x^N||_q for N <= maxN, x's tail envelope beyond, floored at
/// kEnvelopeFloor.
EnvelopeSequence envelope_from_solution(const PSummableSequence& x,
                                        std::size_t maxN,
                                        std::size_t max_depth = kDefaultMaxDepth);

struct ConditionTwoReport {
  bool holds = true;
  std::vector<TailNormCheck> clause_a;
  struct CoordinateCheck {
    std::size_t n;
    double value;
    double bound;
    bool pass;
  };
  std::vector<CoordinateCheck> clause_b;
  struct RowCheck {
    std::size_t row;
    double residual;
    bool pass;
  };
  std::vector<RowCheck> clause_c;
};

inline constexpr double kClauseSlack = 1e-12;

/// Checks, for a finitely supported x: (a) ||x^N||_q <= e(N) for N in
/// n_checks, (b) |x_n| <= M_n on the support, (c) |a_i . x - b_i| < eps for
/// i in rows.
ConditionTwoReport check_condition_two(const InfiniteLinearSystem& sys,
                                       const EnvelopeSequence& e,
                                       const CoordinateBounds& bounds,
                                       std::span<const std::size_t> rows,
                                       double eps, std::span<const double> x,
                                       std::span<const std::size_t> n_checks);

struct EpsilonExtractOptions : ExtractOptions {
  std::size_t projection_iterations = 20'000;
};

/// Approximate-solution extraction under envelope and coordinate bounds.
SolutionCandidate epsilon_compactness_extract(
    const InfiniteLinearSystem& sys, const EnvelopeSequence& e,
    const CoordinateBounds& bounds, std::span<const SectionStep> schedule,
    std::span<const double> eps_schedule,
    const EpsilonExtractOptions& options = {});

}  // namespace compactness

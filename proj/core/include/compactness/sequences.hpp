#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace compactness {

inline constexpr double kConjugacyTolerance = 1e-12;
inline constexpr std::size_t kDefaultMaxDepth = 1'000'000;

/// Hölder-conjugate exponents p, q > 1 with 1/p + 1/q = 1.
class ConjugatePair {
public:
  /// Throws std::invalid_argument unless p, q > 1 and |1/p + 1/q - 1| <= 1e-12.
  ConjugatePair(double p, double q);

  static ConjugatePair from_p(double p);

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

private:
  double p_;
  double q_;
};

/// Sampling plan used to validate a user-supplied tail envelope.
struct EnvelopeCheck {
  std::size_t max_depth = kDefaultMaxDepth;
  /// Partial tail sums are checked up to this many terms past each sample.
  std::size_t sum_span = 1 << 14;
};

/// An element of l^p: coefficients indexed from 0 plus a certified,
/// nonincreasing upper bound on the tail norms
///
///   tail_envelope(N) >= ( sum_{n > N} |coeff(n)|^p )^{1/p}.
///
/// Values are immutable and cheap to copy.
class PSummableSequence {
public:
  enum class Kind { Finite, Geometric, Formula };

  using CoefficientFn = std::function<double(std::size_t)>;
  using EnvelopeFn = std::function<double(std::size_t)>;

  static PSummableSequence finite(double exponent, std::vector<double> coeffs);

  /// head[0], ..., head[m-1], then head[m-1] * ratio^(n-m+1) for n >= m.
  static PSummableSequence geometric(double exponent, std::vector<double> head,
                                     double ratio);

  /// Closed-form coefficients with an analytically supplied envelope. The
  /// envelope is validated by sampling; throws NotPSummable on failure.
  static PSummableSequence formula(double exponent, std::string name,
                                   CoefficientFn coeff, EnvelopeFn envelope,
                                   const EnvelopeCheck& check = {});

  static PSummableSequence zero(double exponent);

  double exponent() const noexcept { return exponent_; }
  Kind kind() const noexcept;
  const std::string& name() const noexcept;

  double coeff(std::size_t n) const;
  double tail_envelope(std::size_t N) const;

  /// Length L such that coeff(n) == 0 for every n >= L, when known exactly.
  std::optional<std::size_t> support_length() const;

  /// Indices n <= *zeroed_through() are forced to zero.
  std::optional<std::size_t> zeroed_through() const noexcept { return cut_; }

  /// Ratio of the geometric tail; only meaningful for Kind::Geometric.
  double ratio() const;
  /// Explicit coefficient list (finite) or head list (geometric).
  const std::vector<double>& explicit_coeffs() const;

  /// The tail a^N: zero at indices n <= N, coefficients of *this after N.
  PSummableSequence truncate_tail(std::size_t N) const;

private:
  struct Rep;
  PSummableSequence(double exponent, std::shared_ptr<const Rep> rep,
                    std::optional<std::size_t> cut);

  double exponent_;
  std::shared_ptr<const Rep> rep_;
  std::optional<std::size_t> cut_;
};

inline PSummableSequence truncate_tail(const PSummableSequence& c,
                                       std::size_t N) {
  return c.truncate_tail(N);
}

/// Least N <= max_depth with tail_envelope(N) <= threshold (or < threshold
/// when `strict`). Throws EnvelopeStall when there is none.
std::size_t least_depth_below(const PSummableSequence& c, double threshold,
                              bool strict,
                              std::size_t max_depth = kDefaultMaxDepth);

/// ||c||_p within `tol`, summing the head until the envelope justifies the
/// truncation.
double p_norm(const PSummableSequence& c, double tol,
              std::size_t max_depth = kDefaultMaxDepth);

/// (|c_N|, ||c||_p); the caller checks lhs <= rhs + tol.
std::pair<double, double> head_coefficient_bound(
    const PSummableSequence& c, std::size_t N, double tol,
    std::size_t max_depth = kDefaultMaxDepth);

/// Least N with tail_envelope(N) < eps.
std::size_t tail_norm_limit_check(const PSummableSequence& c, double eps,
                                  std::size_t max_depth = kDefaultMaxDepth);

/// a . x within `tol`, with the truncation error bounded by Hölder on the
/// tails.
double certified_dot(const PSummableSequence& a, const PSummableSequence& x,
                     const ConjugatePair& pair, double tol,
                     std::size_t max_depth = kDefaultMaxDepth);

/// (sum |v_n|^p)^{1/p} for a finite vector, compensated summation.
double finite_p_norm(const std::vector<double>& v, double p);

/// Named closed-form generators usable from sequence literals.
///
///   "power"             scale * (n+1)^(-decay)
///   "alternating_power" (-1)^n * scale * (n+1)^(-decay)
///   "exponential"       scale * exp(-rate * n)
///   "ones_from"         1 for n >= start (0-based), else 0; never in l^p
using FormulaParams = std::map<std::string, double>;

PSummableSequence make_formula(const std::string& name,
                               const FormulaParams& params, double exponent,
                               const EnvelopeCheck& check = {});

std::vector<std::string> registered_formulas();

}  // namespace compactness

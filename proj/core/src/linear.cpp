#include "compactness/linear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "compactness/errors.hpp"
#include "compensated_sum.hpp"

namespace compactness {

// ------------------------------------------------------------ system types

InfiniteLinearSystem::InfiniteLinearSystem(ConjugatePair pair, RowFn rows,
                                           std::optional<std::size_t> row_count,
                                           std::optional<double> norm_budget)
    : pair_(pair),
      rows_(std::move(rows)),
      row_count_(row_count),
      norm_budget_(norm_budget) {
  if (norm_budget_ && !(*norm_budget_ > 0.0)) {
    throw std::invalid_argument("norm budget M must be positive");
  }
}

InfiniteLinearSystem InfiniteLinearSystem::from_rows(
    ConjugatePair pair, std::vector<LinearRow> rows,
    std::optional<double> norm_budget) {
  auto shared = std::make_shared<const std::vector<LinearRow>>(std::move(rows));
  const std::size_t count = shared->size();
  return InfiniteLinearSystem(
      pair, [shared](std::size_t i) { return (*shared)[i]; }, count,
      norm_budget);
}

LinearRow InfiniteLinearSystem::row(std::size_t i) const {
  if (row_count_ && i >= *row_count_) {
    throw std::out_of_range("row index beyond the system's rows");
  }
  LinearRow r = rows_(i);
  if (std::abs(r.a.exponent() - pair_.p()) > kConjugacyTolerance) {
    throw std::invalid_argument("row exponent differs from the system's p");
  }
  return r;
}

std::vector<LinearRow> InfiniteLinearSystem::rows(std::size_t k) const {
  if (row_count_ && k > *row_count_) {
    throw std::invalid_argument("section asks for more rows than exist");
  }
  std::vector<LinearRow> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(row(i));
  return out;
}

CoordinateBounds::CoordinateBounds(std::function<double(std::size_t)> bound)
    : bound_(std::move(bound)) {}

CoordinateBounds CoordinateBounds::uniform(double M) {
  if (!(M > 0.0)) throw std::invalid_argument("coordinate bound must be > 0");
  return CoordinateBounds([M](std::size_t) { return M; });
}

CoordinateBounds CoordinateBounds::from_values(std::vector<double> values,
                                               double rest) {
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("coordinate bound must be > 0");
  }
  if (!(rest > 0.0)) throw std::invalid_argument("coordinate bound must be > 0");
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  return CoordinateBounds([shared, rest](std::size_t n) {
    return n < shared->size() ? (*shared)[n] : rest;
  });
}

double CoordinateBounds::operator()(std::size_t n) const {
  const double v = bound_(n);
  if (!(v > 0.0)) throw std::invalid_argument("coordinate bound must be > 0");
  return v;
}

EnvelopeSequence::EnvelopeSequence(std::vector<double> table,
                                   std::function<double(std::size_t)> tail,
                                   double floor)
    : table_(std::move(table)), tail_(std::move(tail)), floor_(floor) {
  if (!(floor_ > 0.0)) throw std::invalid_argument("envelope floor must be > 0");
}

double EnvelopeSequence::operator()(std::size_t N) const {
  const double v = N < table_.size() ? table_[N] : tail_(N);
  return std::max(v, floor_);
}

std::size_t EnvelopeSequence::witness(double eps, std::size_t max_depth) const {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  for (std::size_t N = 0; N < table_.size() && N <= max_depth; ++N) {
    if ((*this)(N) < eps) return N;
  }
  std::size_t lo = table_.size();
  if (lo > max_depth || !((*this)(max_depth) < eps)) {
    throw EnvelopeStall(eps, max_depth);
  }
  if ((*this)(lo) < eps) return lo;
  std::size_t hi = max_depth;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if ((*this)(mid) < eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool SolutionCandidate::all_certificates_pass() const {
  return std::all_of(residuals.begin(), residuals.end(),
                     [](const auto& r) { return r.pass; }) &&
         std::all_of(tail_checks.begin(), tail_checks.end(),
                     [](const auto& t) { return t.pass; });
}

bool SolutionCandidate::determined_coordinates_stabilized() const {
  return std::all_of(coordinates.begin(), coordinates.end(), [](const auto& c) {
    return !c.determined || c.status == Stability::Stabilized;
  });
}

// ------------------------------------------------------ minimum-norm solve

SectionMatrix section_matrix(std::span<const LinearRow> rows,
                             std::size_t truncation) {
  SectionMatrix A;
  A.rows = rows.size();
  A.cols = truncation + 1;
  A.data.assign(A.rows * A.cols, 0.0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    std::size_t last = truncation;
    if (auto len = rows[i].a.support_length()) {
      if (*len == 0) continue;
      last = std::min(last, *len - 1);
    }
    for (std::size_t n = 0; n <= last; ++n) A(i, n) = rows[i].a.coeff(n);
  }
  return A;
}

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GramPseudoInverse {
  Eigen::MatrixXd Gplus;
  std::size_t rank = 0;
};

GramPseudoInverse gram_pseudo_inverse(const Eigen::Map<const RowMajor>& Am,
                                      double rank_cutoff) {
  const Eigen::Index k = Am.rows();
  GramPseudoInverse out;
  const Eigen::MatrixXd G = Am * Am.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  if (eig.info() != Eigen::Success) {
    throw RankDeficiencyUnresolved("Gram eigendecomposition failed");
  }
  const Eigen::VectorXd& evals = eig.eigenvalues();
  const double largest = evals.size() > 0 ? evals.maxCoeff() : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(k);
  if (largest > 0.0) {
    for (Eigen::Index i = 0; i < k; ++i) {
      if (evals(i) > rank_cutoff * largest) {
        inv(i) = 1.0 / evals(i);
        ++out.rank;
      }
    }
  }
  const Eigen::MatrixXd& V = eig.eigenvectors();
  out.Gplus = V * inv.asDiagonal() * V.transpose();
  return out;
}

MinNormSection gram_solve(const SectionMatrix& A, std::span<const double> b,
                          const MinNormOptions& options, bool require_consistent) {
  if (b.size() != A.rows) {
    throw std::invalid_argument("right-hand side length differs from rows");
  }
  MinNormSection out;
  const auto k = static_cast<Eigen::Index>(A.rows);
  const auto m = static_cast<Eigen::Index>(A.cols);
  out.x.assign(A.cols, 0.0);
  out.multipliers.assign(A.rows, 0.0);
  out.projector_diagonal.assign(A.cols, 0.0);

  Eigen::Map<const RowMajor> Am(A.data.data(), k, m);
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), k);
  if (!Am.allFinite() || !bm.allFinite()) {
    throw RankDeficiencyUnresolved("section contains non-finite entries");
  }
  const double b_scale = std::max(1.0, k > 0 ? bm.lpNorm<Eigen::Infinity>() : 0.0);

  if (k > 0) {
    const auto pinv = gram_pseudo_inverse(Am, options.rank_cutoff);
    const Eigen::MatrixXd& Gplus = pinv.Gplus;
    out.rank = pinv.rank;

    Eigen::VectorXd lambda = Gplus * bm;
    Eigen::VectorXd x = Am.transpose() * lambda;
    // Two rounds of refinement recover the accuracy lost by squaring the
    // condition number in A A^T.
    for (int round = 0; round < 2; ++round) {
      const Eigen::VectorXd r = bm - Am * x;
      const Eigen::VectorXd dl = Gplus * r;
      lambda += dl;
      x += Am.transpose() * dl;
    }
    if (!x.allFinite() || !lambda.allFinite()) {
      throw RankDeficiencyUnresolved("Gram solve produced non-finite values");
    }
    out.residual = (Am * x - bm).lpNorm<Eigen::Infinity>();
    const Eigen::MatrixXd GA = Gplus * Am;
    for (Eigen::Index n = 0; n < m; ++n) {
      out.x[n] = x(n);
      out.projector_diagonal[n] = Am.col(n).dot(GA.col(n));
    }
    for (Eigen::Index i = 0; i < k; ++i) out.multipliers[i] = lambda(i);
  }
  if (require_consistent && out.residual > options.consistency_tol * b_scale) {
    throw InconsistentSubsystem(A.rows, A.cols - 1, out.residual);
  }
  return out;
}

}  // namespace

MinNormSection solve_min_norm_section(const SectionMatrix& A,
                                      std::span<const double> b,
                                      const MinNormOptions& options) {
  return gram_solve(A, b, options, true);
}

MinNormSection least_squares_section(const SectionMatrix& A,
                                     std::span<const double> b,
                                     const MinNormOptions& options) {
  return gram_solve(A, b, options, false);
}

namespace {

void require_q_two(const ConjugatePair& pair) {
  if (std::abs(pair.q() - 2.0) > kConjugacyTolerance) {
    throw std::invalid_argument(
        "exact minimum-norm section solving requires q = 2");
  }
}

std::vector<double> rhs(std::span<const LinearRow> rows) {
  std::vector<double> b;
  b.reserve(rows.size());
  for (const auto& r : rows) b.push_back(r.b);
  return b;
}

double head_dot(const LinearRow& row, std::span<const double> y,
                std::size_t N) {
  std::size_t last = std::min(N + 1, y.size());
  if (auto len = row.a.support_length()) last = std::min(last, *len);
  detail::CompensatedSum s;
  for (std::size_t n = 0; n < last; ++n) s.add(row.a.coeff(n) * y[n]);
  return s.value();
}

void require_schedule(std::span<const SectionStep> schedule) {
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].rows <= schedule[i - 1].rows ||
        schedule[i].truncation <= schedule[i - 1].truncation) {
      throw std::invalid_argument(
          "schedule must be strictly increasing in rows and truncation");
    }
  }
}

// Per-coordinate histories and window agreement across schedule steps.
std::vector<CoordinateEstimate> stabilize(
    const std::vector<std::vector<double>>& steps, std::size_t window,
    double coord_tol, const std::vector<double>& projector_diagonal) {
  std::vector<CoordinateEstimate> out;
  if (steps.empty()) return out;
  const std::size_t width = steps.back().size();
  for (std::size_t n = 0; n < width; ++n) {
    CoordinateEstimate c;
    c.index = n;
    c.value = steps.back()[n];
    for (const auto& s : steps) {
      c.history.push_back(n < s.size() ? std::optional<double>(s[n])
                                       : std::nullopt);
    }
    c.status = Stability::Unstable;
    if (steps.size() >= window) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      bool present = true;
      for (std::size_t i = steps.size() - window; i < steps.size(); ++i) {
        if (!c.history[i]) {
          present = false;
          break;
        }
        lo = std::min(lo, *c.history[i]);
        hi = std::max(hi, *c.history[i]);
      }
      if (present && hi - lo <= coord_tol) c.status = Stability::Stabilized;
    }
    c.determined = projector_diagonal[n] >= 1.0 - 1e-9;
    out.push_back(std::move(c));
  }
  return out;
}

void require_extract_options(const ExtractOptions& o) {
  if (o.window < 2) throw std::invalid_argument("window must be at least 2");
  if (!(o.coord_tol > 0.0) || !(o.tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
}

}  // namespace

std::vector<double> min_norm_solve(std::span<const LinearRow> rows,
                                   std::size_t H, const ConjugatePair& pair,
                                   const MinNormOptions& options) {
  require_q_two(pair);
  const auto b = rhs(rows);
  return solve_min_norm_section(section_matrix(rows, H), b, options).x;
}

double residual_bound(const LinearRow& row, std::size_t N, double M,
                      double tol, std::size_t max_depth) {
  if (!(M > 0.0)) throw std::invalid_argument("M must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const PSummableSequence tail = row.a.truncate_tail(N);
  const double envelope = tail.tail_envelope(0);
  if (row.a.kind() != PSummableSequence::Kind::Formula) {
    // Finite and geometric envelopes are the exact tail norms.
    return envelope * M;
  }
  return std::min(envelope, p_norm(tail, tol, max_depth) + tol) * M;
}

SolutionCandidate compactness_extract(const InfiniteLinearSystem& sys,
                                      std::span<const SectionStep> schedule,
                                      const ExtractOptions& options) {
  require_extract_options(options);
  require_schedule(schedule);
  if (!sys.norm_budget()) {
    throw std::invalid_argument("compactness_extract needs a norm budget M");
  }
  require_q_two(sys.pair());
  const double M = *sys.norm_budget();
  const double q = sys.pair().q();

  SolutionCandidate cand;
  cand.schedule.assign(schedule.begin(), schedule.end());
  if (schedule.empty()) return cand;

  std::vector<std::vector<double>> steps;
  MinNormSection last;
  std::vector<LinearRow> rows;
  for (const auto& step : schedule) {
    rows = sys.rows(step.rows);
    const auto b = rhs(rows);
    const SectionMatrix A = section_matrix(rows, step.truncation);
    try {
      last = solve_min_norm_section(A, b, options.solver);
    } catch (const InconsistentSubsystem& e) {
      bool persists = true;
      if (options.truncation_cap > step.truncation) {
        try {
          solve_min_norm_section(section_matrix(rows, options.truncation_cap),
                                 b, options.solver);
          persists = false;
        } catch (const InconsistentSubsystem&) {
        }
      }
      throw InconsistentSubsystem(step.rows, step.truncation, e.residual(),
                                  persists);
    }
    const double norm = finite_p_norm(last.x, 2.0);
    if (norm > M + options.coord_tol) {
      // Weak duality: for every x with a_i . x = b_i on the full rows,
      // lambda . b <= ||sum lambda_i a_i|| ||x||, and the full-row norm is
      // at most ||y|| + sum |lambda_i| ||a_i^H||.
      double dual_gap = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        dual_gap += std::abs(last.multipliers[i]) *
                    rows[i].a.tail_envelope(step.truncation);
      }
      double lambda_b = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        lambda_b += last.multipliers[i] * b[i];
      }
      const double lower = lambda_b > 0.0 ? lambda_b / (norm + dual_gap) : 0.0;
      const bool certified = lower * (1.0 - 1e-12) > M;
      throw NormBudgetExceeded(step.rows, step.truncation, norm, lower, M,
                               certified);
    }
    steps.push_back(last.x);
  }

  const std::size_t H = schedule.back().truncation;
  cand.y = steps.back();
  cand.q_norm_cert = finite_p_norm(cand.y, q) * (1.0 + 1e-15);
  cand.coordinates = stabilize(steps, options.window, options.coord_tol,
                               last.projector_diagonal);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ResidualCertificate rc;
    rc.row = i;
    rc.head_residual = std::abs(rows[i].b - head_dot(rows[i], cand.y, H));
    rc.tail_bound = residual_bound(rows[i], H, M, options.tol, options.max_depth);
    rc.pass = rc.head_residual <= rc.tail_bound + 1e-9;
    if (rc.pass) cand.verified_rows.push_back(i);
    cand.residuals.push_back(rc);
  }
  return cand;
}

std::vector<RowVerdict> verify_solution(const InfiniteLinearSystem& sys,
                                        std::span<const double> y,
                                        std::span<const std::size_t> rows,
                                        std::size_t N, double tol,
                                        std::size_t max_depth) {
  if (!sys.norm_budget()) {
    throw std::invalid_argument("verification needs a norm budget M");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  std::size_t support = y.size();
  while (support > 0 && y[support - 1] == 0.0) --support;
  if (support > 0 && N + 1 < support) {
    throw std::invalid_argument("N must cover the candidate's support");
  }
  std::vector<RowVerdict> out;
  for (std::size_t i : rows) {
    const LinearRow row = sys.row(i);
    RowVerdict v;
    v.row = i;
    v.head_residual = std::abs(row.b - head_dot(row, y, N));
    v.bound = residual_bound(row, N, *sys.norm_budget(), tol, max_depth);
    v.pass = v.head_residual <= v.bound + tol;
    out.push_back(v);
  }
  return out;
}

EnvelopeSequence envelope_from_solution(const PSummableSequence& x,
                                        std::size_t maxN,
                                        std::size_t max_depth) {
  std::vector<double> table;
  table.reserve(maxN + 1);
  const bool exact = x.kind() != PSummableSequence::Kind::Formula;
  for (std::size_t N = 0; N <= maxN; ++N) {
    const double v = exact ? x.tail_envelope(N)
                           : p_norm(x.truncate_tail(N), 1e-13, max_depth);
    table.push_back(std::max(v, kEnvelopeFloor));
  }
  return EnvelopeSequence(
      std::move(table), [x](std::size_t N) { return x.tail_envelope(N); },
      kEnvelopeFloor);
}

namespace {

// Euclidean projection onto {y : A y = b} (onto the least-squares set when
// inconsistent): y <- y + A^T G^+ (b - A y).
class AffineProjector {
public:
  AffineProjector(const SectionMatrix& A, double rank_cutoff)
      : A_(A.data.data(), static_cast<Eigen::Index>(A.rows),
           static_cast<Eigen::Index>(A.cols)) {
    if (A.rows > 0) Gplus_ = gram_pseudo_inverse(A_, rank_cutoff).Gplus;
  }

  void project(std::vector<double>& y, std::span<const double> b) const {
    if (A_.rows() == 0) return;
    Eigen::Map<Eigen::VectorXd> ym(y.data(), A_.cols());
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), A_.rows());
    const Eigen::VectorXd r = bm - A_ * ym;
    ym += A_.transpose() * (Gplus_ * r);
  }

private:
  Eigen::Map<const RowMajor> A_;
  Eigen::MatrixXd Gplus_;
};

double tail_norm(std::span<const double> x, std::size_t N, double q) {
  detail::CompensatedSum mass;
  for (std::size_t n = N + 1; n < x.size(); ++n) {
    mass.add(std::pow(std::abs(x[n]), q));
  }
  return std::pow(mass.value(), 1.0 / q);
}

double row_residual(const LinearRow& row, std::span<const double> x) {
  return std::abs(head_dot(row, x, x.empty() ? 0 : x.size() - 1) - row.b);
}

}  // namespace

ConditionTwoReport check_condition_two(const InfiniteLinearSystem& sys,
                                       const EnvelopeSequence& e,
                                       const CoordinateBounds& bounds,
                                       std::span<const std::size_t> rows,
                                       double eps, std::span<const double> x,
                                       std::span<const std::size_t> n_checks) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double q = sys.pair().q();
  ConditionTwoReport report;
  for (std::size_t N : n_checks) {
    TailNormCheck c{N, tail_norm(x, N, q), e(N), false};
    c.pass = c.norm <= c.envelope + kClauseSlack;
    report.holds = report.holds && c.pass;
    report.clause_a.push_back(c);
  }
  for (std::size_t n = 0; n < x.size(); ++n) {
    ConditionTwoReport::CoordinateCheck c{n, x[n], bounds(n), false};
    c.pass = std::abs(c.value) <= c.bound + kClauseSlack;
    report.holds = report.holds && c.pass;
    report.clause_b.push_back(c);
  }
  for (std::size_t i : rows) {
    ConditionTwoReport::RowCheck c{i, row_residual(sys.row(i), x), false};
    c.pass = c.residual < eps + kClauseSlack;
    report.holds = report.holds && c.pass;
    report.clause_c.push_back(c);
  }
  return report;
}

SolutionCandidate epsilon_compactness_extract(
    const InfiniteLinearSystem& sys, const EnvelopeSequence& e,
    const CoordinateBounds& bounds, std::span<const SectionStep> schedule,
    std::span<const double> eps_schedule,
    const EpsilonExtractOptions& options) {
  require_extract_options(options);
  require_schedule(schedule);
  require_q_two(sys.pair());
  if (eps_schedule.size() != schedule.size()) {
    throw std::invalid_argument("eps schedule length differs from schedule");
  }
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0) ||
        (i > 0 && eps_schedule[i] > eps_schedule[i - 1])) {
      throw std::invalid_argument("eps schedule must be positive, decreasing");
    }
  }
  const double q = sys.pair().q();

  SolutionCandidate cand;
  cand.schedule.assign(schedule.begin(), schedule.end());
  if (schedule.empty()) return cand;

  std::vector<std::vector<double>> steps;
  MinNormSection last;
  std::vector<LinearRow> rows;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const auto& step = schedule[s];
    const double eps = eps_schedule[s];
    rows = sys.rows(step.rows);
    const auto b = rhs(rows);
    const SectionMatrix A = section_matrix(rows, step.truncation);
    last = least_squares_section(A, b, options.solver);
    const std::size_t width = A.cols;

    std::vector<double> box(width);
    std::vector<double> envelope(width);
    for (std::size_t n = 0; n < width; ++n) {
      box[n] = bounds(n);
      envelope[n] = e(n);
    }
    auto section_residual = [&](const std::vector<double>& y) {
      double worst = 0.0;
      for (std::size_t i = 0; i < A.rows; ++i) {
        detail::CompensatedSum s;
        for (std::size_t n = 0; n < width; ++n) s.add(A(i, n) * y[n]);
        worst = std::max(worst, std::abs(s.value() - b[i]));
      }
      return worst;
    };
    // Clip to the box, then shrink tails from the longest to the shortest;
    // shrinking a tail keeps the box and every longer tail constraint.
    auto project_constraints = [&](std::vector<double>& y) {
      for (std::size_t n = 0; n < width; ++n) {
        y[n] = std::clamp(y[n], -box[n], box[n]);
      }
      for (std::size_t N = width; N-- > 0;) {
        const double t = tail_norm(y, N, q);
        if (t > envelope[N]) {
          const double scale = envelope[N] <= kEnvelopeFloor ? 0.0 : envelope[N] / t;
          for (std::size_t n = N + 1; n < width; ++n) y[n] *= scale;
        }
      }
    };
    // Alternating projections between the section's affine solution set
    // and the box/envelope constraints.
    const AffineProjector affine(A, options.solver.rank_cutoff);
    std::vector<double> y = last.x;
    project_constraints(y);
    std::size_t iter = 0;
    double residual = section_residual(y);
    while (!(residual < eps) && iter < options.projection_iterations) {
      affine.project(y, b);
      project_constraints(y);
      residual = section_residual(y);
      ++iter;
    }
    if (!(residual < eps)) {
      throw NoFeasibleSection(s + 1, step.rows, "c");
    }
    steps.push_back(std::move(y));
  }

  const std::size_t H = schedule.back().truncation;
  const double e_H = e(H);
  const double eps_last = eps_schedule.back();
  cand.y = steps.back();
  cand.q_norm_cert = finite_p_norm(cand.y, q) * (1.0 + 1e-15);
  cand.coordinates = stabilize(steps, options.window, options.coord_tol,
                               last.projector_diagonal);
  for (std::size_t N = 0; N <= H; ++N) {
    TailNormCheck c{N, tail_norm(cand.y, N, q), e(N), false};
    c.pass = c.norm <= c.envelope + options.coord_tol;
    cand.tail_checks.push_back(c);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ResidualCertificate rc;
    rc.row = i;
    rc.head_residual = std::abs(rows[i].b - head_dot(rows[i], cand.y, H));
    // |b_i - sum_{n<=N} a_in y_n| <= |b_i - a_i.y| + |a_i . y^N|
    //                             <= eps + ||a_i||_p e_N
    rc.tail_bound = eps_last + p_norm(rows[i].a, options.tol, options.max_depth) * e_H;
    rc.pass = rc.head_residual <= rc.tail_bound + 1e-9;
    if (rc.pass) cand.verified_rows.push_back(i);
    cand.residuals.push_back(rc);
  }
  return cand;
}

}  // namespace compactness

#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "compactness/corpus.hpp"
#include "compactness/errors.hpp"
#include "compactness/linear.hpp"
#include "oracles.hpp"

using namespace compactness;

namespace {

const ConjugatePair kTwo(2, 2);

LinearRow finite_row(std::vector<double> a, double b) {
  return {PSummableSequence::finite(2, std::move(a)), b};
}

std::vector<double> planted_x() {
  std::vector<double> x(10);
  for (std::size_t n = 0; n < 10; ++n) x[n] = std::ldexp(1.0, -static_cast<int>(n));
  return x;
}

std::vector<std::uint64_t> seeds(std::size_t k) {
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < k; ++i) s.push_back(100 + i);
  return s;
}

}  // namespace

TEST_CASE("min_norm_solve examples") {
  std::vector<LinearRow> one{finite_row({1, 1}, 2)};
  auto x = min_norm_solve(one, 1, kTwo);
  CHECK(x[0] == doctest::Approx(1));
  CHECK(x[1] == doctest::Approx(1));

  std::vector<LinearRow> id{finite_row({1, 0}, 3), finite_row({0, 1}, 4)};
  x = min_norm_solve(id, 1, kTwo);
  CHECK(x[0] == doctest::Approx(3));
  CHECK(x[1] == doctest::Approx(4));

  std::vector<LinearRow> r{finite_row({1, 2}, 5)};
  x = min_norm_solve(r, 1, kTwo);
  CHECK(x[0] == doctest::Approx(1));
  CHECK(x[1] == doctest::Approx(2));

  CHECK_THROWS_AS(min_norm_solve(r, 1, ConjugatePair::from_p(3)),
                  std::invalid_argument);
}

TEST_CASE("min_norm_solve handles rank deficiency") {
  std::vector<LinearRow> rows{finite_row({1, 1, 0}, 2), finite_row({2, 2, 0}, 4),
                              finite_row({0, 0, 1}, 1)};
  const auto x = min_norm_solve(rows, 2, kTwo);
  CHECK(x[0] == doctest::Approx(1));
  CHECK(x[1] == doctest::Approx(1));
  CHECK(x[2] == doctest::Approx(1));
  std::vector<LinearRow> bad{finite_row({1, 1}, 2), finite_row({2, 2}, 5)};
  CHECK_THROWS_AS(min_norm_solve(bad, 1, kTwo), InconsistentSubsystem);
}

TEST_CASE("min_norm_solve agrees with a complete orthogonal decomposition") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 4;
    const std::size_t m = 1 + trial % 8;
    Eigen::MatrixXd A(k, m);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = U(rng);
    Eigen::VectorXd x0(m);
    for (auto& v : x0) v = U(rng);
    const Eigen::VectorXd b = A * x0;
    std::vector<LinearRow> rows;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> a(m);
      for (std::size_t j = 0; j < m; ++j) a[j] = A(i, j);
      rows.push_back(finite_row(a, b(i)));
    }
    const auto x = min_norm_solve(rows, m - 1, kTwo);
    const Eigen::VectorXd ref = A.completeOrthogonalDecomposition().solve(b);
    for (std::size_t j = 0; j < m; ++j) CHECK(x[j] == doctest::Approx(ref(j)).epsilon(1e-8));
  }
}

TEST_CASE("residual_bound") {
  const LinearRow r = finite_row({3, 4}, 0);
  CHECK(residual_bound(r, 0, 1, 1e-12) == doctest::Approx(4));
  CHECK(residual_bound(r, 1, 7, 1e-12) == 0);
  const LinearRow g{PSummableSequence::geometric(2, {1.0}, 0.5), 0};
  for (std::size_t N = 0; N < 10; ++N) {
    CHECK(residual_bound(g, N + 1, 2, 1e-12) ==
          doctest::Approx(residual_bound(g, N, 2, 1e-12) / 2));
  }
}

TEST_CASE("compactness_extract on the planted system") {
  const auto x = planted_x();
  const auto sys = corpus::planted_system(x, seeds(8), kTwo, 0.5);
  const std::vector<SectionStep> schedule{{4, 16}, {6, 24}, {8, 32}};
  ExtractOptions opt;
  opt.window = 2;
  const auto cand = compactness_extract(sys, schedule, opt);
  CHECK(cand.all_certificates_pass());
  CHECK(cand.determined_coordinates_stabilized());
  CHECK(cand.q_norm_cert <= *sys.norm_budget());
  std::size_t determined = 0;
  for (const auto& c : cand.coordinates) {
    if (!c.determined) continue;
    ++determined;
    CHECK(std::abs(c.value - x[c.index]) <= 1e-6);
  }
  CHECK(determined == 3);
  for (const auto& r : cand.residuals) {
    CHECK(r.head_residual <= residual_bound(sys.row(r.row), 32, *sys.norm_budget(), 1e-12) + 1e-9);
  }
}

TEST_CASE("compactness_extract edge cases") {
  const std::vector<SectionStep> schedule{{1, 3}, {2, 5}};
  ExtractOptions opt;
  opt.window = 2;
  auto zero = InfiniteLinearSystem::from_rows(
      kTwo, {finite_row({0}, 0), finite_row({0}, 0)}, 1.0);
  const auto cand = compactness_extract(zero, schedule, opt);
  for (double v : cand.y) CHECK(v == 0);
  for (const auto& r : cand.residuals) CHECK(r.head_residual == 0);

  auto bad = InfiniteLinearSystem::from_rows(
      kTwo, {finite_row({0}, 1), finite_row({0}, 0)}, 1.0);
  try {
    compactness_extract(bad, schedule, opt);
    FAIL("expected InconsistentSubsystem");
  } catch (const InconsistentSubsystem& e) {
    CHECK(e.rows() == 1);
    CHECK(e.persists_to_cap());
  }

  // Consistent at large truncation only: a truncation artifact.
  std::vector<double> far(11, 0.0);
  far[10] = 1.0;
  auto artifact = InfiniteLinearSystem::from_rows(
      kTwo, {finite_row(far, 1), finite_row({1}, 0)}, 2.0);
  try {
    compactness_extract(artifact, schedule, opt);
    FAIL("expected InconsistentSubsystem");
  } catch (const InconsistentSubsystem& e) {
    CHECK_FALSE(e.persists_to_cap());
  }
}

TEST_CASE("NormBudgetExceeded is certified only when provable") {
  const std::vector<SectionStep> schedule{{1, 1}, {2, 2}};
  ExtractOptions opt;
  opt.window = 2;
  // x_0 = 10 is forced by a finite row; M = 1 is refuted.
  auto forced = InfiniteLinearSystem::from_rows(kTwo, {finite_row({1}, 10), finite_row({0, 1}, 0)}, 1.0);
  try {
    compactness_extract(forced, schedule, opt);
    FAIL("expected NormBudgetExceeded");
  } catch (const NormBudgetExceeded& e) {
    CHECK(e.certified());
    CHECK(e.lower_bound() > 1.0);
  }
  // A slowly decaying row: the truncated section needs a large norm, the
  // full row does not.
  auto slow = InfiniteLinearSystem::from_rows(
      kTwo, {{PSummableSequence::geometric(2, {0.01, 1.0}, 0.999), 1.0},
             finite_row({1}, 0)}, 0.5);
  try {
    compactness_extract(slow, schedule, opt);
    FAIL("expected NormBudgetExceeded");
  } catch (const NormBudgetExceeded& e) {
    CHECK_FALSE(e.certified());
  }
}

TEST_CASE("verify_solution") {
  const auto x = planted_x();
  const auto sys = corpus::planted_system(x, seeds(5), kTwo, 0.5);
  const std::vector<std::size_t> rows{0, 1, 2, 3, 4};
  for (const auto& v : verify_solution(sys, x, rows, 9, 1e-9)) {
    CHECK(v.pass);
    CHECK(v.head_residual <= 1e-9);
  }
  auto one = InfiniteLinearSystem::from_rows(
      kTwo, {{PSummableSequence::geometric(2, {1.0}, 0.01), 1.0}}, 1.0);
  const std::vector<double> zero{0.0};
  const std::vector<std::size_t> r0{0};
  const auto verdict = verify_solution(one, zero, r0, 3, 1e-9);
  CHECK_FALSE(verdict.at(0).pass);
  CHECK(verdict.at(0).head_residual == doctest::Approx(1));
  CHECK(verify_solution(one, zero, {}, 3, 1e-9).empty());
}

TEST_CASE("envelope_from_solution") {
  auto e = envelope_from_solution(PSummableSequence::finite(2, {1, 1}), 5);
  CHECK(e(0) == doctest::Approx(1));
  CHECK(e(1) == kEnvelopeFloor);
  CHECK(e(100) == kEnvelopeFloor);
  auto g = envelope_from_solution(PSummableSequence::geometric(2, {1.0}, 0.5), 20);
  for (std::size_t N = 0; N < 30; ++N) {
    // ||x^N||_2 = 2^{-(N+1)} sqrt(4/3)
    CHECK(g(N) == doctest::Approx(std::ldexp(std::sqrt(4.0 / 3.0), -static_cast<int>(N + 1))));
  }
  CHECK(g.witness(1e-3) == 10);
  auto z = envelope_from_solution(PSummableSequence::zero(2), 3);
  CHECK(z(0) == kEnvelopeFloor);
}

TEST_CASE("check_condition_two") {
  const auto x = planted_x();
  const auto sys = corpus::planted_system(x, seeds(5), kTwo, 0.5);
  const auto e = envelope_from_solution(PSummableSequence::finite(2, x), 20);
  std::vector<double> bound_values;
  for (double v : x) bound_values.push_back(std::abs(v) + 1);
  const auto bounds = CoordinateBounds::from_values(bound_values, 1.0);
  const std::vector<std::size_t> rows{0, 1, 2, 3, 4};
  const std::vector<std::size_t> Ns{0, 1, 2, 5, 9, 15};
  CHECK(check_condition_two(sys, e, bounds, rows, 1e-6, x, Ns).holds);

  auto bad = x;
  bad[3] = 5;
  const auto report = check_condition_two(sys, e, bounds, {}, 1e-6, bad, {});
  CHECK_FALSE(report.holds);
  CHECK_FALSE(report.clause_b.at(3).pass);

  const std::vector<double> zero(3, 0.0);
  CHECK(check_condition_two(sys, e, CoordinateBounds::uniform(10), {}, 1e-6,
                            zero, Ns)
            .holds);
}

TEST_CASE("epsilon_compactness_extract recovers the planted vector") {
  const auto x = planted_x();
  const auto sys = corpus::planted_system(x, seeds(8), kTwo, 0.5);
  const auto e = envelope_from_solution(PSummableSequence::finite(2, x), 64);
  std::vector<double> bound_values;
  for (double v : x) bound_values.push_back(std::abs(v) + 1);
  const auto bounds = CoordinateBounds::from_values(bound_values, 1.0);
  const std::vector<SectionStep> schedule{{4, 16}, {6, 24}, {8, 32}};
  const std::vector<double> eps{1e-8, 1e-9, 1e-10};
  EpsilonExtractOptions opt;
  opt.window = 2;
  opt.coord_tol = 1e-6;
  const auto cand = epsilon_compactness_extract(sys, e, bounds, schedule, eps, opt);
  CHECK(cand.all_certificates_pass());
  for (const auto& t : cand.tail_checks) CHECK(t.norm <= t.envelope + 1e-9);
  std::size_t determined = 0;
  for (const auto& c : cand.coordinates) {
    CHECK(std::abs(c.value) <= bounds(c.index) + 1e-12);
    if (!c.determined) continue;
    ++determined;
    CHECK(std::abs(c.value - x[c.index]) <= 1e-6);
  }
  CHECK(determined >= 3);
}

TEST_CASE("epsilon_compactness_extract edge cases") {
  const std::vector<SectionStep> schedule{{1, 2}};
  const std::vector<double> eps{1e-6};
  EpsilonExtractOptions opt;
  opt.projection_iterations = 50;
  auto sys = InfiniteLinearSystem::from_rows(
      kTwo, {{PSummableSequence::geometric(2, {1.0}, 0.5), 1.0}}, std::nullopt);
  const auto e = envelope_from_solution(PSummableSequence::finite(2, {1}), 4);
  try {
    epsilon_compactness_extract(sys, e, CoordinateBounds::uniform(1e-12),
                                schedule, eps, opt);
    FAIL("expected NoFeasibleSection");
  } catch (const NoFeasibleSection& err) {
    CHECK(err.step() == 1);
  }
  const auto empty = epsilon_compactness_extract(sys, e, CoordinateBounds::uniform(1), {}, {}, opt);
  CHECK(empty.y.empty());
  CHECK(empty.residuals.empty());
}

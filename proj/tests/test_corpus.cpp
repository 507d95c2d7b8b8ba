#include <doctest.h>

#include <cmath>

#include "compactness/corpus.hpp"
#include "compactness/errors.hpp"
#include "oracles.hpp"

using namespace compactness;

TEST_CASE("Helly rows are never p-summable") {
  for (double p : {1.5, 2.0, 3.0}) {
    CHECK_THROWS_AS(corpus::helly_row(1, p), NotPSummable);
    CHECK_THROWS_AS(corpus::helly_system(ConjugatePair::from_p(p)), NotPSummable);
  }
  CHECK_THROWS_AS(corpus::linear_family({"helly", {}}, ConjugatePair(2, 2)),
                  NotPSummable);
}

TEST_CASE("Helly prefixes are solved by the explicit pattern") {
  for (std::size_t k = 1; k <= 20; ++k) {
    const auto rows = corpus::helly_prefix_rows(k, k, 2.0);
    const auto x = corpus::helly_prefix_solution(k);
    for (const auto& r : rows) {
      CHECK(std::abs(oracle::dot(r.a.explicit_coeffs(), x) - r.b) <= 1e-12);
    }
    // Rows k and k+1 differ in coordinate k-1 only: the section is square,
    // triangular and nonsingular, so the minimum-norm solution is the pattern.
    const auto y = min_norm_solve(rows, k - 1, ConjugatePair(2, 2));
    for (std::size_t n = 0; n < k; ++n) CHECK(std::abs(y[n] - x[n]) <= 1e-9);
  }
}

TEST_CASE("planted system") {
  const ConjugatePair two(2, 2);
  const std::vector<double> x{1, 1};
  auto sys = corpus::planted_system(x, {1, 2, 3}, two, 0.5);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = sys.row(i);
    CHECK(row.b == doctest::Approx(row.a.coeff(0) + row.a.coeff(1)).epsilon(1e-15));
    CHECK(std::abs(row.a.coeff(3)) >= 0.25 * 0.5 - 1e-15);
  }
  CHECK(*sys.norm_budget() == doctest::Approx(1.5 * std::sqrt(2.0)));

  // b reproduces under independent recomputation.
  std::vector<double> planted(10);
  for (std::size_t n = 0; n < 10; ++n) planted[n] = std::ldexp(1.0, -static_cast<int>(n));
  const auto a = corpus::planted_system(planted, {5, 6, 7, 8, 9}, two, 0.5);
  const auto b = corpus::planted_system(planted, {5, 6, 7, 8, 9}, two, 0.5);
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> coeffs(10);
    for (std::size_t n = 0; n < 10; ++n) coeffs[n] = a.row(i).a.coeff(n);
    CHECK(a.row(i).b == b.row(i).b);
    CHECK(std::abs(a.row(i).b - oracle::dot(coeffs, planted)) <= 1e-14);
  }

  const auto zero = corpus::planted_system({0, 0}, {1}, two, 0.5);
  CHECK(zero.row(0).b == 0);
  CHECK(*zero.norm_budget() == 1.0);
  CHECK_THROWS_AS(corpus::planted_system(x, {1}, two, 1.0), std::invalid_argument);
}

TEST_CASE("family registry") {
  const ConjugatePair two(2, 2);
  const auto sys = corpus::linear_family({"planted", {{"rows", 3}, {"support", 4}}}, two);
  CHECK(sys.row_count() == 3u);
  CHECK(corpus::planted_vector({"planted", {{"support", 3}}}) ==
        std::vector<double>{1, 0.5, 0.25});
  CHECK_THROWS_AS(corpus::linear_family({"planted", {{"bogus", 1}}}, two),
                  std::invalid_argument);
  CHECK_THROWS_AS(corpus::ring_family({"nope", {}}), std::invalid_argument);
  CHECK(corpus::ring_family({"chain", {{"length", 5}}}).length == 5u);
  CHECK(corpus::box_family({"abian", {{"n_max", 4}}}).length == 4u);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "compactness/errors.hpp"
#include "compactness/sequences.hpp"
#include "oracles.hpp"

using namespace compactness;

TEST_CASE("conjugate pairs") {
  const auto pair = ConjugatePair::from_p(3.0);
  CHECK(std::abs(1 / pair.p() + 1 / pair.q() - 1) <= 1e-12);
  CHECK(ConjugatePair(2, 2).q() == 2);
  CHECK_THROWS_AS(ConjugatePair(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(ConjugatePair::from_p(1.0), std::invalid_argument);
}

TEST_CASE("truncate_tail keeps the tail") {
  const auto c = PSummableSequence::geometric(2, {1.0}, 0.5);
  const auto t = truncate_tail(c, 1);
  CHECK(t.coeff(0) == 0);
  CHECK(t.coeff(1) == 0);
  CHECK(t.coeff(2) == doctest::Approx(0.25));
  CHECK(t.coeff(3) == doctest::Approx(0.125));
  CHECK(t.tail_envelope(0) == c.tail_envelope(1));

  const auto z = truncate_tail(c, 0);
  CHECK(z.coeff(0) == 0);
  for (std::size_t n = 1; n < 20; ++n) CHECK(z.coeff(n) == c.coeff(n));

  const auto f = truncate_tail(PSummableSequence::finite(2, {1, 2, 3}), 5);
  for (std::size_t n = 0; n < 10; ++n) CHECK(f.coeff(n) == 0);
  CHECK(f.tail_envelope(0) == 0);
}

TEST_CASE("truncation composes as max") {
  const auto c = PSummableSequence::geometric(2.5, {0.3, -1.0, 0.7}, -0.6);
  for (std::size_t N : {0u, 2u, 5u}) {
    for (std::size_t K : {0u, 1u, 7u}) {
      const auto twice = c.truncate_tail(N).truncate_tail(K);
      const auto once = c.truncate_tail(std::max(N, K));
      for (std::size_t n = 0; n < 30; ++n) CHECK(twice.coeff(n) == once.coeff(n));
      for (std::size_t M = 0; M < 10; ++M) {
        CHECK(twice.tail_envelope(M) == once.tail_envelope(M));
      }
    }
  }
}

TEST_CASE("p_norm against closed forms") {
  CHECK(p_norm(PSummableSequence::finite(2, {3, 4}), 1e-12) ==
        doctest::Approx(5).epsilon(1e-14));
  const auto g = PSummableSequence::geometric(2, {1.0}, 0.5);
  CHECK(std::abs(p_norm(g, 1e-12) - std::sqrt(4.0 / 3.0)) <= 1e-12);
  CHECK(p_norm(PSummableSequence::zero(3), 1e-9) == 0);
}

TEST_CASE("geometric envelope dominates the closed-form tail") {
  const std::vector<double> head{0.5, -2.0, 1.25};
  for (double p : {1.5, 2.0, 3.0}) {
    const auto c = PSummableSequence::geometric(p, head, 0.7);
    double previous = INFINITY;
    for (std::size_t N = 0; N < 40; ++N) {
      const double exact =
          std::pow(oracle::geometric_tail_p_sum(head, 0.7, N, p), 1 / p);
      CHECK(c.tail_envelope(N) >= exact);
      CHECK(c.tail_envelope(N) <= exact * (1 + 1e-9) + 1e-300);
      CHECK(c.tail_envelope(N) <= previous);
      previous = c.tail_envelope(N);
    }
  }
}

TEST_CASE("head_coefficient_bound") {
  const auto c = PSummableSequence::finite(2, {3, 4});
  auto [lhs, rhs] = head_coefficient_bound(c, 1, 1e-12);
  CHECK(lhs == 4);
  CHECK(rhs == doctest::Approx(5));
  std::tie(lhs, rhs) = head_coefficient_bound(c, 7, 1e-12);
  CHECK(lhs == 0);
}

TEST_CASE("tail_norm_limit_check") {
  const auto g = PSummableSequence::geometric(2, {1.0}, 0.5);
  const std::size_t N = tail_norm_limit_check(g, 0.1);
  CHECK(N <= 10);
  CHECK(g.tail_envelope(N) < 0.1);
  if (N > 0) CHECK(g.tail_envelope(N - 1) >= 0.1);

  const auto f = PSummableSequence::finite(2, {1, 1, 1, 1});
  CHECK(tail_norm_limit_check(f, 1e-8) <= 4);
}

TEST_CASE("ones_from is never p-summable") {
  for (double p : {1.5, 2.0, 3.0}) {
    CHECK_THROWS_AS(make_formula("ones_from", {{"start", 0}}, p), NotPSummable);
  }
}

TEST_CASE("formula envelopes") {
  const auto c = make_formula("power", {{"decay", 2.0}}, 2.0);
  // sum (n+1)^-4 = pi^4/90
  CHECK(std::abs(p_norm(c, 1e-9) - std::sqrt(std::pow(M_PI, 4) / 90)) <= 1e-9);
  CHECK_THROWS_AS(make_formula("power", {{"decay", 0.5}}, 2.0), NotPSummable);
  const auto e = make_formula("exponential", {{"rate", 1.0}}, 3.0);
  for (std::size_t N = 0; N < 30; N += 3) {
    long double s = 0;
    for (std::size_t n = N + 1; n < N + 200; ++n) {
      s += std::pow(std::abs(e.coeff(n)), 3.0L);
    }
    CHECK(e.tail_envelope(N) + 1e-12 >= static_cast<double>(std::cbrt(s)));
  }
  CHECK_THROWS_AS(make_formula("no_such", {}, 2.0), std::invalid_argument);
}

TEST_CASE("a bad user envelope is rejected") {
  auto coeff = [](std::size_t) { return 1.0; };
  auto env = [](std::size_t) { return 1.0; };
  CHECK_THROWS_AS(PSummableSequence::formula(2, "flat", coeff, env), NotPSummable);
}

TEST_CASE("certified_dot") {
  const ConjugatePair pair(2, 2);
  const auto a = PSummableSequence::finite(2, {3, 4});
  const auto x = PSummableSequence::finite(2, {1, 1});
  CHECK(certified_dot(a, x, pair, 1e-12) == doctest::Approx(7));
  CHECK(certified_dot(a, PSummableSequence::zero(2), pair, 1e-12) == 0);
  const auto g = PSummableSequence::geometric(2, {0.25, 1.0}, 0.5);
  const auto e0 = PSummableSequence::finite(2, {1});
  CHECK(certified_dot(e0, g, pair, 1e-12) == 0.25);
  // dot of two geometric sequences against the closed form
  const auto u = PSummableSequence::geometric(2, {1.0}, 0.5);
  CHECK(std::abs(certified_dot(u, u, pair, 1e-10) - 4.0 / 3.0) <= 1e-10);
}

TEST_CASE("finite_p_norm matches direct summation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (auto& x : v) x = U(rng);
    const double p = 1.1 + (trial % 9);
    CHECK(finite_p_norm(v, p) == doctest::Approx(oracle::p_norm(v, p)).epsilon(1e-12));
  }
}

TEST_CASE("least_depth_below stalls on slow envelopes") {
  const auto c = make_formula("power", {{"decay", 0.6}}, 2.0);
  CHECK_THROWS_AS(least_depth_below(c, 1e-6, true, 1000), EnvelopeStall);
}

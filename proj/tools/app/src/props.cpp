#include "props.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "compactness/box.hpp"
#include "compactness/corpus.hpp"
#include "compactness/linear.hpp"
#include "compactness/ring.hpp"
#include "compactness/sequences.hpp"

namespace compactness::app {

namespace {

class Suite {
public:
  explicit Suite(std::string name) { result_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& describe) {
    ++result_.cases;
    if (ok) return;
    if (result_.failures++ == 0) result_.first_failure = describe();
  }

  PropertyResult done() { return std::move(result_); }

private:
  PropertyResult result_;
};

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_real_distribution<double> U(-2, 2);
  std::vector<double> v(len(rng));
  for (auto& x : v) x = U(rng);
  return v;
}

PropertyResult truncation_closure(std::size_t cases) {
  Suite s("truncation_closure");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ratio(-0.95, 0.95), p(1.1, 6.0);
  std::uniform_int_distribution<std::size_t> cut(0, 30);
  for (std::size_t t = 0; t < cases / 10; ++t) {
    const double e = p(rng);
    const auto c = t % 2 ? PSummableSequence::finite(e, random_vector(rng, 12))
                         : PSummableSequence::geometric(e, random_vector(rng, 5), ratio(rng));
    const std::size_t N = cut(rng);
    const auto tail = c.truncate_tail(N);
    bool ok = true;
    double previous = INFINITY;
    for (std::size_t K = 0; K < 40 && ok; ++K) {
      const double env = tail.tail_envelope(K);
      double mass = 0;
      for (std::size_t n = K + 1; n < 200; ++n) mass += std::pow(std::abs(tail.coeff(n)), e);
      ok = env <= previous && std::pow(mass, 1 / e) <= env + 1e-12 &&
           (K > N || tail.coeff(K) == 0.0);
      previous = env;
    }
    s.check(ok, [&] { return "case " + std::to_string(t) + ", N = " + std::to_string(N); });
  }
  return s.done();
}

PropertyResult tail_limit(std::size_t) {
  Suite s("tail_norm_limit");
  std::vector<PSummableSequence> corpus;
  for (double p : {1.5, 2.0, 3.0}) {
    corpus.push_back(PSummableSequence::geometric(p, {1.0}, 0.5));
    corpus.push_back(PSummableSequence::finite(p, {1, -2, 3}));
    corpus.push_back(make_formula("exponential", {{"rate", 0.5}}, p));
  }
  for (const auto& c : corpus) {
    for (double eps = 1e-1; eps >= 1e-8 * 0.999; eps /= 10) {
      bool ok = false;
      try {
        ok = c.tail_envelope(tail_norm_limit_check(c, eps)) < eps;
      } catch (const std::exception&) {
      }
      s.check(ok, [&] { return "eps = " + std::to_string(eps); });
    }
  }
  return s.done();
}

PropertyResult head_coefficient(std::size_t cases) {
  Suite s("head_coefficient_bound");
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> p(1.05, 10.0);
  std::uniform_int_distribution<std::size_t> index(0, 20);
  for (std::size_t t = 0; t < cases; ++t) {
    const auto c = PSummableSequence::finite(p(rng), random_vector(rng, 16));
    const std::size_t N = index(rng);
    const auto [lhs, rhs] = head_coefficient_bound(c, N, 1e-12);
    s.check(lhs <= rhs + 1e-9, [&] { return "case " + std::to_string(t); });
  }
  return s.done();
}

PropertyResult holder(std::size_t cases) {
  Suite s("holder");
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> P(1.05, 10.0);
  for (std::size_t t = 0; t < cases; ++t) {
    const auto pair = ConjugatePair::from_p(P(rng));
    const auto a = random_vector(rng, 16);
    auto x = random_vector(rng, 16);
    double dot = 0;
    for (std::size_t n = 0; n < std::min(a.size(), x.size()); ++n) dot += a[n] * x[n];
    const double bound = finite_p_norm(a, pair.p()) * finite_p_norm(x, pair.q());
    s.check(std::abs(dot) <= bound + 1e-9, [&] { return "case " + std::to_string(t); });
  }
  return s.done();
}

PropertyResult min_norm(std::size_t cases) {
  Suite s("min_norm_sampling");
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> U(-1, 1);
  const ConjugatePair two(2, 2);
  for (std::size_t t = 0; t < cases / 10; ++t) {
    const std::size_t k = 1 + t % 4, m = k + (t / 4) % (9 - k);
    std::vector<double> x0(m);
    for (auto& v : x0) v = U(rng);
    std::vector<LinearRow> rows;
    std::vector<std::vector<double>> A;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> a(m);
      for (auto& v : a) v = U(rng);
      double b = 0;
      for (std::size_t n = 0; n < m; ++n) b += a[n] * x0[n];
      A.push_back(a);
      rows.push_back({PSummableSequence::finite(2, a), b});
    }
    const auto x = min_norm_solve(rows, m - 1, two);
    double residual = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double r = -rows[i].b;
      for (std::size_t n = 0; n < m; ++n) r += A[i][n] * x[n];
      residual = std::max(residual, std::abs(r));
    }
    // Random feasible points: z - c with A c = A z - b.
    const double norm = finite_p_norm(x, 2);
    bool shortest = norm <= finite_p_norm(x0, 2) + 1e-9;
    for (int j = 0; j < 10; ++j) {
      std::vector<double> z(m);
      for (auto& v : z) v = 3 * U(rng);
      std::vector<LinearRow> shifted;
      for (std::size_t i = 0; i < k; ++i) {
        double az = 0;
        for (std::size_t n = 0; n < m; ++n) az += A[i][n] * z[n];
        shifted.push_back({rows[i].a, az - rows[i].b});
      }
      const auto correction = min_norm_solve(shifted, m - 1, two);
      std::vector<double> feasible(m);
      for (std::size_t n = 0; n < m; ++n) feasible[n] = z[n] - correction[n];
      shortest = shortest && norm <= finite_p_norm(feasible, 2) + 1e-9;
    }
    s.check(residual <= 1e-9 && shortest, [&] { return "section " + std::to_string(t); });
  }
  return s.done();
}

PropertyResult ring_canonical(std::size_t cases) {
  Suite s("ring_lexicographic_least");
  std::mt19937_64 rng(15);
  for (std::size_t t = 0; t < cases / 10; ++t) {
    const auto R = FiniteRing::zmod(2 + t % 3);
    std::uniform_int_distribution<Element> elem(0, static_cast<Element>(R.size() - 1));
    std::uniform_int_distribution<VarId> var(0, 2);
    std::vector<RingPolynomial> ps;
    for (int k = 0; k < 2; ++k) {
      ps.push_back(RingPolynomial({{elem(rng), {var(rng)}},
                                   {elem(rng), {var(rng), var(rng)}},
                                   {elem(rng), {}}}));
    }
    const auto got = finite_sat(ps, R, {});
    // Enumerate x0, x1, x2 in lexicographic order.
    std::optional<PartialAssignment> expected;
    const std::size_t n = R.size();
    for (std::size_t code = 0; code < n * n * n && !expected; ++code) {
      PartialAssignment a;
      a.set(0, static_cast<Element>(code / (n * n)));
      a.set(1, static_cast<Element>(code / n % n));
      a.set(2, static_cast<Element>(code % n));
      bool ok = true;
      for (const auto& p : ps) ok = ok && eval_poly(p, a, R) == R.zero();
      if (ok) {
        PartialAssignment used;
        for (const auto& p : ps)
          for (VarId v : p.support()) used.set(v, *a.get(v));
        expected = used;
      }
    }
    s.check(got.has_value() == expected.has_value() && (!got || *got == *expected),
            [&] { return "system " + std::to_string(t); });
  }
  return s.done();
}

PropertyResult planted_recovery(std::size_t) {
  Suite s("planted_recovery");
  const ConjugatePair two(2, 2);
  for (std::uint64_t base : {1u, 20u, 300u}) {
    std::vector<double> x(10);
    for (std::size_t n = 0; n < 10; ++n) x[n] = std::ldexp(1.0, -static_cast<int>(n));
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 8; ++i) seeds.push_back(base + i);
    const auto sys = corpus::planted_system(x, seeds, two, 0.5);
    const std::vector<SectionStep> schedule{{4, 16}, {6, 24}, {8, 32}};
    ExtractOptions opt;
    opt.window = 2;
    const auto cand = compactness_extract(sys, schedule, opt);
    bool ok = cand.all_certificates_pass() && cand.q_norm_cert <= *sys.norm_budget();
    for (const auto& c : cand.coordinates) {
      if (c.determined) ok = ok && std::abs(c.value - x[c.index]) <= 1e-6;
    }
    s.check(ok, [&] { return "seed base " + std::to_string(base); });
  }
  return s.done();
}

PropertyResult box_determinism(std::size_t) {
  Suite s("box_determinism");
  const std::vector<FiniteSupportFunction> fs{
      FiniteSupportFunction::polynomial({{1, {0, 0}}, {1, {1, 1}}, {-1, {}}}),
      FiniteSupportFunction::polynomial({{1, {0}}, {-1, {1}}})};
  const auto a = root_search(fs, VariableBox::uniform(2));
  const auto b = root_search(fs, VariableBox::uniform(2));
  s.check(a.point && b.point && *a.point == *b.point && (*a.point)[0] < 0,
          [] { return "circle and diagonal"; });
  return s.done();
}

}  // namespace

std::vector<PropertyResult> run_property_suites(std::optional<std::size_t> cases) {
  const std::size_t n = cases.value_or(10'000);
  return {truncation_closure(n), tail_limit(n),     head_coefficient(n),
          holder(n),             min_norm(n),       ring_canonical(n),
          planted_recovery(n),   box_determinism(n)};
}

}  // namespace compactness::app

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Usage: acceptance <path-to-compactness-binary> <data-dir> <work-dir>
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "compactness/corpus.hpp"
#include "compactness/errors.hpp"
#include "compactness/linear.hpp"
#include "compactness/ring.hpp"
#include "compactness/sequences.hpp"
#include "oracles.hpp"

using namespace compactness;
namespace fs = std::filesystem;

namespace {

std::string g_binary, g_data, g_work;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

struct CliRun {
  int exit_code = -1;
  std::string report;
};

CliRun cli(const std::string& args, const std::string& tag) {
  const std::string out = (fs::path(g_work) / (tag + ".json")).string();
  const std::string cmd = g_binary + " " + args + " --out " + out + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out, std::ios::binary);
  r.report.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return r;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_real_distribution<double> U(-3, 3);
  std::vector<double> v(len(rng));
  for (auto& x : v) x = U(rng);
  return v;
}

std::vector<double> planted_x() {
  std::vector<double> x(10);
  for (std::size_t n = 0; n < 10; ++n) x[n] = std::ldexp(1.0, -static_cast<int>(n));
  return x;
}

std::vector<std::uint64_t> seeds(std::size_t k) {
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < k; ++i) s.push_back(1 + i);
  return s;
}

// 1. Truncation closure, tail limits, head coefficient bound.
void sequence_suite() {
  std::mt19937_64 rng(1);
  std::vector<PSummableSequence> corpus;
  std::uniform_real_distribution<double> P(1.2, 5.0), R(-0.9, 0.9);
  for (int i = 0; i < 20; ++i) corpus.push_back(PSummableSequence::finite(P(rng), random_vector(rng, 12)));
  for (int i = 0; i < 20; ++i) {
    corpus.push_back(PSummableSequence::geometric(P(rng), random_vector(rng, 5), R(rng)));
  }
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    corpus.push_back(make_formula("power", {{"decay", 3.0}}, p));
    corpus.push_back(make_formula("alternating_power", {{"decay", 2.5}, {"scale", 2}}, p));
    corpus.push_back(make_formula("exponential", {{"rate", 0.3}}, p));
  }
  require(corpus.size() >= 50, "corpus too small");

  for (const auto& c : corpus) {
    const double p = c.exponent();
    for (std::size_t N : {0u, 1u, 3u, 10u}) {
      const auto t = c.truncate_tail(N);
      double previous = INFINITY;
      for (std::size_t K = 0; K < 24; ++K) {
        require(K > N || t.coeff(K) == 0.0, "truncation keeps a head coefficient");
        require(K <= N || t.coeff(K) == c.coeff(K), "truncation changes the tail");
        const double env = t.tail_envelope(K);
        require(env <= previous, "truncated envelope increases");
        previous = env;
        std::vector<double> tail;
        for (std::size_t n = K + 1; n < K + 400; ++n) tail.push_back(t.coeff(n));
        require(oracle::p_norm(tail, p) <= env + 1e-12, "truncated envelope undercuts the tail");
      }
    }
    for (double eps = 1e-1; eps > 1e-8 * 0.999; eps /= 10) {
      const std::size_t N = tail_norm_limit_check(c, eps);
      require(c.tail_envelope(N) < eps, "tail_norm_limit_check result above eps");
    }
  }

  std::uniform_int_distribution<std::size_t> index(0, 20);
  for (int t = 0; t < 10'000; ++t) {
    const auto coeffs = random_vector(rng, 16);
    const double q = P(rng) + 0.5;
    const auto c = PSummableSequence::finite(q, coeffs);
    const std::size_t N = index(rng);
    const auto [lhs, rhs] = head_coefficient_bound(c, N, 1e-12);
    const double direct = N < coeffs.size() ? std::abs(coeffs[N]) : 0.0;
    require(lhs == direct, "head coefficient differs from direct lookup");
    require(std::abs(rhs - oracle::p_norm(coeffs, q)) <= 1e-9, "p_norm differs from direct summation");
    require(lhs <= rhs + 1e-9, "|c_N| exceeds the norm");
  }
}

// 2. Hölder on random finitely supported pairs.
void holder() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> P(1.01, 10.0);
  for (int t = 0; t < 10'000; ++t) {
    const auto pair = ConjugatePair::from_p(P(rng));
    const auto a = random_vector(rng, 20);
    const auto x = random_vector(rng, 20);
    const auto A = PSummableSequence::finite(pair.p(), a);
    const auto X = PSummableSequence::finite(pair.q(), x);
    const double dot = certified_dot(A, X, pair, 1e-12);
    require(std::abs(dot - oracle::dot(a, x)) <= 1e-9, "certified_dot differs from direct dot");
    const double bound = oracle::p_norm(a, pair.p()) * oracle::p_norm(x, pair.q());
    require(std::abs(dot) <= bound + 1e-9, "Hölder inequality violated");
  }
}

// 3. Finite rings.
void rings() {
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto R = FiniteRing::zmod(n);
    require(!ring_axiom_violation(R.add_table(), R.mul_table(), 0, 1), "Z/n rejected");
    require(oracle::is_ring(R.add_table(), R.mul_table(), 0, 1), "oracle rejects Z/n");
  }
  auto R4 = FiniteRing::zmod(4);
  auto mul = R4.mul_table();
  mul[2][2] = 2;
  require(ring_axiom_violation(R4.add_table(), mul, 0, 1).has_value(), "corrupted table accepted");

  std::mt19937_64 rng(3);
  const std::vector<FiniteRing> rings{FiniteRing::zmod(2), FiniteRing::zmod(3), FiniteRing::zmod(4)};
  for (int t = 0; t < 20'000; ++t) {
    const auto& R = rings[t % 3];
    std::uniform_int_distribution<Element> elem(0, static_cast<Element>(R.size() - 1));
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_int_distribution<VarId> var(0, 2);
    std::vector<RingPolynomial> ps;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      std::vector<RingTerm> terms;
      for (int j = 0, m = 1 + count(rng) % 3; j < m; ++j) {
        RingTerm term{elem(rng), {}};
        for (int d = 0, deg = count(rng) % 3; d < deg; ++d) term.vars.push_back(var(rng));
        terms.push_back(term);
      }
      ps.push_back(RingPolynomial(terms));
    }
    const auto expected = oracle::exhaustive_sat(ps, R);
    const auto got = finite_sat(ps, R, {});
    require(expected.has_value() == got.has_value(), "satisfiability disagrees with oracle");
    require(!got || got->values() == *expected, "root is not the lexicographically least");
  }

  const std::vector<std::size_t> schedule{250, 500, 750, 1000};
  const std::vector<VarId> vars{0, 1};
  const auto report = compactness_solve_ring(corpus::ring_chain(1000), FiniteRing::zmod(2),
                                             schedule, 3, vars);
  require(report.verified_prefix == 1000, "verified prefix is not 1000");
  for (const auto& c : report.coordinates) {
    require(c.status == Stability::Stabilized && c.value == 0u, "chain variable not stabilized at 0");
  }
}

// 4. Finite-section extraction on a planted system.
void section_extraction() {
  const auto x = planted_x();
  const ConjugatePair two(2, 2);
  const auto sys = corpus::planted_system(x, seeds(8), two, 0.5);
  const double M = *sys.norm_budget();
  const std::vector<SectionStep> schedule{{2, 8}, {4, 16}, {8, 32}};
  ExtractOptions opt;
  opt.window = 2;
  const auto cand = compactness_extract(sys, schedule, opt);
  std::size_t determined = 0;
  for (const auto& c : cand.coordinates) {
    if (!c.determined) continue;
    ++determined;
    require(std::abs(c.value - x[c.index]) <= 1e-6, "determined coordinate off the planted value");
  }
  require(determined > 0, "no determined coordinates");
  require(cand.residuals.size() == 8, "missing residual certificates");
  for (const auto& r : cand.residuals) {
    const auto row = sys.row(r.row);
    // ||a^N||_2 in closed form for the geometric layout.
    const double tail = std::sqrt(oracle::geometric_tail_p_sum(row.a.explicit_coeffs(), row.a.ratio(), 32, 2));
    require(r.head_residual <= tail * M + 1e-9, "head residual above the Hölder bound");
  }
  require(cand.q_norm_cert <= M, "q_norm_cert exceeds M");
  require(cand.q_norm_cert >= oracle::p_norm(cand.y, 2) - 1e-9, "q_norm_cert below the norm");
}

// 5. The epsilon / coordinate-bound equivalence in both directions.
void envelope_round_trip() {
  const auto x = planted_x();
  const ConjugatePair two(2, 2);
  const auto sys = corpus::planted_system(x, seeds(8), two, 0.5);
  const auto e = envelope_from_solution(PSummableSequence::finite(2, x), 64);
  std::vector<double> bound_values;
  for (double v : x) bound_values.push_back(std::abs(v) + 1);
  const auto bounds = CoordinateBounds::from_values(bound_values, 1.0);

  std::vector<std::size_t> rows(8), Ns;
  for (std::size_t i = 0; i < 8; ++i) rows[i] = i;
  for (std::size_t N = 0; N <= 40; ++N) Ns.push_back(N);
  require(check_condition_two(sys, e, bounds, rows, 1e-6, x, Ns).holds,
          "planted witness fails the envelope conditions");

  const std::vector<SectionStep> schedule{{4, 16}, {6, 24}, {8, 32}};
  const std::vector<double> eps{1e-8, 1e-9, 1e-10};
  EpsilonExtractOptions opt;
  opt.window = 2;
  opt.coord_tol = 1e-6;
  const auto cand = epsilon_compactness_extract(sys, e, bounds, schedule, eps, opt);
  std::size_t determined = 0;
  for (const auto& c : cand.coordinates) {
    require(std::abs(c.value) <= bounds(c.index) + 1e-12, "coordinate bound violated");
    if (!c.determined) continue;
    ++determined;
    require(std::abs(c.value - x[c.index]) <= 1e-6, "determined coordinate off the planted value");
  }
  require(determined > 0, "no determined coordinates");
  require(cand.tail_checks.size() == 33, "tail checks missing");
  for (const auto& t : cand.tail_checks) {
    std::vector<double> tail(cand.y.begin() + std::min(t.N + 1, cand.y.size()), cand.y.end());
    require(oracle::p_norm(tail, 2) <= e(t.N) + 1e-9, "tail norm above the envelope");
  }
}

// 6. Counterexamples through the command line.
void counterexamples() {
  auto helly = cli("demo helly", "c6_helly");
  require(helly.exit_code == 1, "demo helly exit " + std::to_string(helly.exit_code));
  auto r = nlohmann::json::parse(helly.report);
  require(r["refutation_flags"]["NotPSummable"].get<bool>(), "NotPSummable not flagged");
  bool p2 = false;
  for (const auto& c : r["certification"]) {
    p2 = p2 || (c["p"].get<double>() == 2.0 && c["result"] == "NotPSummable");
  }
  require(p2, "p = 2 certification did not fail");
  const auto solution = r["prefix"]["solution"].get<std::vector<double>>();
  require(solution == std::vector<double>{0, 0, 0, 0, 1}, "5-prefix pattern wrong");
  for (const auto& row : r["prefix"]["residuals"]) {
    require(row["residual"].get<double>() <= 1e-9, "5-prefix residual too large");
  }

  auto small = cli("demo abian --box 5 --prefix 7", "c6_abian5");
  require(small.exit_code == 1, "abian box 5 exit " + std::to_string(small.exit_code));
  r = nlohmann::json::parse(small.report);
  require(r["refutation_flags"]["PrefixRootNotFound"].get<bool>(), "PrefixRootNotFound not flagged");
  require(r["error"]["level"].get<int>() == 7, "wrong failing level");

  auto big = cli("demo abian --box 10 --prefix 7", "c6_abian10");
  require(big.exit_code == 0, "abian box 10 exit " + std::to_string(big.exit_code));
  r = nlohmann::json::parse(big.report);
  for (const auto& row : r["root"]["residuals"]) {
    require(row["residual"].get<double>() <= 1e-6, "Abian root residual too large");
  }
}

// 7. Minimum-norm property against sampled feasible solutions.
void min_norm() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  std::uniform_int_distribution<int> K(1, 4), Mdim(1, 8);
  const ConjugatePair two(2, 2);
  for (int t = 0; t < 1000; ++t) {
    const int k = K(rng), m = Mdim(rng);
    Eigen::MatrixXd A(k, m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = U(rng);
    if (t % 5 == 0 && k > 1) A.row(k - 1) = A.row(0) * 2.0;  // rank deficient
    Eigen::VectorXd x0(m);
    for (int j = 0; j < m; ++j) x0(j) = U(rng);
    const Eigen::VectorXd b = A * x0;
    std::vector<LinearRow> rows;
    for (int i = 0; i < k; ++i) {
      std::vector<double> a(A.row(i).data(), A.row(i).data() + 0);
      for (int j = 0; j < m; ++j) a.push_back(A(i, j));
      rows.push_back({PSummableSequence::finite(2, a), b(i)});
    }
    const auto xs = min_norm_solve(rows, static_cast<std::size_t>(m - 1), two);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), m);
    require((A * x - b).cwiseAbs().maxCoeff() <= 1e-9, "min-norm residual above 1e-9");
    // Feasible samples: x0 plus random null-space combinations.
    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(A).kernel();
    for (int s = 0; s < 20; ++s) {
      Eigen::VectorXd z = x0;
      if (kernel.cols() > 0 && kernel.norm() > 0) {
        Eigen::VectorXd c(kernel.cols());
        for (int j = 0; j < c.size(); ++j) c(j) = 2 * U(rng);
        z += kernel * c;
      }
      require(x.norm() <= z.norm() + 1e-9, "sampled solution shorter than min-norm");
    }
  }
}

// 8. Byte-identical structured reports across runs.
void determinism() {
  const fs::path planted = fs::path(g_data) / "planted.json";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve-ring " + (fs::path(g_data) / "chain_z2.json").string() +
           " --schedule 250,500,750,1000 --window 3", "ring"},
      {"solve-linear " + planted.string() + " --schedule 2:8,4:16,8:32 --window 2", "linear"},
      {"solve-linear " + planted.string() + " --schedule 2:8,4:16,8:32 --window 2 --eps 1e-10", "linear_eps"},
      {"solve-box " + (fs::path(g_data) / "box_chain.json").string() + " --schedule 10,20,40", "box"},
      {"demo helly", "helly"},
      {"demo abian --box 5 --prefix 7", "abian5"},
      {"demo abian --box 10 --prefix 7", "abian10"},
      {"props --budget 2000", "props"},
  };
  for (const auto& [args, tag] : commands) {
    const auto a = cli(args, "c8_" + tag + "_a");
    const auto b = cli(args, "c8_" + tag + "_b");
    require(!a.report.empty(), tag + ": empty report");
    require(a.exit_code == b.exit_code && a.report == b.report, tag + ": reports differ");
  }
  // verify on a solve report
  const auto first = (fs::path(g_work) / "c8_linear_a.json").string();
  const auto v1 = cli("verify " + first, "c8_verify_a");
  const auto v2 = cli("verify " + first, "c8_verify_b");
  require(v1.exit_code == 0, "verify did not reproduce the verdicts");
  require(v1.report == v2.report, "verify: reports differ");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <compactness-binary> <data-dir> <work-dir>\n";
    return 2;
  }
  g_binary = argv[1];
  g_data = argv[2];
  g_work = argv[3];
  fs::create_directories(g_work);

  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<void()> run;
  };
  const Criterion criteria[] = {
      {"1 sequence truncation and tails", 10, sequence_suite},
      {"2 holder suite", 10, holder},
      {"3 finite rings", 5, rings},
      {"4 finite-section extraction", 5, section_extraction},
      {"5 envelope round trip", 10, envelope_round_trip},
      {"6 counterexamples", 10, counterexamples},
      {"7 minimum-norm property", 10, min_norm},
      {"8 determinism", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && seconds > c.limit_seconds) {
      ok = false;
      detail = "over the time limit";
    }
    std::printf("%s  %-30s %7.3fs%s%s\n", ok ? "PASS" : "FAIL", c.name, seconds,
                detail.empty() ? "" : "  ", detail.c_str());
    failed += ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

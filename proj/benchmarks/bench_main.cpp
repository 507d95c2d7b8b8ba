#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "compactness/box.hpp"
#include "compactness/corpus.hpp"
#include "compactness/linear.hpp"
#include "compactness/ring.hpp"
#include "compactness/sequences.hpp"

using namespace compactness;

namespace {

void BM_PNormFormula(benchmark::State& state) {
  const auto c = make_formula("power", {{"decay", 3.0}}, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(p_norm(c, 1e-12));
}
BENCHMARK(BM_PNormFormula);

void BM_CertifiedDot(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> a(state.range(0)), x(state.range(0));
  for (auto& v : a) v = U(rng);
  for (auto& v : x) v = U(rng);
  const auto pair = ConjugatePair::from_p(3.0);
  const auto A = PSummableSequence::finite(pair.p(), a);
  const auto X = PSummableSequence::finite(pair.q(), x);
  for (auto _ : state) benchmark::DoNotOptimize(certified_dot(A, X, pair, 1e-12));
}
BENCHMARK(BM_CertifiedDot)->Arg(16)->Arg(256)->Arg(4096);

// Canonical prefix solution of the Z/2 chain, one search per prefix length.
void BM_RingChainPrefix(benchmark::State& state) {
  const auto stream = corpus::ring_chain(state.range(0));
  const auto R = FiniteRing::zmod(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_prefix_canonical(stream, state.range(0), R));
  }
}
BENCHMARK(BM_RingChainPrefix)->Arg(100)->Arg(1000);

void BM_PlantedExtraction(benchmark::State& state) {
  std::vector<double> x(10);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::ldexp(1.0, -static_cast<int>(n));
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 1; i <= 8; ++i) seeds.push_back(i);
  const auto sys = corpus::planted_system(x, seeds, ConjugatePair(2, 2), 0.5);
  const std::size_t H = state.range(0);
  const std::vector<SectionStep> schedule{{2, H / 4}, {4, H / 2}, {8, H}};
  ExtractOptions opt;
  opt.window = 2;
  for (auto _ : state) benchmark::DoNotOptimize(compactness_extract(sys, schedule, opt));
}
BENCHMARK(BM_PlantedExtraction)->Arg(32)->Arg(128)->Arg(512);

void BM_AbianRootSearch(benchmark::State& state) {
  const auto fs = corpus::abian_family(state.range(0)).prefix(state.range(0));
  const auto box = VariableBox::uniform(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(root_search(fs, box));
}
BENCHMARK(BM_AbianRootSearch)->Arg(3)->Arg(7);

void BM_BoxChainExtract(benchmark::State& state) {
  const auto stream = corpus::box_chain(40);
  const auto box = VariableBox::uniform(1.0);
  const std::vector<std::size_t> schedule{10, 20, 40};
  for (auto _ : state) benchmark::DoNotOptimize(box_compactness_extract(stream, box, schedule));
}
BENCHMARK(BM_BoxChainExtract);

}  // namespace

BENCHMARK_MAIN();

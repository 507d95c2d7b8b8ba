#include "compactness/corpus.hpp"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "compactness/errors.hpp"
#include "compensated_sum.hpp"

namespace compactness::corpus {

FunctionStream abian_family(std::size_t n_max) {
  if (n_max < 1) throw std::invalid_argument("abian family needs n_max >= 1");
  FunctionStream s;
  s.length = n_max;
  s.at = [n_max](std::size_t k) {
    if (k >= n_max) throw std::out_of_range("abian family index");
    const VarId y = k + 1;
    // (x - (k+1)) - y^2
    return FiniteSupportFunction::polynomial({
        {1.0, {0}},
        {-static_cast<double>(k + 1), {}},
        {-1.0, {y, y}},
    });
  };
  return s;
}

LinearRow helly_row(std::size_t i, double p) {
  if (i < 1) throw std::invalid_argument("Helly rows are numbered from 1");
  return {make_formula("ones_from", {{"start", static_cast<double>(i - 1)}}, p),
          1.0};
}

InfiniteLinearSystem helly_system(const ConjugatePair& pair) {
  // Certifying the first row already fails; the remaining rows would too.
  helly_row(1, pair.p());
  throw NotPSummable("ones_from", pair.p(), "unreachable");
}

std::vector<LinearRow> helly_prefix_rows(std::size_t k, std::size_t width,
                                         double p) {
  if (width < k) throw std::invalid_argument("width must cover the k rows");
  std::vector<LinearRow> rows;
  for (std::size_t i = 1; i <= k; ++i) {
    std::vector<double> a(width, 0.0);
    for (std::size_t n = i - 1; n < width; ++n) a[n] = 1.0;
    rows.push_back({PSummableSequence::finite(p, std::move(a)), 1.0});
  }
  return rows;
}

std::vector<double> helly_prefix_solution(std::size_t k) {
  std::vector<double> x(k, 0.0);
  if (k > 0) x[k - 1] = 1.0;
  return x;
}

namespace {

double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

InfiniteLinearSystem planted_system(const std::vector<double>& x_star,
                                    const std::vector<std::uint64_t>& row_seeds,
                                    const ConjugatePair& pair, double decay,
                                    std::size_t head_length) {
  if (!(decay > 0.0 && decay < 1.0)) {
    throw std::invalid_argument("decay must lie in (0, 1)");
  }
  if (head_length < 1) throw std::invalid_argument("head_length must be >= 1");
  for (double v : x_star) {
    if (!std::isfinite(v)) throw std::invalid_argument("x_star must be finite");
  }

  std::vector<LinearRow> rows;
  rows.reserve(row_seeds.size());
  for (std::uint64_t seed : row_seeds) {
    std::mt19937_64 rng(seed);
    std::vector<double> head(head_length);
    for (auto& h : head) h = 2.0 * unit_interval(rng) - 1.0;
    // Keep the tail visible: a tiny last head entry makes it numerically
    // indistinguishable from a finite row.
    if (std::abs(head.back()) < 0.25) head.back() = head.back() < 0 ? -0.25 : 0.25;
    auto a = PSummableSequence::geometric(pair.p(), head, decay);
    detail::CompensatedSum b;
    for (std::size_t n = 0; n < x_star.size(); ++n) b.add(a.coeff(n) * x_star[n]);
    rows.push_back({std::move(a), b.value()});
  }
  double M = 1.5 * finite_p_norm(x_star, pair.q());
  if (M == 0.0) M = 1.0;
  return InfiniteLinearSystem::from_rows(pair, std::move(rows), M);
}

RingConstraintStream ring_chain(std::size_t length) {
  RingConstraintStream s;
  if (length > 0) s.length = length;
  s.enumerate = [](std::size_t k) {
    return RingPolynomial::variable(k) + RingPolynomial::variable(k + 1);
  };
  s.touching = [length](VarId v) -> std::optional<std::vector<std::size_t>> {
    std::vector<std::size_t> out;
    if (v > 0 && (length == 0 || v - 1 < length)) out.push_back(v - 1);
    if (length == 0 || v < length) out.push_back(v);
    return out;
  };
  return s;
}

RingConstraintStream ring_forced(std::size_t length) {
  RingConstraintStream s;
  if (length > 0) s.length = length;
  s.enumerate = [](std::size_t) {
    return RingPolynomial::variable(0) + RingPolynomial::constant(1);
  };
  return s;
}

RingConstraintStream ring_alternating(std::size_t length) {
  RingConstraintStream s;
  if (length > 0) s.length = length;
  s.enumerate = [](std::size_t k) {
    return k % 2 == 0
               ? RingPolynomial::variable(0)
               : RingPolynomial::variable(0) + RingPolynomial::constant(1);
  };
  return s;
}

FunctionStream box_chain(std::size_t length) {
  FunctionStream s;
  if (length > 0) s.length = length;
  s.at = [](std::size_t k) {
    if (k == 0) {
      return FiniteSupportFunction::polynomial({{1.0, {0}}, {-0.5, {}}});
    }
    return FiniteSupportFunction::polynomial({{1.0, {k - 1}}, {-1.0, {k}}});
  };
  return s;
}

FunctionStream box_zero(std::size_t length) {
  FunctionStream s;
  if (length > 0) s.length = length;
  s.at = [](std::size_t) {
    return FiniteSupportFunction::polynomial({{0.0, {0}}});
  };
  return s;
}

namespace {

class Params {
public:
  Params(const FamilyDescriptor& family, std::set<std::string> allowed)
      : family_(family) {
    for (const auto& [key, value] : family.params) {
      if (!allowed.count(key)) {
        throw std::invalid_argument("family '" + family.name +
                                    "' has no parameter '" + key + "'");
      }
      if (!std::isfinite(value)) {
        throw std::invalid_argument("parameter '" + key + "' is not finite");
      }
    }
  }

  double real(const std::string& key, double fallback) const {
    auto it = family_.params.find(key);
    return it == family_.params.end() ? fallback : it->second;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    const double v = real(key, static_cast<double>(fallback));
    if (v < 0 || v != std::floor(v) || v > 1e9) {
      throw std::invalid_argument("parameter '" + key +
                                  "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  }

private:
  const FamilyDescriptor& family_;
};

const std::set<std::string> kPlantedKeys = {"rows",  "support", "x_ratio",
                                            "decay", "seed",    "head_length"};

}  // namespace

std::vector<double> planted_vector(const FamilyDescriptor& family) {
  const Params params(family, kPlantedKeys);
  const std::size_t support = params.count("support", 10);
  const double ratio = params.real("x_ratio", 0.5);
  std::vector<double> x(support);
  double v = 1.0;
  for (auto& xi : x) {
    xi = v;
    v *= ratio;
  }
  return x;
}

InfiniteLinearSystem linear_family(const FamilyDescriptor& family,
                                   const ConjugatePair& pair) {
  if (family.name == "helly") {
    Params(family, {});
    return helly_system(pair);
  }
  if (family.name == "planted") {
    const Params params(family, kPlantedKeys);
    const std::size_t rows = params.count("rows", 8);
    const std::size_t seed = params.count("seed", 1);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < rows; ++i) seeds.push_back(seed + i);
    return planted_system(planted_vector(family), seeds, pair,
                          params.real("decay", 0.5),
                          params.count("head_length", 4));
  }
  throw std::invalid_argument("unknown linear family '" + family.name + "'");
}

RingConstraintStream ring_family(const FamilyDescriptor& family) {
  const Params params(family, {"length"});
  const std::size_t length = params.count("length", 0);
  if (family.name == "chain") return ring_chain(length);
  if (family.name == "forced") return ring_forced(length);
  if (family.name == "alternating") return ring_alternating(length);
  throw std::invalid_argument("unknown ring family '" + family.name + "'");
}

FunctionStream box_family(const FamilyDescriptor& family) {
  if (family.name == "abian") {
    const Params params(family, {"n_max"});
    return abian_family(params.count("n_max", 100));
  }
  const Params params(family, {"length"});
  const std::size_t length = params.count("length", 0);
  if (family.name == "chain") return box_chain(length);
  if (family.name == "zero") return box_zero(length);
  throw std::invalid_argument("unknown box family '" + family.name + "'");
}

std::vector<std::string> linear_families() { return {"helly", "planted"}; }
std::vector<std::string> ring_families() {
  return {"alternating", "chain", "forced"};
}
std::vector<std::string> box_families() { return {"abian", "chain", "zero"}; }

}  // namespace compactness::corpus

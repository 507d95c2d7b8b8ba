// Independent reference implementations used as test oracles. They share no
// code with the library beyond the public data types.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "compactness/ring.hpp"

namespace oracle {

// Direct summation, no compensation, no envelopes.
inline double p_norm(const std::vector<double>& v, double p) {
  long double s = 0;
  for (double x : v) s += std::pow(std::abs(static_cast<long double>(x)), p);
  return static_cast<double>(std::pow(s, 1.0L / p));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    s += static_cast<long double>(a[i]) * b[i];
  }
  return static_cast<double>(s);
}

// Geometric tail after index N of head/ratio layout, by closed form:
// sum_{n > N} |c_n|^p.
inline double geometric_tail_p_sum(const std::vector<double>& head, double r,
                                   std::size_t N, double p) {
  const std::size_t m = head.size();
  long double s = 0;
  for (std::size_t n = N + 1; n < m; ++n) s += std::pow(std::abs(head[n]), p);
  // n >= m: |h_last|^p |r|^{p (n-m+1)}
  const std::size_t first = std::max(N + 1, m);
  const long double rp = std::pow(std::abs(r), p);
  s += std::pow(std::abs(head.back()), p) *
       std::pow(rp, static_cast<long double>(first - m + 1)) / (1 - rp);
  return static_cast<double>(s);
}

// Evaluates a ring polynomial under a total map by direct table lookups.
inline compactness::Element eval(const compactness::RingPolynomial& poly,
                                 const std::map<compactness::VarId,
                                                compactness::Element>& a,
                                 const compactness::FiniteRing& R) {
  const auto& add = R.add_table();
  const auto& mul = R.mul_table();
  compactness::Element total = R.zero();
  for (const auto& t : poly.terms()) {
    compactness::Element v = t.coeff;
    for (auto var : t.vars) v = mul[v][a.at(var)];
    total = add[total][v];
  }
  return total;
}

// Enumerates every total map of the support union in lexicographic order
// (first variable most significant) and returns the first common root.
inline std::optional<std::map<compactness::VarId, compactness::Element>>
exhaustive_sat(const std::vector<compactness::RingPolynomial>& polys,
               const compactness::FiniteRing& R) {
  std::vector<compactness::VarId> vars;
  for (const auto& p : polys) {
    for (auto v : p.support()) vars.push_back(v);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) total *= R.size();
  for (std::size_t code = 0; code < total; ++code) {
    std::map<compactness::VarId, compactness::Element> a;
    std::size_t c = code;
    for (std::size_t i = vars.size(); i-- > 0;) {
      a[vars[i]] = static_cast<compactness::Element>(c % R.size());
      c /= R.size();
    }
    bool ok = true;
    for (const auto& p : polys) {
      if (eval(p, a, R) != R.zero()) {
        ok = false;
        break;
      }
    }
    if (ok) return a;
  }
  return std::nullopt;
}

// Checks the ring axioms by brute force over all triples.
inline bool is_ring(const compactness::FiniteRing::Table& add,
                    const compactness::FiniteRing::Table& mul,
                    compactness::Element zero, compactness::Element one) {
  const std::size_t n = add.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (add[a][zero] != a || mul[a][one] != a || mul[one][a] != a) return false;
    bool has_inverse = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (add[a][b] != add[b][a]) return false;
      if (add[a][b] == zero) has_inverse = true;
      for (std::size_t c = 0; c < n; ++c) {
        if (add[add[a][b]][c] != add[a][add[b][c]]) return false;
        if (mul[mul[a][b]][c] != mul[a][mul[b][c]]) return false;
        if (mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]) return false;
        if (mul[add[a][b]][c] != add[mul[a][c]][mul[b][c]]) return false;
      }
    }
    if (!has_inverse) return false;
  }
  return true;
}

}  // namespace oracle

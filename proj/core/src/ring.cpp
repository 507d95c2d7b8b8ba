#include "compactness/ring.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "compactness/errors.hpp"

namespace compactness {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stabilized: return "STABILIZED";
    case Stability::Unstable: return "UNSTABLE";
    case Stability::Unassigned: return "UNASSIGNED";
  }
  return "UNKNOWN";
}

std::string_view to_string(CertificateStrength s) {
  return s == CertificateStrength::Strong ? "strong" : "heuristic";
}

// ---------------------------------------------------------------- rings

std::optional<std::string> ring_axiom_violation(const FiniteRing::Table& add,
                                                const FiniteRing::Table& mul,
                                                Element zero, Element one) {
  const std::size_t n = add.size();
  auto where = [](const char* law, std::size_t a, std::size_t b,
                  std::size_t c) {
    std::ostringstream os;
    os << law << " fails at (" << a << ", " << b << ", " << c << ")";
    return os.str();
  };
  if (n == 0) return "ring must have at least one element";
  if (mul.size() != n) return "tables have different sizes";
  for (std::size_t i = 0; i < n; ++i) {
    if (add[i].size() != n || mul[i].size() != n) return "tables are not square";
    for (std::size_t j = 0; j < n; ++j) {
      if (add[i][j] >= n || mul[i][j] >= n) return "table entry out of range";
    }
  }
  if (zero >= n || one >= n) return "zero or one out of range";

  for (std::size_t a = 0; a < n; ++a) {
    if (add[a][zero] != a || add[zero][a] != a) {
      return where("additive identity", a, zero, 0);
    }
    bool has_inverse = false;
    for (std::size_t b = 0; b < n && !has_inverse; ++b) {
      has_inverse = add[a][b] == zero;
    }
    if (!has_inverse) return where("additive inverse", a, 0, 0);
    for (std::size_t b = 0; b < n; ++b) {
      if (add[a][b] != add[b][a]) return where("additive commutativity", a, b, 0);
    }
    if (mul[a][one] != a || mul[one][a] != a) {
      return where("multiplicative identity", a, one, 0);
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (add[add[a][b]][c] != add[a][add[b][c]]) {
          return where("additive associativity", a, b, c);
        }
        if (mul[mul[a][b]][c] != mul[a][mul[b][c]]) {
          return where("multiplicative associativity", a, b, c);
        }
        if (mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]) {
          return where("left distributivity", a, b, c);
        }
        if (mul[add[a][b]][c] != add[mul[a][c]][mul[b][c]]) {
          return where("right distributivity", a, b, c);
        }
      }
    }
  }
  return std::nullopt;
}

FiniteRing::FiniteRing(Table add, Table mul, Element zero, Element one)
    : add_(std::move(add)), mul_(std::move(mul)), zero_(zero), one_(one) {}

FiniteRing FiniteRing::from_tables(Table add, Table mul, Element zero,
                                   Element one) {
  if (auto why = ring_axiom_violation(add, mul, zero, one)) {
    throw InvalidRing(*why);
  }
  return FiniteRing(std::move(add), std::move(mul), zero, one);
}

FiniteRing FiniteRing::zmod(std::size_t n) {
  if (n == 0) throw InvalidRing("Z/0 is not finite");
  Table add(n, std::vector<Element>(n));
  Table mul(n, std::vector<Element>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      add[a][b] = static_cast<Element>((a + b) % n);
      mul[a][b] = static_cast<Element>((a * b) % n);
    }
  }
  // Z/1 is the zero ring, where one == zero.
  return FiniteRing(std::move(add), std::move(mul), 0,
                    static_cast<Element>(n == 1 ? 0 : 1));
}

// ----------------------------------------------------------- polynomials

RingPolynomial::RingPolynomial(std::vector<RingTerm> terms)
    : terms_(std::move(terms)) {
  std::set<VarId> vars;
  for (auto& t : terms_) {
    std::sort(t.vars.begin(), t.vars.end());
    vars.insert(t.vars.begin(), t.vars.end());
  }
  support_.assign(vars.begin(), vars.end());
}

RingPolynomial RingPolynomial::constant(Element c) {
  return RingPolynomial({RingTerm{c, {}}});
}

RingPolynomial RingPolynomial::variable(VarId v, Element c) {
  return RingPolynomial({RingTerm{c, {v}}});
}

RingPolynomial RingPolynomial::operator+(const RingPolynomial& other) const {
  auto terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return RingPolynomial(std::move(terms));
}

std::optional<Element> PartialAssignment::get(VarId v) const {
  auto it = values_.find(v);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

RingPolynomial RingConstraintStream::at(std::size_t k) const {
  if (length && k >= *length) {
    throw std::out_of_range("constraint index beyond stream length");
  }
  return enumerate(k);
}

std::vector<RingPolynomial> RingConstraintStream::prefix(std::size_t L) const {
  if (length && L > *length) {
    throw std::invalid_argument("prefix longer than the constraint stream");
  }
  std::vector<RingPolynomial> out;
  out.reserve(L);
  for (std::size_t k = 0; k < L; ++k) out.push_back(enumerate(k));
  return out;
}

RingConstraintStream RingConstraintStream::from_list(
    std::vector<RingPolynomial> polys) {
  auto shared = std::make_shared<const std::vector<RingPolynomial>>(
      std::move(polys));
  RingConstraintStream s;
  s.length = shared->size();
  s.enumerate = [shared](std::size_t k) { return (*shared)[k]; };
  s.touching = [shared](VarId v) -> std::optional<std::vector<std::size_t>> {
    std::vector<std::size_t> hits;
    for (std::size_t k = 0; k < shared->size(); ++k) {
      const auto& sup = (*shared)[k].support();
      if (std::binary_search(sup.begin(), sup.end(), v)) hits.push_back(k);
    }
    return hits;
  };
  return s;
}

Element eval_poly(const RingPolynomial& p, const PartialAssignment& a,
                  const FiniteRing& ring) {
  Element total = ring.zero();
  for (const auto& term : p.terms()) {
    Element value = term.coeff;
    for (VarId v : term.vars) {
      auto x = a.get(v);
      if (!x) throw UnassignedVariable(v);
      value = ring.mul(value, *x);
    }
    total = ring.add(total, value);
  }
  return total;
}

// ---------------------------------------------------------------- search

namespace {

// A polynomial with every factor resolved to a fixed element or a slot in
// the free-variable vector.
struct CompiledPoly {
  struct Factor {
    bool is_free;
    std::size_t slot;  // free position when is_free
    Element value;     // fixed value otherwise
  };
  struct Term {
    Element coeff;
    std::vector<Factor> factors;
  };
  std::vector<Term> terms;

  Element eval(const std::vector<Element>& free_values,
               const FiniteRing& ring) const {
    Element total = ring.zero();
    for (const auto& t : terms) {
      Element v = t.coeff;
      for (const auto& f : t.factors) {
        v = ring.mul(v, f.is_free ? free_values[f.slot] : f.value);
      }
      total = ring.add(total, v);
    }
    return total;
  }
};

void check_elements(const RingPolynomial& p, const FiniteRing& ring) {
  for (const auto& t : p.terms()) {
    if (t.coeff >= ring.size()) {
      throw std::invalid_argument("polynomial coefficient outside the ring");
    }
  }
}

}  // namespace

std::optional<PartialAssignment> finite_sat(
    std::span<const RingPolynomial> polys, const FiniteRing& ring,
    const PartialAssignment& fixed, const RingSearchOptions& options) {
  for (const auto& [v, value] : fixed.values()) {
    if (value >= ring.size()) {
      throw std::invalid_argument("fixed value outside the ring");
    }
  }
  std::set<VarId> free_set;
  for (const auto& p : polys) {
    check_elements(p, ring);
    for (VarId v : p.support()) {
      if (!fixed.contains(v)) free_set.insert(v);
    }
  }
  const std::vector<VarId> free_vars(free_set.begin(), free_set.end());
  auto slot_of = [&](VarId v) {
    return static_cast<std::size_t>(
        std::lower_bound(free_vars.begin(), free_vars.end(), v) -
        free_vars.begin());
  };

  // Each polynomial is checked at the slot of its last free variable.
  std::vector<std::vector<CompiledPoly>> due(free_vars.size());
  std::vector<CompiledPoly> ground;
  for (const auto& p : polys) {
    CompiledPoly cp;
    std::optional<std::size_t> last_slot;
    for (const auto& t : p.terms()) {
      CompiledPoly::Term ct{t.coeff, {}};
      for (VarId v : t.vars) {
        if (auto x = fixed.get(v)) {
          ct.factors.push_back({false, 0, *x});
        } else {
          const std::size_t s = slot_of(v);
          ct.factors.push_back({true, s, 0});
          last_slot = std::max(last_slot.value_or(0), s);
        }
      }
      cp.terms.push_back(std::move(ct));
    }
    if (last_slot) {
      due[*last_slot].push_back(std::move(cp));
    } else {
      ground.push_back(std::move(cp));
    }
  }

  std::vector<Element> values(free_vars.size(), 0);
  for (const auto& cp : ground) {
    if (cp.eval(values, ring) != ring.zero()) return std::nullopt;
  }
  auto finish = [&]() {
    PartialAssignment out = fixed;
    for (std::size_t i = 0; i < free_vars.size(); ++i) {
      out.set(free_vars[i], values[i]);
    }
    return out;
  };
  if (free_vars.empty()) return finish();

  const auto n = static_cast<Element>(ring.size());
  const std::size_t last = free_vars.size() - 1;
  std::size_t nodes = 0;
  std::size_t pos = 0;
  values[0] = 0;
  // Depth-first in (variable id, element id) order: the first complete
  // assignment reached is the lexicographically least root.
  while (true) {
    if (++nodes > options.budget) throw SearchBudgetExceeded(options.budget);
    bool consistent = true;
    for (const auto& cp : due[pos]) {
      if (cp.eval(values, ring) != ring.zero()) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      if (pos == last) return finish();
      ++pos;
      values[pos] = 0;
      continue;
    }
    while (values[pos] + 1 >= n) {
      if (pos == 0) return std::nullopt;
      --pos;
    }
    ++values[pos];
  }
}

std::optional<PartialAssignment> solve_prefix_canonical(
    const RingConstraintStream& stream, std::size_t L, const FiniteRing& ring,
    const RingSearchOptions& options) {
  const auto polys = stream.prefix(L);
  return finite_sat(polys, ring, PartialAssignment{}, options);
}

namespace {

// True when every constraint touching v's constraint component has index
// below L, so the component's canonical values are final.
bool component_closed(const RingConstraintStream& stream, VarId v,
                      std::size_t L) {
  if (!stream.touching) return false;
  constexpr std::size_t kMaxComponent = 100'000;
  std::set<VarId> seen{v};
  std::set<std::size_t> seen_constraints;
  std::deque<VarId> queue{v};
  while (!queue.empty()) {
    const VarId u = queue.front();
    queue.pop_front();
    auto hits = stream.touching(u);
    if (!hits) return false;
    for (std::size_t k : *hits) {
      if (k >= L) return false;
      if (!seen_constraints.insert(k).second) continue;
      const RingPolynomial constraint = stream.at(k);
      for (VarId w : constraint.support()) {
        if (seen.insert(w).second) {
          if (seen.size() > kMaxComponent) return false;
          queue.push_back(w);
        }
      }
    }
  }
  return true;
}

}  // namespace

StabilizationReport<Element> compactness_solve_ring(
    const RingConstraintStream& stream, const FiniteRing& ring,
    std::span<const std::size_t> schedule, std::size_t window,
    std::span<const VarId> vars, const RingSearchOptions& options) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) {
      throw std::invalid_argument("schedule must be strictly increasing");
    }
  }
  if (!schedule.empty() && stream.length && schedule.back() > *stream.length) {
    throw std::invalid_argument("schedule exceeds the stream length");
  }

  StabilizationReport<Element> report;
  std::vector<PartialAssignment> solutions;
  std::size_t last_ok = 0;
  for (std::size_t L : schedule) {
    auto sol = solve_prefix_canonical(stream, L, ring, options);
    if (!sol) {
      // Unsatisfiability is inherited by longer prefixes, so the shortest
      // failing prefix lies in (last_ok, L].
      std::size_t lo = last_ok;
      std::size_t hi = L;
      while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (solve_prefix_canonical(stream, mid, ring, options)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      throw PrefixUnsatisfiable(hi, L);
    }
    report.levels.push_back(L);
    solutions.push_back(std::move(*sol));
    last_ok = L;
  }

  if (!solutions.empty()) {
    const auto& final_sol = solutions.back();
    report.final_assignment = final_sol.values();
    const std::size_t L_last = report.levels.back();
    std::size_t verified = 0;
    for (; verified < L_last; ++verified) {
      const auto poly = stream.at(verified);
      bool ok = true;
      for (VarId v : poly.support()) ok = ok && final_sol.contains(v);
      if (!ok || eval_poly(poly, final_sol, ring) != ring.zero()) break;
    }
    report.verified_prefix = verified;
  }

  for (VarId v : vars) {
    CoordinateReport<Element> c;
    c.var = v;
    for (const auto& s : solutions) c.history.push_back(s.get(v));
    const std::size_t steps = c.history.size();
    const std::size_t w = std::min(window, steps);
    bool any = false;
    bool all = w == window;
    for (std::size_t i = steps - w; i < steps; ++i) {
      any = any || c.history[i].has_value();
      all = all && c.history[i].has_value() &&
            c.history[i] == c.history[steps - 1];
    }
    if (steps > 0) c.value = c.history.back();
    if (!any) {
      c.status = Stability::Unassigned;
    } else if (all) {
      c.status = Stability::Stabilized;
    } else {
      c.status = Stability::Unstable;
    }
    if (c.value && !report.levels.empty() &&
        component_closed(stream, v, report.levels.back())) {
      c.status = Stability::Stabilized;
      c.strength = CertificateStrength::Strong;
    }
    report.coordinates.push_back(std::move(c));
  }
  return report;
}

}  // namespace compactness

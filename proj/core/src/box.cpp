#include "compactness/box.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <stdexcept>

namespace compactness {

FiniteSupportFunction::FiniteSupportFunction(std::vector<VarId> support,
                                             Evaluator evaluate,
                                             Modulus modulus)
    : support_(std::move(support)),
      evaluate_(std::move(evaluate)),
      modulus_(std::move(modulus)) {
  if (!evaluate_) throw std::invalid_argument("function needs an evaluator");
}

FiniteSupportFunction FiniteSupportFunction::polynomial(
    std::vector<RealTerm> terms) {
  std::set<VarId> vars;
  for (const auto& t : terms) {
    if (!std::isfinite(t.coeff)) {
      throw std::invalid_argument("polynomial coefficient is not finite");
    }
    vars.insert(t.vars.begin(), t.vars.end());
  }
  std::vector<VarId> support(vars.begin(), vars.end());

  struct Compiled {
    double coeff;
    std::vector<std::pair<std::size_t, int>> powers;  // (slot, exponent)
  };
  auto compiled = std::make_shared<std::vector<Compiled>>();
  for (const auto& t : terms) {
    std::map<std::size_t, int> powers;
    for (VarId v : t.vars) {
      const auto slot = static_cast<std::size_t>(
          std::lower_bound(support.begin(), support.end(), v) - support.begin());
      ++powers[slot];
    }
    compiled->push_back({t.coeff, {powers.begin(), powers.end()}});
  }

  auto evaluate = [compiled](std::span<const double> x) {
    double total = 0.0;
    for (const auto& t : *compiled) {
      double v = t.coeff;
      for (auto [slot, e] : t.powers) v *= std::pow(x[slot], e);
      total += v;
    }
    return total;
  };
  // sum_i sup |df/dx_i| over the sub-box bounds the l-infinity Lipschitz
  // constant; each partial derivative is bounded term by term.
  auto modulus = [compiled](std::span<const double> lo,
                            std::span<const double> hi) {
    const std::size_t d = lo.size();
    std::vector<double> reach(d);
    for (std::size_t i = 0; i < d; ++i) {
      reach[i] = std::max(std::abs(lo[i]), std::abs(hi[i]));
    }
    double total = 0.0;
    for (const auto& t : *compiled) {
      for (auto [slot, e] : t.powers) {
        double v = std::abs(t.coeff) * e * std::pow(reach[slot], e - 1);
        for (auto [other, f] : t.powers) {
          if (other != slot) v *= std::pow(reach[other], f);
        }
        total += v;
      }
    }
    return total;
  };
  return FiniteSupportFunction(std::move(support), evaluate, modulus);
}

VariableBox VariableBox::uniform(double M) {
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw std::invalid_argument("box bound must be finite and > 0");
  }
  VariableBox b;
  b.rest_ = M;
  return b;
}

VariableBox VariableBox::per_var(std::map<VarId, double> bounds,
                                 std::optional<double> rest) {
  for (const auto& [v, M] : bounds) {
    if (!(M > 0.0) || !std::isfinite(M)) {
      throw std::invalid_argument("box bound must be finite and > 0");
    }
  }
  if (rest && (!(*rest > 0.0) || !std::isfinite(*rest))) {
    throw std::invalid_argument("box bound must be finite and > 0");
  }
  VariableBox b;
  b.bounds_ = std::move(bounds);
  b.rest_ = rest;
  return b;
}

double VariableBox::bound(VarId v) const {
  if (auto it = bounds_.find(v); it != bounds_.end()) return it->second;
  if (rest_) return *rest_;
  throw std::invalid_argument("variable has no box bound");
}

std::vector<FiniteSupportFunction> FunctionStream::prefix(std::size_t L) const {
  if (length && L > *length) {
    throw std::invalid_argument("prefix longer than the function stream");
  }
  std::vector<FiniteSupportFunction> out;
  out.reserve(L);
  for (std::size_t k = 0; k < L; ++k) out.push_back(at(k));
  return out;
}

FunctionStream FunctionStream::from_list(std::vector<FiniteSupportFunction> fs) {
  auto shared =
      std::make_shared<const std::vector<FiniteSupportFunction>>(std::move(fs));
  FunctionStream s;
  s.length = shared->size();
  s.at = [shared](std::size_t k) { return (*shared)[k]; };
  return s;
}

namespace {

// The functions of one search, with supports mapped to slots in the sorted
// union of variables.
class Problem {
public:
  Problem(std::span<const FiniteSupportFunction> fs, const VariableBox& box)
      : fs_(fs) {
    std::set<VarId> all;
    for (const auto& f : fs) all.insert(f.support().begin(), f.support().end());
    vars_.assign(all.begin(), all.end());
    slots_.resize(fs.size());
    touching_.resize(vars_.size());
    for (std::size_t k = 0; k < fs.size(); ++k) {
      for (VarId v : fs[k].support()) {
        const auto s = slot(v);
        slots_[k].push_back(s);
        touching_[s].push_back(k);
      }
    }
    for (auto& t : touching_) {
      t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    bound_.reserve(vars_.size());
    for (VarId v : vars_) bound_.push_back(box.bound(v));
  }

  const std::vector<VarId>& vars() const { return vars_; }
  std::size_t dim() const { return vars_.size(); }
  double bound(std::size_t i) const { return bound_[i]; }
  std::size_t size() const { return fs_.size(); }
  const std::vector<std::size_t>& slots(std::size_t k) const { return slots_[k]; }
  const std::vector<std::size_t>& touching(std::size_t i) const {
    return touching_[i];
  }
  const FiniteSupportFunction& function(std::size_t k) const { return fs_[k]; }

  double value(std::size_t k, std::span<const double> x) const {
    args_.clear();
    for (std::size_t s : slots_[k]) args_.push_back(x[s]);
    const double v = fs_[k](args_);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }

  double max_abs(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < fs_.size(); ++k) {
      worst = std::max(worst, std::abs(value(k, x)));
    }
    return worst;
  }

  double local_squares(std::size_t i, std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k : touching_[i]) {
      const double v = value(k, x);
      s += v * v;
    }
    return s;
  }

  double squares(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < fs_.size(); ++k) {
      const double v = value(k, x);
      s += v * v;
    }
    return s;
  }

private:
  std::size_t slot(VarId v) const {
    return static_cast<std::size_t>(
        std::lower_bound(vars_.begin(), vars_.end(), v) - vars_.begin());
  }

  std::span<const FiniteSupportFunction> fs_;
  std::vector<VarId> vars_;
  std::vector<double> bound_;
  std::vector<std::vector<std::size_t>> slots_;
  std::vector<std::vector<std::size_t>> touching_;
  mutable std::vector<double> args_;
};

struct BudgetExhausted {};

class Counter {
public:
  explicit Counter(std::size_t budget) : budget_(budget) {}
  void tick() {
    if (++used_ > budget_) throw BudgetExhausted{};
  }
  std::size_t used() const { return std::min(used_, budget_); }
  std::size_t remaining() const {
    return used_ >= budget_ ? 0 : budget_ - used_;
  }

private:
  std::size_t budget_;
  std::size_t used_ = 0;
};

// (points_per_dim)^dim, saturating at `cap` + 1.
std::size_t grid_size(std::size_t points, std::size_t dim, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (total > cap / points) return cap + 1;
    total *= points;
  }
  return total;
}

// Minimizes g over [a, b] by repeated 9-point sampling, shrinking the
// bracket around the best sample. `t0` is the incumbent; the result is never
// worse than g(t0).
template <typename Objective>
double line_minimize(Objective&& g, double t0, double a, double b,
                     Counter& counter) {
  constexpr int kSamples = 9;
  double best_t = t0;
  counter.tick();
  double best_g = g(t0);
  for (int iter = 0; iter < 64 && b - a > 1e-15 * std::max(1.0, std::abs(a));
       ++iter) {
    const double step = (b - a) / (kSamples - 1);
    int best_j = 0;
    double round_best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kSamples; ++j) {
      const double t = a + step * j;
      counter.tick();
      const double v = g(t);
      if (v < round_best) {
        round_best = v;
        best_j = j;
      }
      if (v < best_g) {
        best_g = v;
        best_t = t;
      }
    }
    if (best_g == 0.0) break;
    const double center = a + step * best_j;
    a = std::max(a, center - step);
    b = std::min(b, center + step);
  }
  return best_t;
}

// Coordinate i of x minimizing the squares of the functions in `fs`.
void refine_coordinate(const Problem& prob, std::vector<double>& x,
                       std::size_t i, const std::vector<std::size_t>& fs,
                       double a, double b, Counter& counter) {
  const double original = x[i];
  auto g = [&](double t) {
    x[i] = t;
    double s = 0.0;
    for (std::size_t k : fs) {
      const double v = prob.value(k, x);
      s += v * v;
    }
    return s;
  };
  try {
    x[i] = line_minimize(g, original, a, b, counter);
  } catch (...) {
    x[i] = original;
    throw;
  }
}

// Extrapolates along the displacement of the last sweep; this is what keeps
// long chains of coupled variables from converging one sweep at a time.
void pattern_move(const Problem& prob, std::vector<double>& x,
                  const std::vector<double>& previous, Counter& counter) {
  const std::size_t d = x.size();
  std::vector<double> dir(d);
  bool moved = false;
  for (std::size_t i = 0; i < d; ++i) {
    dir[i] = x[i] - previous[i];
    moved = moved || dir[i] != 0.0;
  }
  if (!moved) return;
  const std::vector<double> base = x;
  std::vector<double> trial(d);
  auto g = [&](double t) {
    for (std::size_t i = 0; i < d; ++i) {
      trial[i] = std::clamp(base[i] + t * dir[i], -prob.bound(i), prob.bound(i));
    }
    return prob.squares(trial);
  };
  // Expand until the objective stops improving, then refine the bracket.
  double reach = 1.0;
  counter.tick();
  double at_reach = g(reach);
  while (reach < 1e6) {
    counter.tick();
    const double further = g(2.0 * reach);
    if (!(further < at_reach)) break;
    reach *= 2.0;
    at_reach = further;
  }
  const double t = line_minimize(g, 0.0, 0.0, 2.0 * reach, counter);
  g(t);
  x = trial;
}

}  // namespace

RootSearchResult root_search(std::span<const FiniteSupportFunction> fs,
                             const VariableBox& box,
                             const RootSearchOptions& options,
                             const std::map<VarId, double>* start) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const Problem prob(fs, box);
  const std::size_t d = prob.dim();
  RootSearchResult result;
  result.vars = prob.vars();
  Counter counter(options.budget);

  std::vector<double> x(d, 0.0);
  std::vector<double> width(d);
  std::vector<bool> fresh(d, true);
  for (std::size_t i = 0; i < d; ++i) width[i] = prob.bound(i);

  double best = std::numeric_limits<double>::infinity();
  auto finish = [&](RootFailure failure) {
    result.best_point = x;
    result.best_value = best;
    result.evaluations = counter.used();
    if (best <= options.tol) {
      result.point = x;
      result.failure = RootFailure::None;
    } else {
      result.failure = failure;
    }
    return result;
  };

  try {
    if (start) {
      for (std::size_t i = 0; i < d; ++i) {
        if (auto it = start->find(prob.vars()[i]); it != start->end()) {
          x[i] = std::clamp(it->second, -prob.bound(i), prob.bound(i));
          fresh[i] = false;
        }
      }
      counter.tick();
      best = prob.max_abs(x);
      result.progress.push_back(best);
      // New variables, in order, get a full-range line search against the
      // functions whose other variables are already known.
      for (std::size_t i = 0; i < d && best > options.tol; ++i) {
        if (!fresh[i]) continue;
        std::vector<std::size_t> known;
        for (std::size_t k : prob.touching(i)) {
          bool ready = true;
          for (std::size_t s : prob.slots(k)) ready = ready && (s == i || !fresh[s]);
          if (ready) known.push_back(k);
        }
        if (!known.empty()) {
          refine_coordinate(prob, x, i, known, -prob.bound(i), prob.bound(i),
                            counter);
        }
        fresh[i] = false;
      }
      counter.tick();
      best = prob.max_abs(x);
      result.progress.push_back(best);
    } else {
      // Grid rounds: 2^r + 1 points per coordinate, lexicographic order,
      // strict improvement only, so ties keep the first point seen.
      counter.tick();
      best = prob.max_abs(x);
      result.progress.push_back(best);
      const std::size_t grid_budget = options.budget / 2;
      std::vector<double> point(d);
      std::vector<std::size_t> idx(d);
      for (std::size_t r = 1; best > options.tol && d > 0 && r < 40; ++r) {
        const std::size_t points = (std::size_t{1} << r) + 1;
        if (grid_size(points, d, grid_budget) > counter.remaining() ||
            grid_size(points, d, grid_budget) > grid_budget) {
          break;
        }
        std::fill(idx.begin(), idx.end(), 0);
        std::vector<double> round_best_point;
        double round_best = std::numeric_limits<double>::infinity();
        while (true) {
          for (std::size_t i = 0; i < d; ++i) {
            const double M = prob.bound(i);
            point[i] = -M + 2.0 * M * static_cast<double>(idx[i]) /
                                static_cast<double>(points - 1);
          }
          counter.tick();
          const double v = prob.max_abs(point);
          if (v < round_best) {
            round_best = v;
            round_best_point = point;
          }
          std::size_t pos = d;
          while (pos > 0 && ++idx[pos - 1] == points) idx[--pos] = 0;
          if (pos == 0) break;
        }
        for (std::size_t i = 0; i < d; ++i) {
          width[i] = 2.0 * prob.bound(i) / static_cast<double>(points - 1);
        }
        if (round_best < best) {
          best = round_best;
          x = round_best_point;
        }
        result.progress.push_back(best);
      }
    }

    // Coordinate sweeps on the sum of squares; the reported quality is
    // always max_f |f|.
    double squares = prob.squares(x);
    std::vector<double> before;
    while (best > options.tol && d > 0) {
      before = x;
      for (std::size_t i = 0; i < d; ++i) {
        const double M = prob.bound(i);
        refine_coordinate(prob, x, i, prob.touching(i),
                          std::max(-M, x[i] - width[i]),
                          std::min(M, x[i] + width[i]), counter);
      }
      if (d > 1) pattern_move(prob, x, before, counter);
      counter.tick();
      const double now = prob.squares(x);
      best = prob.max_abs(x);
      result.progress.push_back(best);
      if (best <= options.tol) break;
      if (!(now < squares * (1.0 - 1e-9))) return finish(RootFailure::Stagnated);
      squares = now;
    }
    if (d == 0 && best > options.tol) return finish(RootFailure::Stagnated);
  } catch (const BudgetExhausted&) {
    best = std::min(best, prob.max_abs(x));
    return finish(RootFailure::BudgetExhausted);
  }
  return finish(RootFailure::None);
}

std::optional<std::vector<double>> finite_root_search(
    std::span<const FiniteSupportFunction> fs, const VariableBox& box,
    double tol, std::size_t budget) {
  return root_search(fs, box, RootSearchOptions{tol, budget}).point;
}

namespace {

// Adaptive Lipschitz covering of the box spanned by `slots` using the
// functions in `members`. True iff every cell is excluded.
bool cover(const Problem& prob, const std::vector<std::size_t>& members,
           double tol, std::size_t& budget) {
  std::set<std::size_t> used;
  for (std::size_t k : members) {
    used.insert(prob.slots(k).begin(), prob.slots(k).end());
  }
  const std::vector<std::size_t> dims(used.begin(), used.end());
  struct Cell {
    std::vector<double> lo, hi;  // over all slots of the problem
  };
  Cell root{std::vector<double>(prob.dim(), 0.0),
            std::vector<double>(prob.dim(), 0.0)};
  for (std::size_t s : dims) {
    root.lo[s] = -prob.bound(s);
    root.hi[s] = prob.bound(s);
  }
  std::vector<Cell> stack{root};
  std::vector<double> center(prob.dim());
  std::vector<double> lo_sub, hi_sub;
  while (!stack.empty()) {
    if (budget == 0) return false;
    --budget;
    Cell cell = std::move(stack.back());
    stack.pop_back();
    for (std::size_t s : dims) center[s] = 0.5 * (cell.lo[s] + cell.hi[s]);
    bool excluded = false;
    for (std::size_t k : members) {
      const auto& slots = prob.slots(k);
      lo_sub.clear();
      hi_sub.clear();
      double half = 0.0;
      for (std::size_t s : slots) {
        lo_sub.push_back(cell.lo[s]);
        hi_sub.push_back(cell.hi[s]);
        half = std::max(half, 0.5 * (cell.hi[s] - cell.lo[s]));
      }
      const double L = prob.function(k).modulus(lo_sub, hi_sub);
      if (std::abs(prob.value(k, center)) - L * half > tol) {
        excluded = true;
        break;
      }
    }
    if (excluded) continue;
    std::size_t widest = dims.empty() ? 0 : dims.front();
    for (std::size_t s : dims) {
      if (cell.hi[s] - cell.lo[s] > cell.hi[widest] - cell.lo[widest]) widest = s;
    }
    if (dims.empty() || cell.hi[widest] - cell.lo[widest] < 1e-9) return false;
    Cell upper = cell;
    const double mid = 0.5 * (cell.lo[widest] + cell.hi[widest]);
    cell.hi[widest] = mid;
    upper.lo[widest] = mid;
    stack.push_back(std::move(upper));
    stack.push_back(std::move(cell));
  }
  return true;
}

}  // namespace

bool certify_no_root(std::span<const FiniteSupportFunction> fs,
                     const VariableBox& box, double tol, std::size_t budget) {
  const Problem prob(fs, box);
  std::vector<std::size_t> with_modulus;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    if (fs[k].has_modulus()) with_modulus.push_back(k);
  }
  // A single function without roots refutes the whole prefix; try those
  // cheap coverings first.
  for (std::size_t k : with_modulus) {
    if (cover(prob, {k}, tol, budget)) return true;
  }
  return with_modulus.size() > 1 && cover(prob, with_modulus, tol, budget);
}

StabilizationReport<double> box_compactness_extract(
    const FunctionStream& stream, const VariableBox& box,
    std::span<const std::size_t> schedule, const BoxExtractOptions& options) {
  if (options.window < 2) throw std::invalid_argument("window must be >= 2");
  if (!(options.tol > 0.0) || !(options.coord_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) {
      throw std::invalid_argument("schedule must be strictly increasing");
    }
  }

  StabilizationReport<double> report;
  std::vector<std::map<VarId, double>> solutions;
  const RootSearchOptions search{options.tol, options.budget};
  for (std::size_t L : schedule) {
    const auto fs = stream.prefix(L);
    const std::map<VarId, double>* warm =
        solutions.empty() ? nullptr : &solutions.back();
    RootSearchResult res = root_search(fs, box, search, warm);
    if (!res.point && warm) res = root_search(fs, box, search, nullptr);
    if (!res.point) {
      const RootFailure cause =
          certify_no_root(fs, box, options.tol, options.budget)
              ? RootFailure::CertifiedInfeasible
              : res.failure;
      throw PrefixRootNotFound(L, res.best_value, cause);
    }
    std::map<VarId, double> sol;
    for (std::size_t i = 0; i < res.vars.size(); ++i) {
      sol[res.vars[i]] = (*res.point)[i];
    }
    report.levels.push_back(L);
    solutions.push_back(std::move(sol));
  }
  if (solutions.empty()) return report;

  report.final_assignment = solutions.back();
  const std::size_t L_last = report.levels.back();
  std::vector<double> args;
  std::size_t verified = 0;
  for (; verified < L_last; ++verified) {
    const auto f = stream.at(verified);
    args.clear();
    bool ok = true;
    for (VarId v : f.support()) {
      auto it = report.final_assignment.find(v);
      if (it == report.final_assignment.end()) {
        ok = false;
        break;
      }
      args.push_back(it->second);
    }
    if (!ok || !(std::abs(f(args)) <= options.tol)) break;
  }
  report.verified_prefix = verified;

  for (const auto& [v, value] : report.final_assignment) {
    CoordinateReport<double> c;
    c.var = v;
    c.value = value;
    for (const auto& s : solutions) {
      auto it = s.find(v);
      c.history.push_back(it == s.end() ? std::nullopt
                                        : std::optional<double>(it->second));
    }
    c.status = Stability::Unstable;
    const std::size_t steps = c.history.size();
    if (steps >= options.window) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      bool present = true;
      for (std::size_t i = steps - options.window; i < steps; ++i) {
        if (!c.history[i]) {
          present = false;
          break;
        }
        lo = std::min(lo, *c.history[i]);
        hi = std::max(hi, *c.history[i]);
      }
      if (present && hi - lo <= options.coord_tol) {
        c.status = Stability::Stabilized;
      }
    }
    report.coordinates.push_back(std::move(c));
  }
  return report;
}

}  // namespace compactness

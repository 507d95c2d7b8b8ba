#include "compactness/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "compactness/errors.hpp"
#include "compensated_sum.hpp"

namespace compactness {

ConjugatePair::ConjugatePair(double p, double q) : p_(p), q_(q) {
  if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw std::invalid_argument("conjugate exponents must satisfy p, q > 1");
  }
  if (std::abs(1.0 / p + 1.0 / q - 1.0) > kConjugacyTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "exponents " << p << " and " << q << " are not conjugate";
    throw std::invalid_argument(os.str());
  }
}

ConjugatePair ConjugatePair::from_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("exponent p must be finite and > 1");
  }
  return ConjugatePair(p, p / (p - 1.0));
}

struct PSummableSequence::Rep {
  Kind kind = Kind::Finite;
  std::string name;
  // Finite: the coefficients. Geometric: the head.
  std::vector<double> coeffs;
  // tail_mass[N] = sum_{n > N} |c_n|^p for N < coeffs.size(); for geometric
  // sequences this includes the geometric tail.
  std::vector<double> tail_mass;
  double ratio = 0.0;
  // Geometric tail |h|^p / (1 - |r|^p) scaling, see tail_envelope.
  double geo_scale = 0.0;
  CoefficientFn fn;
  EnvelopeFn env;
};

namespace {

void require_exponent(double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("sequence exponent must be finite and > 1");
  }
}

// Analytic envelopes are rounded upward by a few ulps so that they stay
// upper bounds of the exactly summed tails.
double inflate(double v) { return v * (1.0 + 1e-14); }

std::vector<std::size_t> envelope_samples(std::size_t max_depth) {
  std::vector<std::size_t> out;
  std::size_t n = 0;
  while (n < max_depth) {
    out.push_back(n);
    n = std::max<std::size_t>(n + 1, n + n / 2);
  }
  out.push_back(max_depth);
  return out;
}

void validate_envelope(const std::string& name, double exponent,
                       const PSummableSequence::CoefficientFn& coeff,
                       const PSummableSequence::EnvelopeFn& env,
                       const EnvelopeCheck& check) {
  auto fail = [&](const std::string& why) {
    throw NotPSummable(name, exponent, why);
  };
  const auto samples = envelope_samples(check.max_depth);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t N : samples) {
    const double e = env(N);
    if (!std::isfinite(e) || e < 0.0) {
      std::ostringstream os;
      os << "tail envelope is not a finite bound at N=" << N;
      fail(os.str());
    }
    if (e > previous * (1.0 + 1e-12) + 1e-300) {
      std::ostringstream os;
      os << "tail envelope increases at N=" << N;
      fail(os.str());
    }
    previous = e;
  }
  for (std::size_t N : samples) {
    if (N > 4096) break;
    const double e = env(N);
    detail::CompensatedSum mass;
    std::size_t next_check = 1;
    for (std::size_t k = 1; k <= check.sum_span; ++k) {
      mass.add(std::pow(std::abs(coeff(N + k)), exponent));
      if (k == next_check || k == check.sum_span) {
        next_check *= 2;
        if (std::pow(mass.value(), 1.0 / exponent) > e + 1e-12) {
          std::ostringstream os;
          os << "partial tail sum after N=" << N << " over " << k
             << " terms exceeds the envelope";
          fail(os.str());
        }
      }
    }
  }
  const double head = env(0);
  if (head > 0.0 && !(env(check.max_depth) <= 0.5 * head)) {
    fail("tail envelope does not decay within the sampling depth");
  }
}

}  // namespace

PSummableSequence::PSummableSequence(double exponent,
                                     std::shared_ptr<const Rep> rep,
                                     std::optional<std::size_t> cut)
    : exponent_(exponent), rep_(std::move(rep)), cut_(cut) {}

PSummableSequence PSummableSequence::finite(double exponent,
                                            std::vector<double> coeffs) {
  require_exponent(exponent);
  for (double v : coeffs) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("finite sequence has a non-finite entry");
    }
  }
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Finite;
  rep->name = "finite";
  rep->tail_mass.assign(coeffs.size(), 0.0);
  detail::CompensatedSum mass;
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    rep->tail_mass[i] = mass.value();
    mass.add(std::pow(std::abs(coeffs[i]), exponent));
  }
  rep->coeffs = std::move(coeffs);
  return PSummableSequence(exponent, std::move(rep), std::nullopt);
}

PSummableSequence PSummableSequence::geometric(double exponent,
                                               std::vector<double> head,
                                               double ratio) {
  require_exponent(exponent);
  if (head.empty()) {
    throw std::invalid_argument("geometric sequence needs a non-empty head");
  }
  if (!(std::abs(ratio) < 1.0)) {
    throw NotPSummable("geometric", exponent, "ratio must satisfy |r| < 1");
  }
  for (double v : head) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("geometric head has a non-finite entry");
    }
  }
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Geometric;
  rep->name = "geometric";
  rep->ratio = ratio;
  const double last = std::abs(head.back());
  const double rp = std::pow(std::abs(ratio), exponent);
  rep->geo_scale = std::pow(last, exponent) / (1.0 - rp);
  // Mass strictly after the head: sum_{n >= m} |h|^p |r|^{p(n-m+1)}.
  const double after_head = rep->geo_scale * rp;
  rep->tail_mass.assign(head.size(), 0.0);
  detail::CompensatedSum mass;
  mass.add(after_head);
  for (std::size_t i = head.size(); i-- > 0;) {
    rep->tail_mass[i] = mass.value();
    mass.add(std::pow(std::abs(head[i]), exponent));
  }
  rep->coeffs = std::move(head);
  return PSummableSequence(exponent, std::move(rep), std::nullopt);
}

PSummableSequence PSummableSequence::formula(double exponent, std::string name,
                                             CoefficientFn coeff,
                                             EnvelopeFn envelope,
                                             const EnvelopeCheck& check) {
  require_exponent(exponent);
  if (!coeff || !envelope) {
    throw NotPSummable(name, exponent, "missing coefficient or envelope");
  }
  validate_envelope(name, exponent, coeff, envelope, check);
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Formula;
  rep->name = std::move(name);
  rep->fn = std::move(coeff);
  rep->env = std::move(envelope);
  return PSummableSequence(exponent, std::move(rep), std::nullopt);
}

PSummableSequence PSummableSequence::zero(double exponent) {
  return finite(exponent, {});
}

PSummableSequence::Kind PSummableSequence::kind() const noexcept {
  return rep_->kind;
}

const std::string& PSummableSequence::name() const noexcept {
  return rep_->name;
}

double PSummableSequence::ratio() const { return rep_->ratio; }

const std::vector<double>& PSummableSequence::explicit_coeffs() const {
  return rep_->coeffs;
}

double PSummableSequence::coeff(std::size_t n) const {
  if (cut_ && n <= *cut_) return 0.0;
  const Rep& r = *rep_;
  switch (r.kind) {
    case Kind::Finite:
      return n < r.coeffs.size() ? r.coeffs[n] : 0.0;
    case Kind::Geometric: {
      const std::size_t m = r.coeffs.size();
      if (n < m) return r.coeffs[n];
      return r.coeffs.back() *
             std::pow(r.ratio, static_cast<double>(n - m + 1));
    }
    case Kind::Formula:
      return r.fn(n);
  }
  return 0.0;
}

double PSummableSequence::tail_envelope(std::size_t N) const {
  if (cut_) N = std::max(N, *cut_);
  const Rep& r = *rep_;
  switch (r.kind) {
    case Kind::Finite:
      if (N >= r.tail_mass.size()) return 0.0;
      return std::pow(r.tail_mass[N], 1.0 / exponent_);
    case Kind::Geometric: {
      const std::size_t m = r.coeffs.size();
      if (N < m) return inflate(std::pow(r.tail_mass[N], 1.0 / exponent_));
      // sum_{n > N} |h|^p |r|^{p(n-m+1)} = geo_scale * |r|^{p(N-m+2)}
      const double steps = static_cast<double>(N - m + 2);
      return inflate(std::pow(r.geo_scale, 1.0 / exponent_) *
                     std::pow(std::abs(r.ratio), steps));
    }
    case Kind::Formula:
      return r.env(N);
  }
  return 0.0;
}

std::optional<std::size_t> PSummableSequence::support_length() const {
  const Rep& r = *rep_;
  std::optional<std::size_t> base;
  if (r.kind == Kind::Finite) {
    base = r.coeffs.size();
  } else if (r.kind == Kind::Geometric && r.ratio == 0.0) {
    base = r.coeffs.size();
  }
  if (!base) return std::nullopt;
  if (cut_ && *cut_ + 1 >= *base) return std::size_t{0};
  return base;
}

PSummableSequence PSummableSequence::truncate_tail(std::size_t N) const {
  const std::size_t cut = cut_ ? std::max(*cut_, N) : N;
  return PSummableSequence(exponent_, rep_, cut);
}

namespace {

template <typename Pred>
std::optional<std::size_t> least_satisfying(Pred pred, std::size_t max_depth) {
  if (pred(0)) return std::size_t{0};
  if (!pred(max_depth)) return std::nullopt;
  std::size_t lo = 0;  // pred(lo) is false
  std::size_t hi = 1;
  while (hi < max_depth && !pred(hi)) {
    lo = hi;
    hi = std::min(max_depth, hi * 2);
  }
  if (hi >= max_depth) hi = max_depth;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

void require_positive(double tol, const char* what) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

double head_mass(const PSummableSequence& c, std::size_t N) {
  std::size_t first = c.zeroed_through() ? *c.zeroed_through() + 1 : 0;
  std::size_t last = N;
  if (auto len = c.support_length()) {
    if (*len == 0) return 0.0;
    last = std::min(last, *len - 1);
  }
  detail::CompensatedSum mass;
  for (std::size_t n = first; n <= last; ++n) {
    mass.add(std::pow(std::abs(c.coeff(n)), c.exponent()));
  }
  return mass.value();
}

}  // namespace

std::size_t least_depth_below(const PSummableSequence& c, double threshold,
                              bool strict, std::size_t max_depth) {
  auto found = least_satisfying(
      [&](std::size_t N) {
        const double e = c.tail_envelope(N);
        return strict ? e < threshold : e <= threshold;
      },
      max_depth);
  if (!found) throw EnvelopeStall(threshold, max_depth);
  return *found;
}

double p_norm(const PSummableSequence& c, double tol, std::size_t max_depth) {
  require_positive(tol, "p_norm tolerance");
  const std::size_t N = least_depth_below(c, tol, false, max_depth);
  return std::pow(head_mass(c, N), 1.0 / c.exponent());
}

std::pair<double, double> head_coefficient_bound(const PSummableSequence& c,
                                                 std::size_t N, double tol,
                                                 std::size_t max_depth) {
  require_positive(tol, "tolerance");
  return {std::abs(c.coeff(N)), p_norm(c, tol, max_depth)};
}

std::size_t tail_norm_limit_check(const PSummableSequence& c, double eps,
                                  std::size_t max_depth) {
  require_positive(eps, "eps");
  return least_depth_below(c, eps, true, max_depth);
}

double certified_dot(const PSummableSequence& a, const PSummableSequence& x,
                     const ConjugatePair& pair, double tol,
                     std::size_t max_depth) {
  require_positive(tol, "tolerance");
  if (std::abs(a.exponent() - pair.p()) > kConjugacyTolerance ||
      std::abs(x.exponent() - pair.q()) > kConjugacyTolerance) {
    throw std::invalid_argument(
        "certified_dot needs a in l^p and x in l^q for the given pair");
  }
  // Minkowski: ||c|| <= |c_0| + ||c^0||.
  const double a_bound = std::abs(a.coeff(0)) + a.tail_envelope(0);
  const double x_bound = std::abs(x.coeff(0)) + x.tail_envelope(0);
  // |a.x - sum_{n<=N} a_n x_n| = |a^N . x| = |a . x^N|, bounded by Hölder.
  auto found = least_satisfying(
      [&](std::size_t N) {
        return std::min(a.tail_envelope(N) * x_bound,
                        x.tail_envelope(N) * a_bound) <= tol;
      },
      max_depth);
  if (!found) throw EnvelopeStall(tol, max_depth);
  std::size_t last = *found;
  for (const auto& s : {a, x}) {
    if (auto len = s.support_length()) {
      last = std::min(last, *len == 0 ? 0 : *len - 1);
    }
  }
  detail::CompensatedSum dot;
  for (std::size_t n = 0; n <= last; ++n) dot.add(a.coeff(n) * x.coeff(n));
  return dot.value();
}

double finite_p_norm(const std::vector<double>& v, double p) {
  detail::CompensatedSum mass;
  for (double x : v) mass.add(std::pow(std::abs(x), p));
  return std::pow(mass.value(), 1.0 / p);
}

namespace {

double param(const FormulaParams& params, const std::string& key,
             std::optional<double> fallback = std::nullopt) {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (fallback) return *fallback;
  throw std::invalid_argument("formula parameter '" + key + "' is required");
}

}  // namespace

PSummableSequence make_formula(const std::string& name,
                               const FormulaParams& params, double exponent,
                               const EnvelopeCheck& check) {
  require_exponent(exponent);
  const double p = exponent;
  if (name == "power" || name == "alternating_power") {
    const double scale = param(params, "scale", 1.0);
    const double decay = param(params, "decay");
    const bool alternating = name == "alternating_power";
    const double sp = decay * p;
    if (!(sp > 1.0)) {
      throw NotPSummable(name, p, "sum of (n+1)^(-decay*p) diverges");
    }
    auto coeff = [scale, decay, alternating](std::size_t n) {
      const double v = scale * std::pow(static_cast<double>(n + 1), -decay);
      return alternating && (n % 2 == 1) ? -v : v;
    };
    // sum_{n>N} (n+1)^{-sp} <= integral_{N+1}^inf t^{-sp} dt
    auto envelope = [scale, sp, p](std::size_t N) {
      const double mass =
          std::pow(static_cast<double>(N + 1), 1.0 - sp) / (sp - 1.0);
      return inflate(std::abs(scale) * std::pow(mass, 1.0 / p));
    };
    return PSummableSequence::formula(p, name, coeff, envelope, check);
  }
  if (name == "exponential") {
    const double scale = param(params, "scale", 1.0);
    const double rate = param(params, "rate");
    if (!(rate > 0.0)) {
      throw NotPSummable(name, p, "rate must be positive");
    }
    auto coeff = [scale, rate](std::size_t n) {
      return scale * std::exp(-rate * static_cast<double>(n));
    };
    const double denom = std::pow(1.0 - std::exp(-rate * p), 1.0 / p);
    auto envelope = [scale, rate, denom](std::size_t N) {
      return inflate(std::abs(scale) *
                     std::exp(-rate * static_cast<double>(N + 1)) / denom);
    };
    return PSummableSequence::formula(p, name, coeff, envelope, check);
  }
  if (name == "ones_from") {
    const double start_value = param(params, "start", 0.0);
    if (start_value < 0.0) {
      throw std::invalid_argument("ones_from start must be non-negative");
    }
    const auto start = static_cast<std::size_t>(start_value);
    auto coeff = [start](std::size_t n) { return n >= start ? 1.0 : 0.0; };
    // The tail mass is a sum of infinitely many ones.
    auto envelope = [](std::size_t) {
      return std::numeric_limits<double>::infinity();
    };
    return PSummableSequence::formula(p, name, coeff, envelope, check);
  }
  throw std::invalid_argument("unknown formula generator '" + name + "'");
}

std::vector<std::string> registered_formulas() {
  return {"alternating_power", "exponential", "ones_from", "power"};
}

}  // namespace compactness

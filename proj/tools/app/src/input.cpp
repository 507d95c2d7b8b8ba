#include "input.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "compactness/errors.hpp"

namespace compactness::app {

namespace {

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> locate(const std::string& text,
                                           std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::size_t parse_count(const std::string& token, const std::string& what) {
  std::size_t value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw InputError(what + ": '" + token + "' is not a non-negative integer");
  }
  return value;
}

double parse_real(const std::string& token, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": '" + token + "' is not a number");
  }
}

}  // namespace

Json load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    throw InputError(path + ":" + std::to_string(line) + ":" +
                     std::to_string(column) + ": invalid JSON");
  }
}

bool Field::has(const std::string& key) const {
  return value_.is_object() && value_.contains(key);
}

Field Field::at(const std::string& key) const {
  require_object();
  if (!value_.contains(key)) fail("missing field '" + key + "'");
  return Field(value_.at(key), path_ + "." + key);
}

Field Field::at(std::size_t index) const {
  require_array();
  if (index >= value_.size()) fail("index out of range");
  return Field(value_.at(index), path_ + "[" + std::to_string(index) + "]");
}

std::size_t Field::size() const {
  require_array();
  return value_.size();
}

double Field::number() const {
  if (!value_.is_number()) fail("expected a number");
  const double v = value_.get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

double Field::positive() const {
  const double v = number();
  if (!(v > 0.0)) fail("expected a positive number");
  return v;
}

std::size_t Field::natural() const {
  if (value_.is_number_unsigned()) return value_.get<std::size_t>();
  if (value_.is_number_integer() && value_.get<long long>() >= 0) {
    return static_cast<std::size_t>(value_.get<long long>());
  }
  fail("expected a non-negative integer");
}

std::string Field::string() const {
  if (!value_.is_string()) fail("expected a string");
  return value_.get<std::string>();
}

std::vector<double> Field::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
  return out;
}

void Field::require_object() const {
  if (!value_.is_object()) fail("expected an object");
}

void Field::require_array() const {
  if (!value_.is_array()) fail("expected an array");
}

void Field::fail(const std::string& message) const {
  throw InputError(path_ + ": " + message);
}

PSummableSequence parse_sequence(const Field& f, double exponent) {
  const std::string kind = f.at("kind").string();
  try {
    if (kind == "finite") {
      return PSummableSequence::finite(exponent, f.at("coeffs").numbers());
    }
    if (kind == "geometric") {
      const auto head = f.at("head").numbers();
      if (head.empty()) f.at("head").fail("head must be non-empty");
      const double r = f.at("ratio").number();
      return PSummableSequence::geometric(exponent, head, r);
    }
    if (kind == "formula") {
      FormulaParams params;
      if (f.has("params")) {
        const Field p = f.at("params");
        p.require_object();
        for (const auto& [key, value] : p.json().items()) {
          params[key] = Field(value, p.path() + "." + key).number();
        }
      }
      return make_formula(f.at("name").string(), params, exponent);
    }
  } catch (const std::invalid_argument& e) {
    f.fail(e.what());
  }
  f.at("kind").fail("unknown sequence kind '" + kind + "'");
}

corpus::FamilyDescriptor parse_family(const Field& f) {
  corpus::FamilyDescriptor d;
  if (f.json().is_string()) {
    d.name = f.string();
    return d;
  }
  d.name = f.at("family").string();
  if (f.has("params")) {
    const Field p = f.at("params");
    p.require_object();
    for (const auto& [key, value] : p.json().items()) {
      d.params[key] = Field(value, p.path() + "." + key).number();
    }
  }
  return d;
}

FiniteRing parse_ring(const Field& f) {
  if (f.has("zmod")) {
    const std::size_t n = f.at("zmod").natural();
    if (n < 1 || n > 4096) f.at("zmod").fail("modulus must lie in 1..4096");
    return FiniteRing::zmod(n);
  }
  const std::size_t n = f.at("size").natural();
  auto table = [&](const char* key) {
    const Field t = f.at(key);
    if (t.size() != n) t.fail("expected " + std::to_string(n) + " rows");
    FiniteRing::Table out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Field row = t.at(i);
      if (row.size() != n) row.fail("expected " + std::to_string(n) + " entries");
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t v = row.at(j).natural();
        if (v >= n) row.at(j).fail("element id out of range");
        out[i].push_back(static_cast<Element>(v));
      }
    }
    return out;
  };
  auto add = table("add");
  auto mul = table("mul");
  const std::size_t zero = f.at("zero").natural();
  const std::size_t one = f.at("one").natural();
  if (zero >= n) f.at("zero").fail("element id out of range");
  if (one >= n) f.at("one").fail("element id out of range");
  return FiniteRing::from_tables(std::move(add), std::move(mul),
                                 static_cast<Element>(zero),
                                 static_cast<Element>(one));
}

RingPolynomial parse_ring_polynomial(const Field& f) {
  std::vector<RingTerm> terms;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Field t = f.at(i);
    RingTerm term;
    const std::size_t c = t.at("coeff").natural();
    if (c > 0xFFFFFFFFu) t.at("coeff").fail("coefficient out of range");
    term.coeff = static_cast<Element>(c);
    const Field vars = t.at("vars");
    for (std::size_t k = 0; k < vars.size(); ++k) {
      term.vars.push_back(vars.at(k).natural());
    }
    terms.push_back(std::move(term));
  }
  return RingPolynomial(std::move(terms));
}

RingConstraintStream parse_ring_stream(const Field& doc) {
  if (doc.has("family")) return corpus::ring_family(parse_family(doc.at("family")));
  const Field list = doc.at("constraints");
  if (list.json().is_object()) return corpus::ring_family(parse_family(list));
  std::vector<RingPolynomial> polys;
  for (std::size_t i = 0; i < list.size(); ++i) {
    polys.push_back(parse_ring_polynomial(list.at(i)));
  }
  return RingConstraintStream::from_list(std::move(polys));
}

LinearInput parse_linear_system(const Field& doc) {
  double p = 0, q = 0;
  if (doc.has("p") && doc.has("q")) {
    p = doc.at("p").number();
    q = doc.at("q").number();
  } else if (doc.has("p")) {
    p = doc.at("p").number();
    if (!(p > 1)) doc.at("p").fail("p must exceed 1");
    q = p / (p - 1);
  } else {
    doc.fail("missing exponent 'p'");
  }
  std::optional<ConjugatePair> pair;
  try {
    pair.emplace(p, q);
  } catch (const std::invalid_argument& e) {
    doc.fail(e.what());
  }
  std::optional<double> M;
  if (doc.has("M")) M = doc.at("M").positive();

  const bool family = doc.has("family") ||
                      (doc.has("rows") && doc.at("rows").json().is_object());
  if (family) {
    const Field f = doc.has("family") ? doc.at("family") : doc.at("rows");
    const auto d = parse_family(f);
    try {
      auto sys = corpus::linear_family(d, *pair);
      std::optional<std::vector<double>> planted;
      if (d.name == "planted") planted = corpus::planted_vector(d);
      if (M) {
        sys = InfiniteLinearSystem(
            sys.pair(), [sys](std::size_t i) { return sys.row(i); },
            sys.row_count(), M);
      }
      return {std::move(sys), std::move(planted)};
    } catch (const std::invalid_argument& e) {
      f.fail(e.what());
    }
  }
  const Field rows = doc.at("rows");
  std::vector<LinearRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Field r = rows.at(i);
    out.push_back({parse_sequence(r.at("a"), pair->p()), r.at("b").number()});
  }
  return {InfiniteLinearSystem::from_rows(*pair, std::move(out), M), std::nullopt};
}

EnvelopeSequence parse_envelope(const Field& f, double q) {
  if (f.has("from_solution")) {
    const auto x = parse_sequence(f.at("from_solution"), q);
    const std::size_t maxN = f.has("max_n") ? f.at("max_n").natural() : 64;
    return envelope_from_solution(x, maxN);
  }
  auto values = f.at("values").numbers();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0)) f.at("values").at(i).fail("envelope must be positive");
  }
  return EnvelopeSequence(std::move(values),
                          [](std::size_t) { return kEnvelopeFloor; },
                          kEnvelopeFloor);
}

CoordinateBounds parse_bounds(const Field& f) {
  if (f.has("uniform")) return CoordinateBounds::uniform(f.at("uniform").positive());
  std::vector<double> values;
  const Field v = f.at("values");
  for (std::size_t i = 0; i < v.size(); ++i) values.push_back(v.at(i).positive());
  return CoordinateBounds::from_values(std::move(values), f.at("rest").positive());
}

FiniteSupportFunction parse_real_polynomial(const Field& f) {
  std::vector<FiniteSupportFunction::RealTerm> terms;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Field t = f.at(i);
    FiniteSupportFunction::RealTerm term;
    term.coeff = t.at("coeff").number();
    const Field vars = t.at("vars");
    for (std::size_t k = 0; k < vars.size(); ++k) {
      term.vars.push_back(vars.at(k).natural());
    }
    terms.push_back(std::move(term));
  }
  return FiniteSupportFunction::polynomial(std::move(terms));
}

FunctionStream parse_function_stream(const Field& doc) {
  if (doc.has("family")) {
    try {
      return corpus::box_family(parse_family(doc.at("family")));
    } catch (const std::invalid_argument& e) {
      doc.at("family").fail(e.what());
    }
  }
  const Field list = doc.at("functions");
  if (list.json().is_object()) {
    try {
      return corpus::box_family(parse_family(list));
    } catch (const std::invalid_argument& e) {
      list.fail(e.what());
    }
  }
  std::vector<FiniteSupportFunction> fs;
  for (std::size_t i = 0; i < list.size(); ++i) {
    fs.push_back(parse_real_polynomial(list.at(i)));
  }
  return FunctionStream::from_list(std::move(fs));
}

VariableBox parse_box(const Field& f) {
  if (f.has("uniform")) return VariableBox::uniform(f.at("uniform").positive());
  const Field per = f.at("per_var");
  per.require_object();
  std::map<VarId, double> bounds;
  for (const auto& [key, value] : per.json().items()) {
    const Field entry(value, per.path() + "." + key);
    bounds[parse_count(key, entry.path())] = entry.positive();
  }
  std::optional<double> rest;
  if (f.has("rest")) rest = f.at("rest").positive();
  return VariableBox::per_var(std::move(bounds), rest);
}

std::vector<SectionStep> parse_section_schedule(const std::string& text) {
  std::vector<SectionStep> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) {
      throw InputError("--schedule: expected k:H pairs, got '" + item + "'");
    }
    out.push_back({parse_count(parts[0], "--schedule"),
                   parse_count(parts[1], "--schedule")});
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].rows <= out[i - 1].rows ||
        out[i].truncation <= out[i - 1].truncation) {
      throw InputError("--schedule: steps must increase strictly in k and H");
    }
  }
  return out;
}

std::vector<std::size_t> parse_prefix_schedule(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ',')) {
    out.push_back(parse_count(item, "--schedule"));
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) {
      throw InputError("--schedule: prefix lengths must increase strictly");
    }
  }
  return out;
}

std::vector<double> parse_eps(const std::string& text, std::size_t steps) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    const double v = parse_real(item, "--eps");
    if (!(v > 0)) throw InputError("--eps: values must be positive");
    out.push_back(v);
  }
  if (out.size() == 1) out.assign(steps, out.front());
  if (out.size() != steps) {
    throw InputError("--eps: expected 1 or " + std::to_string(steps) + " values");
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] > out[i - 1]) throw InputError("--eps: values must not increase");
  }
  return out;
}

}  // namespace compactness::app

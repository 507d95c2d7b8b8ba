#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "compactness/box.hpp"
#include "compactness/corpus.hpp"
#include "compactness/linear.hpp"
#include "compactness/ring.hpp"
#include "compactness_app/app.hpp"

namespace compactness::app {

using Json = nlohmann::ordered_json;

/// Parses a JSON file; syntax errors report line and column.
Json load_document(const std::string& path);

/// Typed field access with path-qualified diagnostics.
class Field {
public:
  Field(const Json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const Json& json() const { return value_; }
  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;
  Field at(const std::string& key) const;
  Field at(std::size_t index) const;
  std::size_t size() const;
  double number() const;
  double positive() const;
  std::size_t natural() const;
  std::string string() const;
  std::vector<double> numbers() const;
  void require_object() const;
  void require_array() const;
  [[noreturn]] void fail(const std::string& message) const;

private:
  const Json& value_;
  std::string path_;
};

PSummableSequence parse_sequence(const Field& f, double exponent);
corpus::FamilyDescriptor parse_family(const Field& f);

FiniteRing parse_ring(const Field& f);
RingPolynomial parse_ring_polynomial(const Field& f);
RingConstraintStream parse_ring_stream(const Field& doc);

struct LinearInput {
  InfiniteLinearSystem system;
  /// Present for the "planted" family.
  std::optional<std::vector<double>> planted;
};
LinearInput parse_linear_system(const Field& doc);

EnvelopeSequence parse_envelope(const Field& f, double q);
CoordinateBounds parse_bounds(const Field& f);

FiniteSupportFunction parse_real_polynomial(const Field& f);
FunctionStream parse_function_stream(const Field& doc);
VariableBox parse_box(const Field& f);

std::vector<SectionStep> parse_section_schedule(const std::string& text);
std::vector<std::size_t> parse_prefix_schedule(const std::string& text);
std::vector<double> parse_eps(const std::string& text, std::size_t steps);

}  // namespace compactness::app

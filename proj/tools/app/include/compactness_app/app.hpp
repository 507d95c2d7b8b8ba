#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace compactness::app {

enum class Format { Human, Structured };

struct RunConfig {
  /// solve-ring, solve-linear, solve-box, verify, demo, props
  std::string command;
  /// Input file for solve-* and verify; demo name for demo.
  std::string input;
  std::optional<std::string> schedule;
  std::optional<std::size_t> window;
  std::optional<double> tol;
  std::optional<double> coord_tol;
  /// One value, or a comma-separated decreasing list (one per step).
  std::optional<std::string> eps;
  std::optional<std::size_t> budget;
  std::optional<double> box;
  std::optional<std::size_t> prefix;
  Format format = Format::Structured;
  std::optional<std::string> out;
};

/// Malformed input or configuration, with the offending location.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

enum ExitCode : int {
  kSolved = 0,
  kRefuted = 1,
  kInconclusive = 2,
  kInputError = 3,
};

struct RunResult {
  int exit_code = kSolved;
  nlohmann::ordered_json report;
};

/// Runs one command. Never throws for bad input: every failure is mapped to
/// an exit code and described in the report.
RunResult run(const RunConfig& config);

/// Renders a report as text tables.
std::string render_human(const nlohmann::ordered_json& report);

/// Serialized report in the configured format, newline terminated.
std::string format_report(const RunResult& result, Format format);

}  // namespace compactness::app

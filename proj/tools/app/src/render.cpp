#include <iomanip>
#include <sstream>

#include "compactness_app/app.hpp"

namespace compactness::app {

namespace {

using Json = nlohmann::ordered_json;

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  if (v.is_number_float()) {
    std::ostringstream out;
    out << std::setprecision(10) << v.get<double>();
    return out.str();
  }
  if (v.is_array() || v.is_object()) return v.dump();
  return v.dump();
}

// Rows of objects as an aligned table over the given columns.
void table(std::ostringstream& out, const std::string& title, const Json& rows,
           const std::vector<std::string>& columns) {
  if (!rows.is_array() || rows.empty()) return;
  std::vector<std::size_t> width;
  for (const auto& c : columns) width.push_back(c.size());
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      line.push_back(row.contains(columns[i]) ? cell(row[columns[i]]) : "-");
      width[i] = std::max(width[i], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  out << "\n" << title << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << "  " << std::left << std::setw(static_cast<int>(width[i])) << columns[i];
  }
  out << "\n";
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out << "  " << std::left << std::setw(static_cast<int>(width[i])) << line[i];
    }
    out << "\n";
  }
}

}  // namespace

std::string render_human(const Json& r) {
  std::ostringstream out;
  out << r.value("command", "") << " " << r.value("input", "") << ": "
      << r.value("status", "") << " (exit " << r.value("exit_code", 0) << ")\n";
  if (r.contains("error")) out << "error: " << cell(r["error"]["message"]) << "\n";
  if (r.contains("verified_prefix")) {
    out << "verified prefix: " << cell(r["verified_prefix"]) << "\n";
  }
  if (r.contains("note")) out << "note: " << cell(r["note"]) << "\n";
  table(out, "coordinates", r.value("coordinates", Json::array()),
        {"var", "status", "value", "strength"});
  if (r.contains("candidate")) {
    const auto& c = r["candidate"];
    out << "\nq-norm certificate: " << cell(c["q_norm_cert"])
        << "  budget: " << cell(c["norm_budget"]) << "\n";
    table(out, "coordinates", c["coordinates"], {"index", "value", "status", "determined"});
    table(out, "residual certificates", c["residual_certificates"],
          {"row", "head_residual", "tail_bound", "pass"});
  }
  if (r.contains("rows")) {
    table(out, "verification", r["rows"], {"row", "head_residual", "bound", "verdict", "recorded"});
  }
  table(out, "l^p certification", r.value("certification", Json::array()),
        {"p", "result", "reason"});
  if (r.contains("prefix") && r["prefix"].is_object()) {
    table(out, "prefix residuals", r["prefix"]["residuals"], {"equation", "rhs", "residual"});
  }
  if (r.contains("root")) {
    out << "\nroot: x = " << cell(r["root"]["x"]) << "\n";
    table(out, "root residuals", r["root"]["residuals"], {"equation", "residual"});
  }
  table(out, "properties", r.value("properties", Json::array()),
        {"name", "cases", "failures", "verdict"});
  out << "\nrefutation flags:";
  for (const auto& [name, set] : r["refutation_flags"].items()) {
    if (set.get<bool>()) out << " " << name;
  }
  out << "\n";
  return out.str();
}

}  // namespace compactness::app

#include <algorithm>
#include <cmath>
#include <set>

#include "compactness/errors.hpp"
#include "compactness_app/app.hpp"
#include "input.hpp"
#include "props.hpp"

namespace compactness::app {

namespace {

constexpr const char* kRefutationNames[] = {
    "PrefixUnsatisfiable", "NormBudgetExceeded", "NotPSummable",
    "PrefixRootNotFound", "InconsistentSubsystem"};

struct Outcome {
  int exit_code = kSolved;
  Json body = Json::object();
  std::set<std::string> refutations;
};

const char* status_name(int code) {
  switch (code) {
    case kSolved: return "solved";
    case kRefuted: return "refuted";
    case kInconclusive: return "inconclusive";
    default: return "input_error";
  }
}

Json optional_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
Json history_json(const std::vector<std::optional<T>>& h) {
  Json out = Json::array();
  for (const auto& v : h) out.push_back(v ? Json(*v) : Json(nullptr));
  return out;
}

// Variables occurring in the first `L` constraints, sorted.
template <typename Stream>
std::vector<VarId> prefix_support(const Stream& stream, std::size_t L) {
  std::set<VarId> vars;
  for (std::size_t k = 0; k < L; ++k) {
    const auto constraint = stream.at(k);
    for (VarId v : constraint.support()) vars.insert(v);
  }
  return {vars.begin(), vars.end()};
}

std::vector<VarId> requested_vars(const Field& doc) {
  std::vector<VarId> vars;
  const Field list = doc.at("vars");
  for (std::size_t i = 0; i < list.size(); ++i) vars.push_back(list.at(i).natural());
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

const std::string& require_schedule(const RunConfig& c) {
  if (!c.schedule) throw InputError("--schedule is required for " + c.command);
  return *c.schedule;
}

double positive_option(const std::optional<double>& v, double fallback,
                       const char* flag) {
  const double x = v.value_or(fallback);
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InputError(std::string(flag) + ": must be a positive number");
  }
  return x;
}

std::size_t window_option(const RunConfig& c, std::size_t fallback,
                          std::size_t minimum) {
  const std::size_t w = c.window.value_or(fallback);
  if (w < minimum) {
    throw InputError("--window: must be at least " + std::to_string(minimum));
  }
  return w;
}

Outcome solve_ring(const RunConfig& c) {
  const Json doc = load_document(c.input);
  const Field root(doc, "$");
  const auto ring = parse_ring(root.at("ring"));
  const auto stream = parse_ring_stream(root);
  const auto schedule = parse_prefix_schedule(require_schedule(c));
  const std::size_t window = window_option(c, 2, 1);
  RingSearchOptions search;
  if (c.budget) search.budget = *c.budget;
  for (std::size_t L : schedule) {
    if (stream.length && L > *stream.length) {
      throw InputError("--schedule: prefix " + std::to_string(L) +
                       " exceeds the " + std::to_string(*stream.length) +
                       " constraints");
    }
  }
  const auto vars = root.has("vars")
                        ? requested_vars(root)
                        : prefix_support(stream, schedule.empty() ? 0 : schedule.front());

  Outcome out;
  out.body["options"] = {{"schedule", schedule},
                         {"window", window},
                         {"budget", search.budget}};
  out.body["ring_size"] = ring.size();
  const auto report = compactness_solve_ring(stream, ring, schedule, window, vars, search);
  out.body["levels"] = report.levels;
  out.body["verified_prefix"] = report.verified_prefix;
  out.body["note"] = std::string(kStabilizationNote);
  Json coords = Json::array();
  for (const auto& co : report.coordinates) {
    coords.push_back({{"var", co.var},
                      {"status", std::string(to_string(co.status))},
                      {"value", co.value ? Json(*co.value) : Json(nullptr)},
                      {"strength", std::string(to_string(co.strength))},
                      {"history", history_json(co.history)}});
  }
  out.body["coordinates"] = std::move(coords);
  Json assignment = Json::object();
  for (const auto& [v, value] : report.final_assignment) {
    assignment[std::to_string(v)] = value;
  }
  out.body["final_assignment"] = std::move(assignment);
  out.exit_code = report.all_stabilized() ? kSolved : kInconclusive;
  return out;
}

Json candidate_json(const SolutionCandidate& cand, std::optional<double> M) {
  Json coords = Json::array();
  for (const auto& co : cand.coordinates) {
    coords.push_back({{"index", co.index},
                      {"value", co.value},
                      {"status", std::string(to_string(co.status))},
                      {"determined", co.determined},
                      {"history", history_json(co.history)}});
  }
  Json residuals = Json::array();
  for (const auto& r : cand.residuals) {
    residuals.push_back({{"row", r.row},
                         {"head_residual", r.head_residual},
                         {"tail_bound", r.tail_bound},
                         {"pass", r.pass}});
  }
  Json tails = Json::array();
  for (const auto& t : cand.tail_checks) {
    tails.push_back({{"N", t.N}, {"norm", t.norm}, {"envelope", t.envelope}, {"pass", t.pass}});
  }
  Json schedule = Json::array();
  for (const auto& s : cand.schedule) schedule.push_back({s.rows, s.truncation});
  return {{"truncation", cand.schedule.empty() ? 0 : cand.schedule.back().truncation},
          {"schedule", std::move(schedule)},
          {"y", cand.y},
          {"q_norm_cert", cand.q_norm_cert},
          {"norm_budget", optional_json(M)},
          {"norm_within_budget", !M || cand.q_norm_cert <= *M},
          {"verified_rows", cand.verified_rows},
          {"coordinates", std::move(coords)},
          {"residual_certificates", std::move(residuals)},
          {"tail_checks", std::move(tails)},
          {"all_certificates_pass", cand.all_certificates_pass()},
          {"determined_coordinates_stabilized", cand.determined_coordinates_stabilized()}};
}

Outcome solve_linear(const RunConfig& c) {
  const Json doc = load_document(c.input);
  const Field root(doc, "$");
  auto input = parse_linear_system(root);
  const auto& sys = input.system;
  const auto schedule = parse_section_schedule(require_schedule(c));
  if (sys.row_count()) {
    for (const auto& s : schedule) {
      if (s.rows > *sys.row_count()) {
        throw InputError("--schedule: " + std::to_string(s.rows) +
                         " rows requested, system has " +
                         std::to_string(*sys.row_count()));
      }
    }
  }
  const bool epsilon_mode = c.eps.has_value();

  Outcome out;
  out.body["system"] = doc;
  out.body["mode"] = epsilon_mode ? "epsilon" : "exact";
  SolutionCandidate cand;
  if (epsilon_mode) {
    EpsilonExtractOptions opt;
    opt.window = window_option(c, 3, 2);
    opt.coord_tol = positive_option(c.coord_tol, 1e-9, "--coord-tol");
    opt.tol = positive_option(c.tol, 1e-12, "--tol");
    if (c.budget) opt.projection_iterations = *c.budget;
    const auto eps = parse_eps(*c.eps, schedule.size());
    const double q = sys.pair().q();
    std::optional<EnvelopeSequence> e;
    std::optional<CoordinateBounds> bounds;
    if (root.has("envelope")) {
      e.emplace(parse_envelope(root.at("envelope"), q));
    } else if (input.planted) {
      e.emplace(envelope_from_solution(PSummableSequence::finite(q, *input.planted),
                                       schedule.empty() ? 0 : schedule.back().truncation));
    } else {
      root.fail("epsilon mode needs an 'envelope'");
    }
    if (root.has("bounds")) {
      bounds.emplace(parse_bounds(root.at("bounds")));
    } else if (input.planted) {
      std::vector<double> values;
      for (double v : *input.planted) values.push_back(std::abs(v) + 1.0);
      bounds.emplace(CoordinateBounds::from_values(std::move(values), 1.0));
    } else {
      root.fail("epsilon mode needs 'bounds'");
    }
    out.body["options"] = {{"window", opt.window},
                           {"coord_tol", opt.coord_tol},
                           {"tol", opt.tol},
                           {"eps", eps},
                           {"projection_iterations", opt.projection_iterations}};
    cand = epsilon_compactness_extract(sys, *e, *bounds, schedule, eps, opt);
  } else {
    ExtractOptions opt;
    opt.window = window_option(c, 3, 2);
    opt.coord_tol = positive_option(c.coord_tol, 1e-9, "--coord-tol");
    opt.tol = positive_option(c.tol, 1e-12, "--tol");
    if (!sys.norm_budget()) root.fail("missing norm budget 'M'");
    out.body["options"] = {{"window", opt.window},
                           {"coord_tol", opt.coord_tol},
                           {"tol", opt.tol},
                           {"truncation_cap", opt.truncation_cap}};
    cand = compactness_extract(sys, schedule, opt);
  }
  out.body["note"] = std::string(kStabilizationNote);
  out.body["candidate"] = candidate_json(cand, sys.norm_budget());
  if (input.planted) {
    double worst = 0.0;
    for (const auto& co : cand.coordinates) {
      if (!co.determined) continue;
      const double target = co.index < input.planted->size() ? (*input.planted)[co.index] : 0.0;
      worst = std::max(worst, std::abs(co.value - target));
    }
    out.body["planted"] = {{"x_star", *input.planted},
                           {"max_error_on_determined", worst}};
  }
  const bool ok = cand.all_certificates_pass() &&
                  cand.determined_coordinates_stabilized() &&
                  (!sys.norm_budget() || cand.q_norm_cert <= *sys.norm_budget() +
                                             out.body["options"]["coord_tol"].get<double>());
  out.exit_code = ok ? kSolved : kInconclusive;
  return out;
}

Outcome verify(const RunConfig& c) {
  const Json doc = load_document(c.input);
  const Field root(doc, "$");
  const Field system = root.at("system");
  const auto input = parse_linear_system(system);
  const Field cand = root.at("candidate");
  const auto y = cand.at("y").numbers();
  const std::size_t N = cand.at("truncation").natural();
  const double tol = positive_option(c.tol, 1e-9, "--tol");
  const bool exact = !root.has("mode") || root.at("mode").string() == "exact";
  if (exact && !input.system.norm_budget()) system.fail("missing norm budget 'M'");

  const Field certs = cand.at("residual_certificates");
  Json rows = Json::array();
  bool reproduced = true;
  bool all_pass = true;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const Field cert = certs.at(i);
    const std::size_t r = cert.at("row").natural();
    if (input.system.row_count() && r >= *input.system.row_count()) {
      cert.at("row").fail("row out of range");
    }
    const bool recorded = cert.at("pass").json().get<bool>();
    double head = 0.0, bound = 0.0;
    bool pass = false;
    if (exact) {
      const std::vector<std::size_t> one{r};
      const auto v = verify_solution(input.system, y, one, N, tol).front();
      head = v.head_residual;
      bound = v.bound;
      pass = v.pass;
    } else {
      // Epsilon-mode bounds depend on the envelope; re-check the recorded
      // bound against a recomputed head residual.
      const auto row = input.system.row(r);
      long double s = 0;
      for (std::size_t n = 0; n <= N && n < y.size(); ++n) s += row.a.coeff(n) * y[n];
      head = std::abs(static_cast<double>(row.b - s));
      bound = cert.at("tail_bound").number();
      pass = head <= bound + tol;
    }
    reproduced = reproduced && pass == recorded;
    all_pass = all_pass && pass;
    rows.push_back({{"row", r},
                    {"head_residual", head},
                    {"bound", bound},
                    {"verdict", pass ? "PASS" : "FAIL"},
                    {"recorded", recorded ? "PASS" : "FAIL"}});
  }
  Outcome out;
  out.body["options"] = {{"tol", tol}};
  out.body["mode"] = exact ? "exact" : "epsilon";
  out.body["truncation"] = N;
  out.body["rows"] = std::move(rows);
  out.body["reproduced"] = reproduced;
  out.exit_code = reproduced && all_pass ? kSolved : kInconclusive;
  return out;
}

Outcome solve_box(const RunConfig& c) {
  const Json doc = load_document(c.input);
  const Field root(doc, "$");
  const auto stream = parse_function_stream(root);
  const VariableBox box = c.box ? VariableBox::uniform(positive_option(c.box, 1, "--box"))
                                : parse_box(root.at("box"));
  std::vector<std::size_t> schedule;
  if (c.schedule) {
    schedule = parse_prefix_schedule(*c.schedule);
  } else if (c.prefix) {
    schedule = {*c.prefix};
  } else {
    throw InputError("--schedule (or --prefix) is required for solve-box");
  }
  for (std::size_t L : schedule) {
    if (stream.length && L > *stream.length) {
      throw InputError("--schedule: prefix " + std::to_string(L) +
                       " exceeds the " + std::to_string(*stream.length) +
                       " functions");
    }
  }
  BoxExtractOptions opt;
  opt.window = window_option(c, 2, 2);
  opt.coord_tol = positive_option(c.coord_tol, 1e-6, "--coord-tol");
  opt.tol = positive_option(c.tol, 1e-6, "--tol");
  if (c.budget) opt.budget = *c.budget;
  std::vector<VarId> vars = root.has("vars")
                                ? requested_vars(root)
                                : prefix_support(stream, schedule.empty() ? 0 : schedule.front());

  Outcome out;
  out.body["options"] = {{"schedule", schedule},
                         {"window", opt.window},
                         {"coord_tol", opt.coord_tol},
                         {"tol", opt.tol},
                         {"budget", opt.budget}};
  const auto report = box_compactness_extract(stream, box, schedule, opt);
  out.body["levels"] = report.levels;
  out.body["verified_prefix"] = report.verified_prefix;
  out.body["note"] = std::string(kStabilizationNote);
  Json coords = Json::array();
  bool requested_stable = true;
  for (VarId v : vars) {
    const auto it = std::find_if(report.coordinates.begin(), report.coordinates.end(),
                                 [v](const auto& co) { return co.var == v; });
    if (it == report.coordinates.end()) {
      coords.push_back({{"var", v}, {"status", "UNASSIGNED"}, {"value", nullptr},
                        {"bound", box.bound(v)}, {"history", Json::array()}});
      requested_stable = false;
      continue;
    }
    requested_stable = requested_stable && it->status == Stability::Stabilized;
    coords.push_back({{"var", v},
                      {"status", std::string(to_string(it->status))},
                      {"value", it->value ? Json(*it->value) : Json(nullptr)},
                      {"bound", box.bound(v)},
                      {"history", history_json(it->history)}});
  }
  out.body["coordinates"] = std::move(coords);
  Json assignment = Json::object();
  for (const auto& [v, value] : report.final_assignment) {
    assignment[std::to_string(v)] = value;
  }
  out.body["final_assignment"] = std::move(assignment);
  out.exit_code = requested_stable ? kSolved : kInconclusive;
  return out;
}

Outcome demo_helly(const RunConfig& c) {
  const std::size_t k = c.prefix.value_or(5);
  if (k < 1 || k > 10'000) throw InputError("--prefix: must lie in 1..10000");
  Outcome out;
  Json certification = Json::array();
  for (double p : {1.5, 2.0, 3.0}) {
    Json entry = {{"p", p}};
    try {
      corpus::helly_system(ConjugatePair::from_p(p));
      entry["result"] = "certified";
    } catch (const NotPSummable& e) {
      entry["result"] = "NotPSummable";
      entry["reason"] = e.reason();
      out.refutations.insert("NotPSummable");
    }
    certification.push_back(std::move(entry));
  }
  out.body["indexing"] = "equations and unknowns are numbered from 1";
  out.body["certification"] = std::move(certification);

  const auto rows = corpus::helly_prefix_rows(k, k, 2.0);
  const auto pattern = corpus::helly_prefix_solution(k);
  const auto min_norm = min_norm_solve(rows, k - 1, ConjugatePair(2, 2));
  Json table = Json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    long double s = 0;
    for (std::size_t n = 0; n < k; ++n) s += rows[i].a.coeff(n) * pattern[n];
    const double residual = std::abs(static_cast<double>(s) - rows[i].b);
    worst = std::max(worst, residual);
    table.push_back({{"equation", i + 1}, {"rhs", rows[i].b}, {"residual", residual}});
  }
  double gap = 0.0;
  for (std::size_t n = 0; n < k; ++n) gap = std::max(gap, std::abs(min_norm[n] - pattern[n]));
  out.body["prefix"] = {{"equations", k},
                        {"solution", pattern},
                        {"residuals", std::move(table)},
                        {"max_residual", worst},
                        {"min_norm_solution", min_norm},
                        {"min_norm_matches_pattern", gap <= 1e-9}};
  out.exit_code = out.refutations.empty() ? kInconclusive : kRefuted;
  return out;
}

Outcome demo_abian(const RunConfig& c) {
  const double M = positive_option(c.box, 5.0, "--box");
  const std::size_t L = c.prefix.value_or(7);
  if (L < 1 || L > 64) throw InputError("--prefix: must lie in 1..64");
  const double tol = positive_option(c.tol, 1e-6, "--tol");
  const std::size_t budget = c.budget.value_or(1'000'000);
  const auto stream = corpus::abian_family(L);
  const auto fs = stream.prefix(L);
  const auto box = VariableBox::uniform(M);

  Outcome out;
  out.body["options"] = {{"box", M}, {"prefix", L}, {"tol", tol}, {"budget", budget}};
  out.body["minimal_feasible_x"] = L;
  const auto r = root_search(fs, box, {tol, budget});
  out.body["search"] = {{"evaluations", r.evaluations},
                        {"best_value", r.best_value},
                        {"progress", r.progress}};
  if (r.point) {
    Json root = Json::object();
    root["x"] = (*r.point)[0];
    Json ys = Json::array();
    for (std::size_t i = 1; i < r.point->size(); ++i) ys.push_back((*r.point)[i]);
    root["y"] = std::move(ys);
    Json residuals = Json::array();
    for (std::size_t k = 0; k < L; ++k) {
      const std::vector<double> args{(*r.point)[0], (*r.point)[k + 1]};
      residuals.push_back({{"equation", k + 1}, {"residual", std::abs(fs[k](args))}});
    }
    root["residuals"] = std::move(residuals);
    out.body["root"] = std::move(root);
    out.exit_code = kSolved;
    return out;
  }
  const bool certified = certify_no_root(fs, box, tol, budget);
  throw PrefixRootNotFound(L, r.best_value,
                           certified ? RootFailure::CertifiedInfeasible : r.failure);
}

Outcome props(const RunConfig& c) {
  Outcome out;
  Json results = Json::array();
  bool all = true;
  for (const auto& p : run_property_suites(c.budget)) {
    all = all && p.failures == 0;
    results.push_back({{"name", p.name},
                       {"cases", p.cases},
                       {"failures", p.failures},
                       {"verdict", p.failures == 0 ? "PASS" : "FAIL"},
                       {"first_failure", p.first_failure}});
  }
  out.body["properties"] = std::move(results);
  out.exit_code = all ? kSolved : kInconclusive;
  return out;
}

// Every module error maps to exactly one exit status; refutations only
// where the failure is machine-checkable.
int classify(const Error& e, Json& detail, std::set<std::string>& refutations) {
  detail["kind"] = std::string(to_string(e.kind()));
  detail["message"] = e.what();
  switch (e.kind()) {
    case ErrorKind::PrefixUnsatisfiable: {
      const auto& u = static_cast<const PrefixUnsatisfiable&>(e);
      detail["level"] = u.level();
      detail["scheduled_level"] = u.scheduled_level();
      refutations.insert("PrefixUnsatisfiable");
      return kRefuted;
    }
    case ErrorKind::NotPSummable: {
      const auto& n = static_cast<const NotPSummable&>(e);
      detail["sequence"] = n.sequence();
      detail["exponent"] = n.exponent();
      detail["reason"] = n.reason();
      refutations.insert("NotPSummable");
      return kRefuted;
    }
    case ErrorKind::NormBudgetExceeded: {
      const auto& n = static_cast<const NormBudgetExceeded&>(e);
      detail["rows"] = n.rows();
      detail["truncation"] = n.truncation();
      detail["section_norm"] = n.section_norm();
      detail["lower_bound"] = n.lower_bound();
      detail["budget"] = n.budget();
      detail["certified"] = n.certified();
      if (!n.certified()) return kInconclusive;
      refutations.insert("NormBudgetExceeded");
      return kRefuted;
    }
    case ErrorKind::InconsistentSubsystem: {
      const auto& s = static_cast<const InconsistentSubsystem&>(e);
      detail["rows"] = s.rows();
      detail["truncation"] = s.truncation();
      detail["residual"] = s.residual();
      detail["persists_to_cap"] = s.persists_to_cap();
      if (!s.persists_to_cap()) return kInconclusive;
      refutations.insert("InconsistentSubsystem");
      return kRefuted;
    }
    case ErrorKind::PrefixRootNotFound: {
      const auto& p = static_cast<const PrefixRootNotFound&>(e);
      detail["level"] = p.level();
      detail["best_value"] = p.best_value();
      detail["cause"] = std::string(to_string(p.cause()));
      if (p.cause() != RootFailure::CertifiedInfeasible) return kInconclusive;
      refutations.insert("PrefixRootNotFound");
      return kRefuted;
    }
    case ErrorKind::NoFeasibleSection: {
      const auto& s = static_cast<const NoFeasibleSection&>(e);
      detail["step"] = s.step();
      detail["rows"] = s.rows();
      detail["clause"] = s.clause();
      return kInconclusive;
    }
    case ErrorKind::EnvelopeStall:
    case ErrorKind::SearchBudgetExceeded:
    case ErrorKind::RankDeficiencyUnresolved:
      return kInconclusive;
    case ErrorKind::InvalidRing:
    case ErrorKind::UnassignedVariable:
      return kInputError;
  }
  return kInputError;
}

}  // namespace

RunResult run(const RunConfig& config) {
  Outcome outcome;
  Json error;
  try {
    if (config.command == "solve-ring") {
      outcome = solve_ring(config);
    } else if (config.command == "solve-linear") {
      outcome = solve_linear(config);
    } else if (config.command == "solve-box") {
      outcome = solve_box(config);
    } else if (config.command == "verify") {
      outcome = verify(config);
    } else if (config.command == "demo") {
      if (config.input == "helly") {
        outcome = demo_helly(config);
      } else if (config.input == "abian") {
        outcome = demo_abian(config);
      } else {
        throw InputError("unknown demo '" + config.input + "' (helly, abian)");
      }
    } else if (config.command == "props") {
      outcome = props(config);
    } else {
      throw InputError("unknown command '" + config.command + "'");
    }
  } catch (const Error& e) {
    error = Json::object();
    outcome.exit_code = classify(e, error, outcome.refutations);
  } catch (const InputError& e) {
    error = {{"kind", "InputError"}, {"message", e.what()}};
    outcome.exit_code = kInputError;
  } catch (const std::invalid_argument& e) {
    error = {{"kind", "InputError"}, {"message", e.what()}};
    outcome.exit_code = kInputError;
  } catch (const std::out_of_range& e) {
    error = {{"kind", "InputError"}, {"message", e.what()}};
    outcome.exit_code = kInputError;
  }

  RunResult result;
  result.exit_code = outcome.exit_code;
  Json& r = result.report;
  r["command"] = config.command;
  r["input"] = config.input;
  r["status"] = status_name(outcome.exit_code);
  r["exit_code"] = outcome.exit_code;
  for (auto& [key, value] : outcome.body.items()) r[key] = value;
  Json flags = Json::object();
  for (const char* name : kRefutationNames) flags[name] = outcome.refutations.count(name) > 0;
  r["refutation_flags"] = std::move(flags);
  if (!error.is_null()) r["error"] = std::move(error);
  return result;
}

std::string format_report(const RunResult& result, Format format) {
  if (format == Format::Human) return render_human(result.report);
  return result.report.dump(2) + "\n";
}

}  // namespace compactness::app

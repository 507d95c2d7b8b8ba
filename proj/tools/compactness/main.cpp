#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "compactness_app/app.hpp"

using compactness::app::Format;
using compactness::app::RunConfig;

namespace {

void add_common_flags(CLI::App* cmd, RunConfig& c, std::string& format) {
  cmd->add_option("--schedule", c.schedule,
                  "k:H,k:H,... for linear systems; L1,L2,... for ring/box");
  cmd->add_option("--window", c.window, "stabilization window");
  cmd->add_option("--tol", c.tol, "residual tolerance");
  cmd->add_option("--coord-tol", c.coord_tol, "coordinate agreement tolerance");
  cmd->add_option("--eps", c.eps, "epsilon schedule (linear)");
  cmd->add_option("--budget", c.budget, "search / evaluation budget");
  cmd->add_option("--box", c.box, "uniform box bound M");
  cmd->add_option("--prefix", c.prefix, "prefix length");
  cmd->add_option("--format", format, "human | structured")
      ->check(CLI::IsMember({"human", "structured"}));
  cmd->add_option("--out", c.out, "write the report to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve and certify infinite constraint systems from finite prefixes"};
  app.require_subcommand(1);
  RunConfig config;
  std::string format = "structured";

  struct Spec {
    const char* name;
    const char* help;
    const char* positional;
  };
  const Spec specs[] = {
      {"solve-ring", "polynomial systems over a finite ring", "system file"},
      {"solve-linear", "linear systems with l^p rows", "system file"},
      {"solve-box", "continuous functions on a box", "system file"},
      {"verify", "re-verify a solve-linear report", "report file"},
      {"demo", "built-in counterexamples: helly, abian", "demo name"},
      {"props", "run the randomized property suites", nullptr},
  };
  for (const auto& s : specs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    if (s.positional) cmd->add_option("input", config.input, s.positional)->required();
    add_common_flags(cmd, config, format);
    cmd->callback([&config, name = s.name] { config.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return compactness::app::kInputError;
  }
  config.format = format == "human" ? Format::Human : Format::Structured;

  const auto result = compactness::app::run(config);
  const std::string text = compactness::app::format_report(result, config.format);
  if (config.out) {
    std::ofstream out(*config.out, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << *config.out << "\n";
      return compactness::app::kInputError;
    }
    out << text;
  } else {
    std::cout << text;
  }
  return result.exit_code;
}

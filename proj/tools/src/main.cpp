#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "unred_cli/config.hpp"
#include "unred_cli/runner.hpp"

int main(int argc, char** argv) {
  namespace cli = unred::cli;
  CLI::App app{"Un-reduced curve matching, flows, Hopf holonomy and sigma-model checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"match", "solve the boundary-value problem between two curves"},
      {"flow", "integrate the hyperbolic curve flow"},
      {"hopf", "horizontal lift and holonomy over a closed path on the sphere"},
      {"sigma", "Euler-Poincare and flatness residuals, reconstruction, projection"},
      {"check", "run the built-in invariant suite"},
      {"validate", "check a config file and list every problem"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
    if (name != "check") opt->required();
    if (name != "validate") sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  if (command == "validate") {
    const auto diagnostics = cli::validate_file(config_path);
    for (const auto& d : diagnostics) std::cerr << d << '\n';
    if (diagnostics.empty()) std::cout << config_path << ": valid\n";
    return diagnostics.empty() ? cli::kSuccess : cli::kConfigError;
  }

  try {
    cli::RunConfig cfg = config_path.empty() ? cli::parse_config(nlohmann::json::object()) : cli::load_config(config_path);
    if (!cfg.command.empty() && cfg.command != command) {
      throw cli::ConfigError({"config is for command '" + cfg.command + "', not '" + command + "'"});
    }
    const std::string out = out_dir.empty() ? cfg.output.directory : out_dir;
    return cli::run(command, cfg, out, std::cout);
  } catch (const cli::ConfigError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d << '\n';
    return cli::kConfigError;
  }
}

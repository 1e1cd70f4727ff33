// plapflow: command-line front end for the p-Laplacian evolution lab.

#include "plap/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"1-D p-Laplacian Dirichlet evolution lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PLAP_VERSION);

  std::string config;
  std::string out;
  std::vector<std::string> only;
  std::uint64_t seed = 0;

  struct Command {
    const char* name;
    const char* kind;  // empty: take the kind from the config
    const char* help;
  };
  const Command commands[] = {
      {"run", "", "Run the experiment described by a config file"},
      {"eigen", "eigen", "Tabulate closed-form and shooting eigenvalues"},
      {"evolve", "evolve", "Evolve an initial state and write trajectory.csv"},
      {"equilibria", "equilibria", "Find stationary solutions by shooting"},
      {"connect", "connect", "Search for connecting orbits from an equilibrium"},
      {"verify", "verify", "Run the verification suite"},
  };

  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    auto* opt = sub->add_option("--config,-c", config, "Experiment config (JSON)");
    if (std::string(cmd.name) != "verify") opt->required();
    sub->add_option("--out,-o", out, "Output directory (overrides the config)");
    sub->add_option("--seed", seed, "Random seed (overrides the config)");
    if (std::string(cmd.name) == "verify" || std::string(cmd.name) == "run") {
      sub->add_option("--only", only, "Run only these criteria")->delimiter(',');
    }
    subs.emplace_back(sub, &cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : plap::exit_code::config_error;
  }

  for (const auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    plap::RunOverrides overrides;
    if (sub->count("--out")) overrides.output = out;
    if (sub->count("--seed")) overrides.seed = seed;
    overrides.only = only;
    return plap::run_config_file(config, cmd->kind, overrides, std::cerr);
  }
  return plap::exit_code::config_error;
}

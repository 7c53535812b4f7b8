#include <CLI11.hpp>
#include <iostream>

#include "mtist/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Inverse scattering engine for the massive Thirring model"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  bool verbose = false;
  const std::pair<const char*, const char*> cmds[] = {
      {"scatter", "direct transform: scattering.csv, symmetry-report.json, admissibility.json"},
      {"roundtrip", "direct then inverse transform at t = 0"},
      {"evolve", "reconstruct states at the configured times"},
      {"oracle-compare", "compare the evolved states with the direct PDE integrator"},
      {"norms", "norms and admissibility of the configured potential"},
  };
  for (const auto& [name, help] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_flag("--verbose", verbose, "progress on stderr");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  mtist::commands::Context ctx;
  ctx.out_dir = out_dir;
  ctx.verbose = verbose;
  return mtist::commands::run(app.get_subcommands().front()->get_name(), config_path, ctx, std::cerr);
}

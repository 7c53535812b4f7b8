#pragma once

#include <iosfwd>

#include "mtist/config.hpp"

namespace mtist::commands {

struct Context {
  std::string out_dir;  // empty: take the config value
  bool verbose = false;
  std::ostream* log = nullptr;
};

int scatter(const config::RunConfig& cfg, const Context& ctx);
int roundtrip(const config::RunConfig& cfg, const Context& ctx);
int evolve(const config::RunConfig& cfg, const Context& ctx);
int oracle_compare(const config::RunConfig& cfg, const Context& ctx);
int norms(const config::RunConfig& cfg, const Context& ctx);

// Dispatches by name; returns the process exit code and reports errors on err.
int run(const std::string& name, const std::string& config_path, const Context& ctx, std::ostream& err);

}  // namespace mtist::commands

#pragma once

#include <string>

#include "mtist/evolve.hpp"
#include "mtist/oracle.hpp"

namespace mtist::config {

struct RunConfig {
  struct Grid {
    double L = 20.0;
    int n = 2048;
  } grid;
  struct Potential {
    std::string family = "gaussian";
    double amplitude = 0.3;
    double width = 1.0;
    std::string file;  // overrides the family when set
  } potential;
  struct Spectral {
    int nz = 0;
    double z_max = 32.0;
  } spectral;
  rvec times{0.0};
  struct Tolerances {
    double volterra = 1e-6;  // allowed gap between the Wronskian and integral forms of a, b
    double rh = 1e-9;
  } tolerances;
  std::string outputs = "out";
  struct Flags {
    bool taper = false;
    bool dense_fallback = true;
    bool refine_origin = false;
  } flags;
  struct Oracle {
    double dt = 1e-3;
    int extension = 8;
    oracle::Closure closure = oracle::Closure::symmetric;
  } oracle;
  double stencil_dt = 1e-3;
  std::string source;  // raw text, echoed into manifests

  evolve::EvolveOptions evolve_options() const;
  fields::PotentialField potential_field() const;
  numerics::Lattice lattice() const { return numerics::spatial_lattice(grid.L, grid.n); }
};

// key = value lines under [section] headers; '#' and ';' start comments.
RunConfig parse(const std::string& text, const std::string& origin = "config");
RunConfig load(const std::string& path);

std::string closure_name(oracle::Closure c);

}  // namespace mtist::config

#pragma once

#include <optional>

#include "mtist/recon.hpp"

namespace mtist::evolve {

using direct::ScatteringData;
using fields::PotentialField;
using numerics::Lattice;

struct EvolveOptions {
  int nz = 0;             // 0 selects the spatial node count
  double z_max = 32.0;    // spectral lattice covers (-z_max, z_max)
  bool refine_origin = false;  // halve the z spacing everywhere
  direct::ScatteringOptions scattering;
  recon::InverseOptions inverse;
  double stencil_dt = 0.0;  // > 0 adds states at t +- dt for the time residual and second u path
  double u0_tolerance = 1e-6;
};

Lattice spectral_grid(const Lattice& x, const EvolveOptions& opt);

struct TimeResult {
  double t = 0;
  bool ok = false;
  std::string error;
  int exit_code = 0;
  recon::ReconstructedState state;
  fields::NormReport norms;
  double u_path_gap = -1;  // sup |u_primary - u_secondary| when a stencil is available
};

struct ISTRun {
  PotentialField initial;
  cvec u0;
  double u0_mismatch = 0;  // sup |u0 - slaved u0|
  bool u0_consistent = true;
  ScatteringData data;
  rvec times;
  std::vector<TimeResult> results;

  bool all_ok() const;
};

// u0 may be empty, in which case it is taken from the x equation.
ISTRun evolve_ist(const PotentialField& v0, const cvec& u0, const rvec& times, const EvolveOptions& opt = {});

}  // namespace mtist::evolve

#pragma once

#include <string>

#include "mtist/numerics.hpp"

namespace mtist::fields {

using numerics::Lattice;

enum class Derivative { spectral, finite_difference };

struct PotentialField {
  Lattice grid;
  cvec v;
  cvec dv;
  std::string label;

  void validate() const;
  double x(int j) const { return grid.at(j); }
  int origin() const { return grid.n / 2; }
};

PotentialField make_field(const Lattice& grid, cvec v, std::string label = {},
                          Derivative d = Derivative::spectral);

struct FamilySpec {
  std::string family = "gaussian";  // zero, gaussian, sech, box, gaussian-compatible
  double amplitude = 0.3;
  double width = 1.0;
};

cvec sample_family(const Lattice& grid, const FamilySpec& spec);
PotentialField make_family(const Lattice& grid, const FamilySpec& spec, Derivative d = Derivative::spectral);

// Two or three column CSV: x, Re v[, Im v]. Lines starting with '#' and a header line are skipped.
PotentialField load_csv(const std::string& path, Derivative d = Derivative::spectral);

struct NormReport {
  double l2 = 0, l1 = 0, l21 = 0, h1 = 0, h2 = 0, h11 = 0, dv_l1 = 0;
};

NormReport norms(const PotentialField& p);

// nu_+(x) = -1/2 int_x^L |v|^2, right-anchored trapezoid.
rvec nu_plus(const cvec& v, double h);

// int v e^{2 i nu_+} dx over the lattice. It vanishes exactly when the slaved u
// decays at both ends, equivalently r_+(0) = 0.
cplx origin_integral(const cvec& v, double h);

struct Admissibility {
  double lambda_plus = 0;
  double a_lower_bound = 1;
  bool volterra_contractive = true;
  bool a_nonvanishing = true;
  double origin_defect = 0;  // |origin_integral| / ||v||_1
  bool origin_compatible = true;
};

Admissibility check_admissibility(const PotentialField& p, double origin_tolerance = 1e-6);

// Amplitude-times-(1 - beta (x/w)^2) e^{-(x/w)^2} with beta chosen so origin_integral vanishes.
double compatible_beta(const Lattice& grid, double amplitude, double width);

}  // namespace mtist::fields

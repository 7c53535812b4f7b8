#pragma once

#include "mtist/fields.hpp"

namespace mtist::direct {

using fields::PotentialField;
using numerics::Lattice;

// V1, V2 of the transformed spectral problems on the refined march grid.
struct TransformedPotentials {
  double x0 = 0, hf = 0;  // fine spacing
  int refine = 1;
  cvec v, dv;             // refined samples
  std::vector<Mat2> V1, V2;

  static TransformedPotentials build(const PotentialField& p, int refine);
  double trace_defect() const;
};

Mat2 T1(cplx v, cplx k);
Mat2 T2(cplx v, cplx k);

// Principal branch k = sqrt(z): k > 0 for z > 0, k = i sqrt(|z|) for z < 0.
cplx principal_k(cplx z);

struct JostColumn {
  cvec c1, c2;
};

struct JostSlice {
  int node = 0;  // coarse lattice index
  double x = 0;
  JostColumn m_minus, m_plus, n_minus, n_plus;
};

struct JostOptions {
  int refine = 4;
  rvec probes;                 // extra x positions, snapped to coarse nodes
  bool enforce_admissibility = true;
};

struct JostSolution {
  Lattice xgrid;
  cvec z;
  int refine = 4;
  std::vector<JostSlice> slices;  // slices[0] is x = 0
  JostColumn m_minus_right, n_minus_right;  // values at x = +L
  JostColumn m_plus_left, n_plus_left;      // values at x = -L
  cvec a_integral, B_integral;              // integral representations along the m_- march
  rvec nu_minus, nu_plus;
  cvec mu_minus, mu_plus;
  cplx v_origin = 0.0;

  const JostSlice& slice_at(double x) const;
  double neumann_bound_n() const;  // e^{||V2||_1}
  double v2_l1 = 0, v1_l1 = 0;
};

JostSolution solve_jost(const PotentialField& p, const cvec& z, const JostOptions& opt = {});

struct Profiles {
  rvec nu_minus, nu_plus;
  cvec mu_minus, mu_plus;
};
Profiles asymptotic_profiles(const PotentialField& p);

struct ScatteringData {
  Lattice zgrid;
  rvec z;
  cvec a, B;  // B = 2 k b
  cvec b, r;  // on the principal k branch
  cvec r_plus, r_minus;
  double nu = 0;
  double t = 0;
  double integral_mismatch = 0;

  cplx k(int j) const { return principal_k(z[j]); }
  int size() const { return static_cast<int>(z.size()); }
};

struct ScatteringOptions {
  JostOptions jost;
  double a_floor = 1e-6;
};

ScatteringData scattering_coefficients(const JostSolution& j, const PotentialField& p, double a_floor = 1e-6);
ScatteringData direct_transform(const PotentialField& p, const Lattice& zgrid, const ScatteringOptions& opt = {});

// Checks on a given slice set.
struct SymmetryReport {
  double conjugation_defect = 0;  // phi_pm(x;k) vs sigma1 sigma3 conj(phi_pm(x;-conj k))
  double parity_defect = 0;       // odd/even parts of the phi components
  double wronskian_defect = 0;    // W[phi_pm, phi_pm] - 1
  double r_parity_defect = 0;     // |r(-k) + r(k)|
};
SymmetryReport verify_symmetries(const JostSolution& j, const PotentialField& p);

struct UnimodularityReport {
  double real_k = 0;       // max | |a|^2 - |b|^2 - 1 | over z > 0
  double imaginary_k = 0;  // max | |a|^2 + |b|^2 - 1 | over z < 0
  double reflection_floor = 0;  // min (1 - |r|^2) over z > 0
};
UnimodularityReport unimodularity(const ScatteringData& s);

// r(k) as k -> 0, by polynomial extrapolation from small real k.
cplx reflection_origin_limit(const PotentialField& p, const JostOptions& opt = {});

}  // namespace mtist::direct

#pragma once

#include "mtist/rh.hpp"

namespace mtist::recon {

using direct::ScatteringData;
using numerics::Lattice;

// g_v = v e^{-2i nu_+}, g_dv = conj(v_x) e^{2i nu_+}
struct GaugePair {
  rvec x;
  cvec g_v, g_dv;
};

// Quadratures at a single x from solved columns.
void gauge_at(const rh::RHSolver& solver, const rh::Columns& c, cplx& g_v, cplx& g_dv);

GaugePair reconstruct_v_positive(const rh::RHSolution& sol, const ScatteringData& s, double t);
GaugePair reconstruct_v_negative(const rh::RHSolution& sol, const ScatteringData& s, double t);

struct Phase {
  cvec v;
  rvec nu_plus;
  double self_consistency = 0;
};
Phase recover_phase(const cvec& g_v, double h);

// u e^{2i nu_+} = i int_{+L}^x v e^{2i nu_+}
cvec reconstruct_u(const cvec& v, const rvec& nu_plus, double h);
// u = -i v_t + v int_x^L d_t |v|^2, v_t by central difference
cvec reconstruct_u_secondary(const cvec& v_minus, const cvec& v, const cvec& v_plus, double dt, double h);

double mt1_residual(const cvec& v, const cvec& u, double h);  // sup |i u_x + v - |v|^2 u|
double mt2_residual(const cvec& v_minus, const cvec& v_plus, const cvec& u, const cvec& v, double dt);

struct ReconstructedState {
  double t = 0;
  Lattice grid;
  cvec v, u, dv;
  rvec nu_plus;
  cvec g_v, g_dv;
  double residual_mt1 = 0;
  double residual_mt2 = -1;  // negative until a time stencil is available
  double seam = 0;           // |v| mismatch of the two branches at x = 0
  double tail_estimate = 0;
  double rh_residual = 0;
  int rh_iterations = 0;
  bool dense_used = false;
};

struct InverseOptions {
  rh::RHOptions rh;
  double unresolved_limit = 1e-2;
};

ReconstructedState inverse_transform(const ScatteringData& s, const Lattice& grid, double t,
                                     const InverseOptions& opt = {});

}  // namespace mtist::recon

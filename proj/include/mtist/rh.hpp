#pragma once

#include <memory>

#include "mtist/direct.hpp"

namespace mtist::rh {

using direct::ScatteringData;
using numerics::Lattice;

// r_pm(t; z) = r_pm(z) e^{i t / z}
void evolve_reflection(const ScatteringData& s, double t, cvec& r_plus, cvec& r_minus);

struct JumpData {
  rvec z;
  double x = 0, t = 0;
  cvec r_plus, r_minus;
  std::vector<Mat2> R;  // z form
  std::vector<Mat2> S;  // k form
  std::vector<Mat2> tau1, tau2;
  double tau_defect = 0;  // max over nodes of |tau1^-1 R tau1 - S|, |tau2^-1 R tau2 - S|
};

JumpData assemble_jump(const ScatteringData& s, double x, double t);

struct DeltaData {
  rvec z;
  cvec delta_plus, delta_minus;
  cvec r_plus_delta, r_minus_delta;
  std::vector<Mat2> R_delta;  // at x = 0
  double modulus_defect = 0;  // max | |delta_+ delta_-| - 1 |
  double jump_residual = 0;   // max |delta_+ - delta_- (1 + conj(r_+) r_-)|
  double edge_defect = 0;     // max |delta_pm - 1| at the two end nodes
};

DeltaData solve_scalar_delta(const ScatteringData& s, double t, numerics::ProjectorOptions popt = {false});

enum class Branch { positive, negative };

struct RHOptions {
  double tol = 1e-11;       // fixed-point increment target
  double residual_tol = 1e-9;
  int max_iter = 300;
  double damping = 0.8;
  int anderson = 5;
  bool dense_fallback = true;
  int dense_max = 1024;
  numerics::ProjectorOptions projector{false};
};

// Columns at one x. Positive branch: xi = xi_-, eta = eta_+.
// Negative branch: xi = xi_{+,delta}, eta = eta_{-,delta}.
struct Columns {
  double x = 0;
  cvec xi1, xi2, eta1, eta2;
  double residual = 0;
  int iterations = 0;
  bool dense = false;
};

class RHSolver {
 public:
  RHSolver(const ScatteringData& s, double t, Branch branch, RHOptions opt = {});

  Columns solve(double x) const;
  // max entry of Phi_+ - Phi_- - Phi_- R at x; positive branch only
  double jump_audit(const Columns& c) const;

  Branch branch() const { return branch_; }
  const rvec& z() const { return z_; }
  double dz() const { return dz_; }
  // reflection data entering the system (time evolved, delta modified on the negative branch)
  const cvec& r_plus() const { return rp_; }
  const cvec& r_minus() const { return rm_; }
  const DeltaData* delta() const { return delta_.get(); }
  const numerics::CauchyProjector& projector() const { return P_; }

 private:
  struct Dense;
  cvec apply_a(const cvec& f) const;  // outer projection of the xi equation
  cvec apply_b(const cvec& f) const;  // projection of the eta equation
  void solve_component(const cvec& A, const cvec& Bc, double cx, double cy, cvec& X, cvec& Y, int& iters,
                       bool& dense) const;
  double system_residual(const cvec& A, const cvec& Bc, double cx, double cy, const cvec& X, const cvec& Y) const;

  Branch branch_;
  RHOptions opt_;
  rvec z_;
  double dz_ = 0;
  cvec rp_, rm_;
  std::unique_ptr<DeltaData> delta_;
  numerics::CauchyProjector P_;
  mutable std::shared_ptr<Dense> dense_;
};

struct RHSolution {
  Branch branch = Branch::positive;
  rvec z;
  std::vector<Columns> columns;
  double max_residual = 0;
  int max_iterations = 0;
};

RHSolution solve_rh_positive(const ScatteringData& s, const rvec& xs, double t, const RHOptions& opt = {});
RHSolution solve_rh_negative(const ScatteringData& s, const rvec& xs, double t, const RHOptions& opt = {});

// Fraction of the weight of |r_+|^2 lying where the phase e^{it/z} is not resolved by the z spacing.
double unresolved_weight(const ScatteringData& s, double t);

}  // namespace mtist::rh

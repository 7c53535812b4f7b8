#pragma once

#include <functional>

#include "mtist/fields.hpp"

namespace mtist::oracle {

using numerics::Lattice;

struct MTState {
  double t = 0;
  cvec v, u;
};

enum class Closure {
  right,      // u(+L) = 0
  mean_free,  // u(+L) = u(-L) = 0 by removing the lattice mean of v e^{2i nu_+}
  symmetric,  // average of the right and left anchored antiderivatives
};

struct SlaveOptions {
  Closure closure = Closure::symmetric;
};

// u_x = -i(|v|^2 u - v), u(+L) = 0, RK4 on the lattice with band-limited midpoints.
cvec slave_u(const cvec& v, double h, const SlaveOptions& opt = {});
// Same ODE with an arbitrary source s in place of v; s_mid holds the half-node values.
cvec slave_with_source(const cvec& v, const cvec& v_mid, const cvec& s, const cvec& s_mid, double h);

struct OracleOptions {
  double dt = 1e-3;
  SlaveOptions slave;
};

MTState make_state(const cvec& v, double h, double t = 0, const SlaveOptions& opt = {});
MTState step_v(const MTState& s, double h, double dt, const SlaveOptions& opt = {});

// Advances to T in steps of dt; observer sees every state including the first.
MTState integrate(const MTState& s0, double h, double T, const OracleOptions& opt,
                  const std::function<void(const MTState&)>& observer = {});

// Embeds samples on a lattice factor times wider with the same spacing, x = 0 kept at node n/2.
cvec embed(const cvec& v, int factor);
cvec window(const cvec& v, int n);  // central n samples
Lattice extended_lattice(const Lattice& g, int factor);

struct LawResidual {
  double sup = 0, l2 = 0;
};
struct ConservationReport {
  LawResidual mass;      // (|v|^2)_t + (|u|^2)_x
  LawResidual momentum;  // i(v conj(v_x))_t + (u conj(v))_x
  int samples = 0;
  int order = 2;  // formal order of the central stencils in dt and h
};

// Streaming central-difference residuals; feed states of uniform dt in order.
// order 2 uses 3-point stencils, order 4 the 5-point ones.
class ConservationMonitor {
 public:
  ConservationMonitor(double h, double dt, int margin = 0, int order = 2);
  void push(const MTState& s);
  const ConservationReport& report() const { return rep_; }

 private:
  double h_, dt_;
  int margin_;  // nodes skipped at each end
  std::vector<MTState> last_;
  ConservationReport rep_;
  double mass_sq_ = 0, mom_sq_ = 0;
};

ConservationReport conservation_residuals(const std::vector<MTState>& history, double h, int margin = 0,
                                          int order = 2);

struct DressingCoefficients {
  // index 0: anchored at -L, 1: anchored at +L
  std::vector<Mat2> J0[2], J1[2], J2[2];
  double unit_det_defect = 0;    // max |det J0 - 1|
  double recurrence_defect = 0;  // max |d_x J0 + (i/2) V^2 sigma3 J0|
  double structure_defect = 0;   // off-diagonal part of J0, J2 and diagonal part of J1
};

DressingCoefficients dressing_coefficients(const MTState& s, double h);

}  // namespace mtist::oracle

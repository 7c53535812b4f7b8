#include "mtist/recon.hpp"

#include <cmath>

namespace mtist::recon {

void gauge_at(const rh::RHSolver& solver, const rh::Columns& c, cplx& g_v, cplx& g_dv) {
  const auto& z = solver.z();
  const auto& rp = solver.r_plus();
  const auto& rm = solver.r_minus();
  const double dz = solver.dz();
  cplx a = 0.0, b = 0.0;
  for (size_t q = 0; q < z.size(); ++q) {
    const cplx e = std::exp(I * z[q] * c.x);
    a += std::conj(rp[q]) / e * c.xi1[q];
    b += rm[q] * e * c.eta2[q];
  }
  g_v = a * dz / (I * PI);
  g_dv = b * dz / (4.0 * PI);
}

namespace {

GaugePair from_solution(const rh::RHSolution& sol, const ScatteringData& s, double t, rh::Branch b) {
  if (sol.branch != b) throw PreconditionError("RH solution belongs to the other branch");
  rh::RHOptions o;
  rh::RHSolver solver(s, t, b, o);
  GaugePair g;
  for (const auto& c : sol.columns) {
    cplx a, d;
    gauge_at(solver, c, a, d);
    g.x.push_back(c.x);
    g.g_v.push_back(a);
    g.g_dv.push_back(d);
  }
  return g;
}

}  // namespace

GaugePair reconstruct_v_positive(const rh::RHSolution& sol, const ScatteringData& s, double t) {
  return from_solution(sol, s, t, rh::Branch::positive);
}

GaugePair reconstruct_v_negative(const rh::RHSolution& sol, const ScatteringData& s, double t) {
  return from_solution(sol, s, t, rh::Branch::negative);
}

Phase recover_phase(const cvec& g_v, double h) {
  Phase p;
  p.nu_plus = fields::nu_plus(g_v, h);
  p.v.resize(g_v.size());
  for (size_t j = 0; j < g_v.size(); ++j) p.v[j] = g_v[j] * std::exp(2.0 * I * p.nu_plus[j]);
  rvec again = fields::nu_plus(p.v, h);
  for (size_t j = 0; j < g_v.size(); ++j)
    p.self_consistency = std::max(p.self_consistency, std::abs(again[j] - p.nu_plus[j]));
  return p;
}

cvec reconstruct_u(const cvec& v, const rvec& nu_plus, double h) {
  const size_t n = v.size();
  cvec w(n);
  for (size_t j = 0; j < n; ++j) w[j] = v[j] * std::exp(2.0 * I * nu_plus[j]);
  cvec c = numerics::cumulative_to_right(w, h);
  cvec u(n);
  for (size_t j = 0; j < n; ++j) u[j] = -I * std::exp(-2.0 * I * nu_plus[j]) * c[j];
  return u;
}

cvec reconstruct_u_secondary(const cvec& v_minus, const cvec& v, const cvec& v_plus, double dt, double h) {
  if (v_minus.size() != v.size() || v_plus.size() != v.size())
    throw PreconditionError("secondary u path needs states at t - dt and t + dt on the same grid");
  const size_t n = v.size();
  cvec vt(n);
  rvec dens(n);
  for (size_t j = 0; j < n; ++j) {
    vt[j] = (v_plus[j] - v_minus[j]) / (2 * dt);
    dens[j] = (std::norm(v_plus[j]) - std::norm(v_minus[j])) / (2 * dt);
  }
  rvec c = numerics::cumulative_to_right(dens, h);
  cvec u(n);
  for (size_t j = 0; j < n; ++j) u[j] = -I * vt[j] + v[j] * c[j];
  return u;
}

double mt1_residual(const cvec& v, const cvec& u, double h) {
  cvec ux = numerics::fd_derivative(u, h);
  double r = 0;
  for (size_t j = 0; j < v.size(); ++j) r = std::max(r, std::abs(I * ux[j] + v[j] - std::norm(v[j]) * u[j]));
  return r;
}

double mt2_residual(const cvec& v_minus, const cvec& v_plus, const cvec& u, const cvec& v, double dt) {
  double r = 0;
  for (size_t j = 0; j < v.size(); ++j) {
    const cplx vt = (v_plus[j] - v_minus[j]) / (2 * dt);
    r = std::max(r, std::abs(I * vt + u[j] - std::norm(u[j]) * v[j]));
  }
  return r;
}

ReconstructedState inverse_transform(const ScatteringData& s, const Lattice& grid, double t, const InverseOptions& opt) {
  if (grid.n < 8 || grid.n % 2) throw DomainError("reconstruction grid must have an even node count");
  const double uw = rh::unresolved_weight(s, t);
  if (uw > opt.unresolved_limit)
    throw ConvergenceError("phase e^{it/z} is unresolved near z = 0 at t = " + std::to_string(t) + " (weight " +
                           std::to_string(uw) + "); refine the z spacing or enable refine_origin");
  const int n = grid.n, o = n / 2;
  ReconstructedState st;
  st.t = t;
  st.grid = grid;
  st.g_v.assign(n, 0.0);
  st.g_dv.assign(n, 0.0);
  if (sup_abs(s.r_plus) == 0.0 && sup_abs(s.r_minus) == 0.0) {
    // no reflection: the columns are the identity and v vanishes
    st.v = st.u = st.dv = st.g_v;
    st.nu_plus.assign(n, 0.0);
    return st;
  }
  rh::RHSolver pos(s, t, rh::Branch::positive, opt.rh);
  rh::RHSolver neg(s, t, rh::Branch::negative, opt.rh);
  const double dz = pos.dz();
  auto account = [&](const rh::RHSolver& S, const rh::Columns& c) {
    st.rh_residual = std::max(st.rh_residual, c.residual);
    st.rh_iterations = std::max(st.rh_iterations, c.iterations);
    st.dense_used = st.dense_used || c.dense;
    const size_t last = S.z().size() - 1;
    double edge = 0;
    for (size_t q : {size_t(0), last}) {
      edge += std::abs(std::conj(S.r_plus()[q]) * c.xi1[q]);
      edge += 0.25 * std::abs(S.r_minus()[q] * c.eta2[q]);
    }
    st.tail_estimate = std::max(st.tail_estimate, edge * dz / PI);
  };
  cplx gv_neg0 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = j == o ? 0.0 : grid.at(j);
    const rh::RHSolver& S = j >= o ? pos : neg;
    auto c = S.solve(x);
    account(S, c);
    gauge_at(S, c, st.g_v[j], st.g_dv[j]);
    if (j == o) {
      auto cn = neg.solve(0.0);
      account(neg, cn);
      cplx d;
      gauge_at(neg, cn, gv_neg0, d);
    }
  }
  st.seam = std::abs(st.g_v[o] - gv_neg0);
  auto ph = recover_phase(st.g_v, grid.h);
  st.v = std::move(ph.v);
  st.nu_plus = std::move(ph.nu_plus);
  st.dv.resize(n);
  for (int j = 0; j < n; ++j) st.dv[j] = std::conj(st.g_dv[j] * std::exp(-2.0 * I * st.nu_plus[j]));
  st.u = reconstruct_u(st.v, st.nu_plus, grid.h);
  st.residual_mt1 = mt1_residual(st.v, st.u, grid.h);
  return st;
}

}  // namespace mtist::recon

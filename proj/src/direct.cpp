#include "mtist/direct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace mtist::direct {

TransformedPotentials TransformedPotentials::build(const PotentialField& p, int refine) {
  p.validate();
  if (refine < 1 || refine % 2) refine = std::max(2, refine + refine % 2);
  TransformedPotentials t;
  t.refine = refine;
  t.hf = p.grid.h / refine;
  t.x0 = p.grid.x0;
  t.v = numerics::refine(p.v, refine);
  t.dv = numerics::refine(p.dv, refine);
  const size_t N = t.v.size();
  t.V1.resize(N);
  t.V2.resize(N);
  for (size_t j = 0; j < N; ++j) {
    const cplx v = t.v[j], vx = t.dv[j];
    const double a2 = std::norm(v);
    t.V1[j] = {0.5 * I * a2, -0.5 * I * v, 2.0 * std::conj(vx), -0.5 * I * a2};
    t.V2[j] = {0.5 * I * a2, 2.0 * vx, 0.5 * I * std::conj(v), -0.5 * I * a2};
  }
  return t;
}

double TransformedPotentials::trace_defect() const {
  double d = 0;
  for (size_t j = 0; j < V1.size(); ++j)
    d = std::max({d, std::abs(V1[j][0] + V1[j][3]), std::abs(V2[j][0] + V2[j][3])});
  return d;
}

Mat2 T1(cplx v, cplx k) { return {1.0, 0.0, 2.0 * std::conj(v), 2.0 * k}; }
Mat2 T2(cplx v, cplx k) { return {2.0 * k, 2.0 * v, 0.0, 1.0}; }

cplx principal_k(cplx z) {
  if (z.imag() == 0.0) return z.real() >= 0 ? cplx(std::sqrt(z.real()), 0.0) : cplx(0.0, std::sqrt(-z.real()));
  return std::sqrt(z);
}

namespace {

struct MarchOut {
  std::map<int, JostColumn> stored;  // fine index -> physical column
  cvec qa, qB;
};

// RK4 in the interaction picture w' = A(x) w. The three stages of a step of
// length 2 hf sit on consecutive fine nodes, so no interpolation is needed.
MarchOut march(const TransformedPotentials& tp, bool first_kind, bool rightward, const cvec& z,
               const std::set<int>& want, bool integrals) {
  const int N = static_cast<int>(tp.v.size());
  const int nz = static_cast<int>(z.size());
  const auto& V = first_kind ? tp.V1 : tp.V2;
  const double hf = tp.hf;
  const double hh = rightward ? 2 * hf : -2 * hf;
  const int dir = rightward ? 1 : -1;
  auto xnode = [&](int j) { return tp.x0 + j * hf; };

  cvec w0(nz), w1(nz), E(nz), Ei(nz), rot(nz), roti(nz);
  for (int q = 0; q < nz; ++q) {
    w0[q] = first_kind ? 1.0 : 0.0;
    w1[q] = first_kind ? 0.0 : 1.0;
    rot[q] = std::exp(I * z[q] * (dir * hf));
    roti[q] = 1.0 / rot[q];
  }
  MarchOut out;
  if (integrals) {
    out.qa.assign(nz, 0.0);
    out.qB.assign(nz, 0.0);
  }
  auto store = [&](int j) {
    if (!want.count(j)) return;
    JostColumn c{cvec(nz), cvec(nz)};
    for (int q = 0; q < nz; ++q) {
      if (first_kind) {
        c.c1[q] = w0[q];
        c.c2[q] = w1[q] * E[q];
      } else {
        c.c1[q] = w0[q] * Ei[q];
        c.c2[q] = w1[q];
      }
    }
    out.stored[j] = std::move(c);
  };
  auto resync = [&](int j) {
    for (int q = 0; q < nz; ++q) {
      E[q] = std::exp(I * z[q] * xnode(j));
      Ei[q] = 1.0 / E[q];
    }
  };

  int j = rightward ? 0 : N;
  resync(j);
  store(j);
  const int steps = N / 2;
  for (int s = 0; s < steps; ++s) {
    const int jb = j + dir, jc = j + 2 * dir;
    const Mat2& Va = V[j % N];
    const Mat2& Vb = V[jb % N];
    const Mat2& Vc = V[jc % N];
    const cplx va = tp.v[j % N], vb = tp.v[jb % N], vc = tp.v[jc % N];
    for (int q = 0; q < nz; ++q) {
      const cplx Ea = E[q], Eia = Ei[q];
      const cplx Eb = Ea * rot[q], Eib = Eia * roti[q];
      const cplx Ec = Eb * rot[q], Eic = Eib * roti[q];
      const cplx a12 = Va[1] * Ea, a21 = Va[2] * Eia;
      const cplx b12 = Vb[1] * Eb, b21 = Vb[2] * Eib;
      const cplx c12 = Vc[1] * Ec, c21 = Vc[2] * Eic;
      const cplx x0 = w0[q], x1 = w1[q];
      const cplx k10 = Va[0] * x0 + a12 * x1, k11 = a21 * x0 + Va[3] * x1;
      const cplx s20 = x0 + 0.5 * hh * k10, s21 = x1 + 0.5 * hh * k11;
      const cplx k20 = Vb[0] * s20 + b12 * s21, k21 = b21 * s20 + Vb[3] * s21;
      const cplx s30 = x0 + 0.5 * hh * k20, s31 = x1 + 0.5 * hh * k21;
      const cplx k30 = Vb[0] * s30 + b12 * s31, k31 = b21 * s30 + Vb[3] * s31;
      const cplx s40 = x0 + hh * k30, s41 = x1 + hh * k31;
      const cplx k40 = Vc[0] * s40 + c12 * s41, k41 = c21 * s40 + Vc[3] * s41;
      w0[q] = x0 + hh / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40);
      w1[q] = x1 + hh / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41);
      if (integrals) {
        const cplx zq = z[q];
        auto ga = [&](cplx v, cplx e, cplx p0, cplx p1) { return 0.5 * I * (std::norm(v) * p0 - v * e * p1); };
        auto gB = [&](cplx v, cplx ei, cplx p0, cplx p1) {
          const double a2 = std::norm(v);
          return 0.5 * I * ((4.0 * zq * std::conj(v) - 2.0 * a2 * std::conj(v)) * p0 * ei + a2 * p1);
        };
        out.qa[q] += hh / 6.0 * (ga(va, Ea, x0, x1) + 2.0 * ga(vb, Eb, s20, s21) + 2.0 * ga(vb, Eb, s30, s31) +
                                 ga(vc, Ec, s40, s41));
        out.qB[q] += hh / 6.0 * (gB(va, Eia, x0, x1) + 2.0 * gB(vb, Eib, s20, s21) + 2.0 * gB(vb, Eib, s30, s31) +
                                 gB(vc, Eic, s40, s41));
      }
      E[q] = Ec;
      Ei[q] = Eic;
    }
    j = jc;
    if (s % 32 == 31) resync(j);
    store(j);
  }
  return out;
}

double entry_l1(const std::vector<Mat2>& V, double hf) {
  double s = 0;
  for (const auto& m : V)
    for (const auto& e : m) s += std::abs(e);
  return s * hf;
}

}  // namespace

const JostSlice& JostSolution::slice_at(double x) const {
  const JostSlice* best = nullptr;
  for (const auto& s : slices)
    if (!best || std::abs(s.x - x) < std::abs(best->x - x)) best = &s;
  if (!best) throw DomainError("Jost solution holds no slices");
  return *best;
}

double JostSolution::neumann_bound_n() const { return std::exp(v2_l1); }

Profiles asymptotic_profiles(const PotentialField& p) {
  p.validate();
  const int n = p.grid.n;
  const double h = p.grid.h;
  rvec a2(n);
  cvec vb(n);
  for (int j = 0; j < n; ++j) {
    a2[j] = std::norm(p.v[j]);
    vb[j] = std::conj(p.v[j]) * p.dv[j];
  }
  Profiles pr;
  pr.nu_minus = numerics::cumulative_from_left(a2, h);
  pr.nu_plus = numerics::cumulative_to_right(a2, h);
  for (auto& x : pr.nu_minus) x *= 0.5;
  for (auto& x : pr.nu_plus) x *= -0.5;
  pr.mu_minus = numerics::cumulative_from_left(vb, h);
  pr.mu_plus = numerics::cumulative_to_right(vb, h);
  for (auto& x : pr.mu_plus) x = -x;
  return pr;
}

JostSolution solve_jost(const PotentialField& p, const cvec& z, const JostOptions& opt) {
  p.validate();
  if (opt.enforce_admissibility) {
    auto adm = fields::check_admissibility(p);
    if (!adm.volterra_contractive)
      throw AdmissibilityError("Volterra operators are not contractive: lambda_plus = " + std::to_string(adm.lambda_plus));
  }
  const auto tp = TransformedPotentials::build(p, opt.refine);
  const int n = p.grid.n, R = tp.refine, N = n * R;
  std::vector<int> coarse{n / 2};
  for (double x : opt.probes) {
    int c = static_cast<int>(std::lround((x - p.grid.x0) / p.grid.h));
    c = std::clamp(c, 0, n - 1);
    if (std::find(coarse.begin(), coarse.end(), c) == coarse.end()) coarse.push_back(c);
  }
  std::set<int> want;
  for (int c : coarse) want.insert(c * R);
  std::set<int> want_right = want, want_left = want;
  want_right.insert(N);
  want_left.insert(0);

  auto mm = march(tp, true, true, z, want_right, true);
  auto mp = march(tp, true, false, z, want_left, false);
  auto nm = march(tp, false, true, z, want_right, false);
  auto np = march(tp, false, false, z, want_left, false);

  JostSolution js;
  js.xgrid = p.grid;
  js.z = z;
  js.refine = R;
  for (int c : coarse) {
    int f = c * R;
    js.slices.push_back({c, p.grid.at(c), mm.stored.at(f), mp.stored.at(f), nm.stored.at(f), np.stored.at(f)});
  }
  js.m_minus_right = mm.stored.at(N);
  js.n_minus_right = nm.stored.at(N);
  js.m_plus_left = mp.stored.at(0);
  js.n_plus_left = np.stored.at(0);
  js.a_integral = mm.qa;
  for (auto& x : js.a_integral) x += 1.0;
  js.B_integral = mm.qB;
  auto pr = asymptotic_profiles(p);
  js.nu_minus = pr.nu_minus;
  js.nu_plus = pr.nu_plus;
  js.mu_minus = pr.mu_minus;
  js.mu_plus = pr.mu_plus;
  js.v_origin = p.v[n / 2];
  js.v1_l1 = entry_l1(tp.V1, tp.hf);
  js.v2_l1 = entry_l1(tp.V2, tp.hf);
  return js;
}

ScatteringData scattering_coefficients(const JostSolution& js, const PotentialField& p, double a_floor) {
  const auto& s0 = js.slices.at(0);
  if (std::abs(s0.x) > 1e-12) throw DomainError("first Jost slice must sit at x = 0");
  const int nz = static_cast<int>(js.z.size());
  ScatteringData s;
  s.z.resize(nz);
  s.a.resize(nz);
  s.B.resize(nz);
  s.b.resize(nz);
  s.r.resize(nz);
  s.r_plus.resize(nz);
  s.r_minus.resize(nz);
  const cplx v0 = js.v_origin;
  double amin = 1e300;
  for (int q = 0; q < nz; ++q) {
    if (js.z[q].imag() != 0.0) throw DomainError("scattering data needs real spectral samples");
    const double z = js.z[q].real();
    if (z == 0.0) throw DomainError("spectral lattice contains z = 0");
    const cplx m1m = s0.m_minus.c1[q], m2m = s0.m_minus.c2[q];
    const cplx m1p = s0.m_plus.c1[q], m2p = s0.m_plus.c2[q];
    const cplx n1p = s0.n_plus.c1[q], n2p = s0.n_plus.c2[q];
    const cplx a = m1m * n2p - (-2.0 * std::conj(v0) * m1m + m2m) * (n1p - 2.0 * v0 * n2p) / (4.0 * z);
    const cplx B = m1p * m2m - m2p * m1m;
    const cplx k = principal_k(z);
    s.z[q] = z;
    s.a[q] = a;
    s.B[q] = B;
    s.b[q] = B / (2.0 * k);
    s.r[q] = s.b[q] / a;
    s.r_minus[q] = B / a;
    s.r_plus[q] = -B / (4.0 * z * a);
    amin = std::min(amin, std::abs(a));
    s.integral_mismatch = std::max({s.integral_mismatch, std::abs(a - js.a_integral[q]), std::abs(B - js.B_integral[q])});
  }
  if (amin < a_floor)
    throw ConvergenceError("scattering coefficient a nearly vanishes on the lattice (min |a| = " + std::to_string(amin) + ")");
  fields::NormReport nr = fields::norms(p);
  s.nu = 0.5 * nr.l2 * nr.l2;
  if (nz >= 2) s.zgrid = {s.z[0], s.z[1] - s.z[0], nz};
  return s;
}

ScatteringData direct_transform(const PotentialField& p, const Lattice& zgrid, const ScatteringOptions& opt) {
  cvec z(zgrid.n);
  for (int q = 0; q < zgrid.n; ++q) z[q] = zgrid.at(q);
  if (sup_abs(p.v) == 0.0) {
    // the free Jost functions are exact: a = 1, b = 0
    p.validate();
    ScatteringData s;
    s.zgrid = zgrid;
    s.z.resize(zgrid.n);
    for (int q = 0; q < zgrid.n; ++q) s.z[q] = zgrid.at(q);
    s.a.assign(zgrid.n, 1.0);
    s.B.assign(zgrid.n, 0.0);
    s.b = s.r = s.r_plus = s.r_minus = s.B;
    return s;
  }
  auto js = solve_jost(p, z, opt.jost);
  auto s = scattering_coefficients(js, p, opt.a_floor);
  s.zgrid = zgrid;
  return s;
}

SymmetryReport verify_symmetries(const JostSolution& js, const PotentialField& p) {
  SymmetryReport rep;
  const int nz = static_cast<int>(js.z.size());
  for (const auto& sl : js.slices) {
    const cplx v = p.v[sl.node];
    for (int side = 0; side < 2; ++side) {
      const auto& m = side ? sl.m_plus : sl.m_minus;
      const auto& nn = side ? sl.n_plus : sl.n_minus;
      for (int q = 0; q < nz; ++q) {
        const cplx z = js.z[q];
        const cplx k = principal_k(z);
        // phi = (m1, (-2 conj(v) m1 + m2)/(2k)), varphi = ((n1 - 2 v n2)/(2k), n2)
        const cplx phi1 = m.c1[q], phi2 = (-2.0 * std::conj(v) * m.c1[q] + m.c2[q]) / (2.0 * k);
        const cplx psi1 = (nn.c1[q] - 2.0 * v * nn.c2[q]) / (2.0 * k), psi2 = nn.c2[q];
        const cplx W = phi1 * psi2 - phi2 * psi1;
        rep.wronskian_defect = std::max(rep.wronskian_defect, std::abs(W - 1.0));
        if (z.imag() != 0.0) continue;
        // phi at -conj(k): same z, k -> -conj(k)
        const cplx km = -std::conj(k);
        const cplx f1 = m.c1[q], f2 = (-2.0 * std::conj(v) * m.c1[q] + m.c2[q]) / (2.0 * km);
        // sigma1 sigma3 = [[0,-1],[1,0]]
        const cplx g1 = -std::conj(f2), g2 = std::conj(f1);
        rep.conjugation_defect = std::max({rep.conjugation_defect, std::abs(psi1 - g1), std::abs(psi2 - g2)});
        // parity in k: phi^(2)(-k) = -phi^(2)(k), varphi^(1)(-k) = -varphi^(1)(k)
        const cplx phi2m = (-2.0 * std::conj(v) * m.c1[q] + m.c2[q]) / (-2.0 * k);
        const cplx psi1m = (nn.c1[q] - 2.0 * v * nn.c2[q]) / (-2.0 * k);
        rep.parity_defect = std::max({rep.parity_defect, std::abs(phi2m + phi2), std::abs(psi1m + psi1)});
      }
    }
  }
  if (!js.slices.empty() && std::abs(js.slices[0].x) < 1e-12) {
    bool real = std::all_of(js.z.begin(), js.z.end(), [](cplx z) { return z.imag() == 0.0 && z.real() != 0.0; });
    if (real) {
      auto s = scattering_coefficients(js, p, 0.0);
      for (int q = 0; q < nz; ++q) {
        const cplx k = s.k(q);
        const cplx rm = (s.B[q] / (2.0 * (-k))) / s.a[q];
        rep.r_parity_defect = std::max(rep.r_parity_defect, std::abs(rm + s.r[q]));
      }
    }
  }
  return rep;
}

UnimodularityReport unimodularity(const ScatteringData& s) {
  UnimodularityReport u;
  u.reflection_floor = 1e300;
  for (int q = 0; q < s.size(); ++q) {
    const double z = s.z[q];
    const double b2 = std::norm(s.B[q]) / (4 * std::abs(z));
    const double a2 = std::norm(s.a[q]);
    if (z > 0) {
      u.real_k = std::max(u.real_k, std::abs(a2 - b2 - 1));
      u.reflection_floor = std::min(u.reflection_floor, 1 - b2 / a2);
    } else {
      u.imaginary_k = std::max(u.imaginary_k, std::abs(a2 + b2 - 1));
    }
  }
  return u;
}

cplx reflection_origin_limit(const PotentialField& p, const JostOptions& opt) {
  const int m = 5;
  rvec k(m);
  cvec z(m);
  for (int j = 0; j < m; ++j) {
    k[j] = 0.005 * (j + 1);
    z[j] = k[j] * k[j];
  }
  JostOptions o = opt;
  o.probes.clear();
  o.refine = std::max(o.refine, 8);  // keeps the z = 0 residual of B far below k
  auto js = solve_jost(p, z, o);
  auto s = scattering_coefficients(js, p, 0.0);
  // Neville at k = 0
  cvec P(s.r.begin(), s.r.end());
  for (int lvl = 1; lvl < m; ++lvl)
    for (int i = 0; i + lvl < m; ++i)
      P[i] = ((0.0 - k[i + lvl]) * P[i] - (0.0 - k[i]) * P[i + 1]) / (k[i] - k[i + lvl]);
  return P[0];
}

}  // namespace mtist::direct

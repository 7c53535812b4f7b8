#include "mtist/rh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>

namespace mtist::rh {

namespace {

Lattice z_lattice(const ScatteringData& s) {
  if (s.size() < 8) throw DomainError("scattering data needs at least 8 spectral samples");
  for (double z : s.z)
    if (z == 0.0) throw DomainError("spectral lattice contains z = 0");
  Lattice g = s.zgrid;
  if (g.n != s.size()) g = {s.z[0], s.z[1] - s.z[0], s.size()};
  return g;
}

Mat2 diag(cplx a, cplx b) { return {a, 0.0, 0.0, b}; }
Mat2 inv_diag(const Mat2& d) { return {1.0 / d[0], 0.0, 0.0, 1.0 / d[3]}; }

double mat_diff(const Mat2& a, const Mat2& b) {
  double m = 0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

void evolve_reflection(const ScatteringData& s, double t, cvec& r_plus, cvec& r_minus) {
  r_plus = s.r_plus;
  r_minus = s.r_minus;
  if (t == 0.0) return;
  for (int q = 0; q < s.size(); ++q) {
    if (s.z[q] == 0.0) throw DomainError("spectral lattice contains z = 0");
    const cplx ph = std::exp(I * (t / s.z[q]));
    r_plus[q] *= ph;
    r_minus[q] *= ph;
  }
}

JumpData assemble_jump(const ScatteringData& s, double x, double t) {
  z_lattice(s);
  JumpData J;
  J.z = s.z;
  J.x = x;
  J.t = t;
  evolve_reflection(s, t, J.r_plus, J.r_minus);
  const int nz = s.size();
  J.R.resize(nz);
  J.S.resize(nz);
  J.tau1.resize(nz);
  J.tau2.resize(nz);
  for (int q = 0; q < nz; ++q) {
    const double z = s.z[q];
    const cplx e = std::exp(I * z * x);
    const cplx rp = J.r_plus[q], rm = J.r_minus[q];
    J.R[q] = {std::conj(rp) * rm, std::conj(rp) / e, rm * e, 0.0};
    const cplx k = s.k(q);
    const cplx r = s.r[q] * (t == 0.0 ? cplx(1.0) : std::exp(I * (t / z)));
    const double r2 = std::norm(r);
    if (z > 0)
      J.S[q] = {-r2, -std::conj(r) / e, r * e, 0.0};
    else
      J.S[q] = {r2, std::conj(r) / e, r * e, 0.0};
    J.tau1[q] = diag(1.0, 2.0 * k);
    J.tau2[q] = diag(1.0 / (2.0 * k), 1.0);
    const Mat2 a = matmul(inv_diag(J.tau1[q]), matmul(J.R[q], J.tau1[q]));
    const Mat2 b = matmul(inv_diag(J.tau2[q]), matmul(J.R[q], J.tau2[q]));
    J.tau_defect = std::max({J.tau_defect, mat_diff(a, J.S[q]), mat_diff(b, J.S[q])});
  }
  if (J.tau_defect > 1e-12 * std::max(1.0, sup_abs(J.r_minus)))
    throw DomainError("jump assembly: tau conjugation identity fails (" + std::to_string(J.tau_defect) + ")");
  return J;
}

DeltaData solve_scalar_delta(const ScatteringData& s, double t, numerics::ProjectorOptions popt) {
  const Lattice g = z_lattice(s);
  DeltaData D;
  D.z = s.z;
  cvec rp, rm;
  evolve_reflection(s, t, rp, rm);
  const int nz = s.size();
  cvec lg(nz), jump(nz);
  for (int q = 0; q < nz; ++q) {
    jump[q] = 1.0 + std::conj(rp[q]) * rm[q];
    if (jump[q].real() <= 0.0)
      throw DomainError("delta problem: 1 + conj(r_+) r_- leaves the right half plane, the logarithm branch is ambiguous");
    lg[q] = std::log(jump[q]);
  }
  numerics::CauchyProjector P(g, popt);
  cvec lp, lm;
  P.project_pair(lg, lp, lm);
  D.delta_plus.resize(nz);
  D.delta_minus.resize(nz);
  D.r_plus_delta.resize(nz);
  D.r_minus_delta.resize(nz);
  D.R_delta.resize(nz);
  for (int q = 0; q < nz; ++q) {
    const cplx dp = std::exp(lp[q]), dm = std::exp(lm[q]);
    D.delta_plus[q] = dp;
    D.delta_minus[q] = dm;
    const cplx c = std::conj(dp * dm);
    D.r_plus_delta[q] = c * rp[q];
    D.r_minus_delta[q] = c * rm[q];
    const cplx a = D.r_plus_delta[q], b = D.r_minus_delta[q];
    D.R_delta[q] = {std::conj(a) * b, std::conj(a), b, 0.0};
    D.modulus_defect = std::max(D.modulus_defect, std::abs(std::abs(dp * dm) - 1.0));
    D.jump_residual = std::max(D.jump_residual, std::abs(dp - dm * jump[q]));
  }
  for (int q : {0, nz - 1})
    D.edge_defect = std::max({D.edge_defect, std::abs(D.delta_plus[q] - 1.0), std::abs(D.delta_minus[q] - 1.0)});
  return D;
}

struct RHSolver::Dense {
  Eigen::MatrixXcd Pa, Pb;
};

RHSolver::RHSolver(const ScatteringData& s, double t, Branch branch, RHOptions opt)
    : branch_(branch), opt_(opt), z_(s.z) {
  const Lattice g = z_lattice(s);
  dz_ = g.h;
  P_ = numerics::CauchyProjector(g, opt_.projector);
  if (branch == Branch::positive) {
    evolve_reflection(s, t, rp_, rm_);
  } else {
    delta_ = std::make_unique<DeltaData>(solve_scalar_delta(s, t, opt_.projector));
    rp_ = delta_->r_plus_delta;
    rm_ = delta_->r_minus_delta;
  }
}

cvec RHSolver::apply_a(const cvec& f) const {
  return P_.project(f, branch_ == Branch::positive ? numerics::Projection::minus : numerics::Projection::plus);
}

cvec RHSolver::apply_b(const cvec& f) const {
  return P_.project(f, branch_ == Branch::positive ? numerics::Projection::plus : numerics::Projection::minus);
}

double RHSolver::system_residual(const cvec& A, const cvec& Bc, double cx, double cy, const cvec& X,
                                 const cvec& Y) const {
  const size_t nz = X.size();
  cvec u(nz), w(nz);
  for (size_t q = 0; q < nz; ++q) {
    u[q] = A[q] * Y[q];
    w[q] = Bc[q] * X[q];
  }
  cvec pu = apply_a(u), pw = apply_b(w);
  double r = 0;
  for (size_t q = 0; q < nz; ++q)
    r = std::max({r, std::abs(X[q] - cx - pu[q]), std::abs(Y[q] - cy - pw[q])});
  return r;
}

// X = cx + Pa(A (cy + Pb(Bc X))) by damped Anderson mixing; Y follows.
void RHSolver::solve_component(const cvec& A, const cvec& Bc, double cx, double cy, cvec& X, cvec& Y, int& iters,
                               bool& dense) const {
  const int nz = static_cast<int>(A.size());
  auto g = [&](const cvec& Xin) {
    cvec w(nz);
    for (int q = 0; q < nz; ++q) w[q] = Bc[q] * Xin[q];
    cvec y = apply_b(w);
    for (int q = 0; q < nz; ++q) y[q] = A[q] * (cy + y[q]);
    cvec out = apply_a(y);
    for (auto& o : out) o += cx;
    return out;
  };
  auto finish_y = [&]() {
    cvec w(nz);
    for (int q = 0; q < nz; ++q) w[q] = Bc[q] * X[q];
    Y = apply_b(w);
    for (auto& y : Y) y += cy;
  };

  X.assign(nz, cx);
  std::deque<cvec> dX, dF;
  cvec Xprev, Fprev;
  const double beta = opt_.damping;
  iters = 0;
  dense = false;
  bool converged = false;
  for (int it = 0; it < opt_.max_iter; ++it) {
    ++iters;
    cvec G = g(X);
    cvec F(nz);
    double fn = 0;
    for (int q = 0; q < nz; ++q) {
      F[q] = G[q] - X[q];
      fn = std::max(fn, std::abs(F[q]));
    }
    if (!std::isfinite(fn)) break;
    if (fn < opt_.tol) {
      X = std::move(G);
      converged = true;
      break;
    }
    if (!Xprev.empty()) {
      cvec a(nz), b(nz);
      for (int q = 0; q < nz; ++q) {
        a[q] = X[q] - Xprev[q];
        b[q] = F[q] - Fprev[q];
      }
      dX.push_back(std::move(a));
      dF.push_back(std::move(b));
      if (static_cast<int>(dX.size()) > opt_.anderson) {
        dX.pop_front();
        dF.pop_front();
      }
    }
    Xprev = X;
    Fprev = F;
    cvec Xn(nz);
    for (int q = 0; q < nz; ++q) Xn[q] = X[q] + beta * F[q];
    const int m = static_cast<int>(dF.size());
    if (m > 0) {
      Eigen::MatrixXcd M(nz, m);
      Eigen::VectorXcd rhs(nz);
      for (int q = 0; q < nz; ++q) {
        rhs(q) = F[q];
        for (int c = 0; c < m; ++c) M(q, c) = dF[c][q];
      }
      Eigen::VectorXcd gam = M.colPivHouseholderQr().solve(rhs);
      for (int c = 0; c < m; ++c)
        for (int q = 0; q < nz; ++q) Xn[q] -= (dX[c][q] + beta * dF[c][q]) * gam(c);
    }
    X = std::move(Xn);
  }
  if (converged) {
    finish_y();
    if (system_residual(A, Bc, cx, cy, X, Y) <= opt_.residual_tol) return;
  }
  if (!opt_.dense_fallback || nz > opt_.dense_max)
    throw ConvergenceError("RH fixed point did not reach the residual target; ||r||_inf = " +
                           std::to_string(std::max(sup_abs(rp_), sup_abs(rm_))));

  // dense collocation of (I - K) X = f with the same discrete projections
  {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (!dense_) {
      auto d = std::make_shared<Dense>();
      d->Pa.resize(nz, nz);
      d->Pb.resize(nz, nz);
      const double sa = branch_ == Branch::positive ? -0.5 : 0.5;
      for (int j = 0; j < nz; ++j) {
        cvec e(nz, 0.0);
        e[j] = 1.0;
        cvec h = P_.hilbert(e);
        for (int q = 0; q < nz; ++q) {
          d->Pa(q, j) = 0.5 * I * h[q];
          d->Pb(q, j) = 0.5 * I * h[q];
        }
        d->Pa(j, j) += sa;
        d->Pb(j, j) -= sa;
      }
      dense_ = d;
    }
  }
  Eigen::VectorXcd a(nz), b(nz), f0(nz);
  for (int q = 0; q < nz; ++q) {
    a(q) = A[q];
    b(q) = Bc[q];
  }
  Eigen::MatrixXcd K = dense_->Pa * a.asDiagonal() * dense_->Pb * b.asDiagonal();
  Eigen::VectorXcd f = dense_->Pa * (a * cy);
  for (int q = 0; q < nz; ++q) f(q) += cx;
  K = Eigen::MatrixXcd::Identity(nz, nz) - K;
  Eigen::VectorXcd sol = K.partialPivLu().solve(f);
  for (int q = 0; q < nz; ++q) X[q] = sol(q);
  finish_y();
  dense = true;
  const double res = system_residual(A, Bc, cx, cy, X, Y);
  if (!(res <= opt_.residual_tol))
    throw ConvergenceError("RH dense solve residual " + std::to_string(res) + " above target; ||r||_inf = " +
                           std::to_string(std::max(sup_abs(rp_), sup_abs(rm_))));
}

Columns RHSolver::solve(double x) const {
  const int nz = static_cast<int>(z_.size());
  cvec A(nz), Bc(nz);
  for (int q = 0; q < nz; ++q) {
    const cplx e = std::exp(I * z_[q] * x);
    A[q] = rm_[q] * e;
    Bc[q] = std::conj(rp_[q]) / e;
  }
  Columns c;
  c.x = x;
  int i1 = 0, i2 = 0;
  bool d1 = false, d2 = false;
  solve_component(A, Bc, 1.0, 0.0, c.xi1, c.eta1, i1, d1);
  solve_component(A, Bc, 0.0, 1.0, c.xi2, c.eta2, i2, d2);
  c.iterations = std::max(i1, i2);
  c.dense = d1 || d2;
  c.residual = std::max(system_residual(A, Bc, 1.0, 0.0, c.xi1, c.eta1), system_residual(A, Bc, 0.0, 1.0, c.xi2, c.eta2));
  return c;
}

double RHSolver::jump_audit(const Columns& c) const {
  if (branch_ != Branch::positive) throw PreconditionError("jump audit is defined for the positive branch");
  const int nz = static_cast<int>(z_.size());
  // xi_+ = e1 + P+(r_- e eta_+), eta_- = e2 + P-(conj(r_+) e^{-1} xi_-)
  cvec u1(nz), u2(nz), w1(nz), w2(nz);
  cvec e(nz);
  for (int q = 0; q < nz; ++q) {
    e[q] = std::exp(I * z_[q] * c.x);
    u1[q] = rm_[q] * e[q] * c.eta1[q];
    u2[q] = rm_[q] * e[q] * c.eta2[q];
    w1[q] = std::conj(rp_[q]) / e[q] * c.xi1[q];
    w2[q] = std::conj(rp_[q]) / e[q] * c.xi2[q];
  }
  cvec xp1 = P_.plus(u1), xp2 = P_.plus(u2), em1 = P_.minus(w1), em2 = P_.minus(w2);
  double r = 0;
  for (int q = 0; q < nz; ++q) {
    xp1[q] += 1.0;
    em2[q] += 1.0;
    const Mat2 Pp = {xp1[q], c.eta1[q], xp2[q], c.eta2[q]};
    const Mat2 Pm = {c.xi1[q], em1[q], c.xi2[q], em2[q]};
    const Mat2 R = {std::conj(rp_[q]) * rm_[q], std::conj(rp_[q]) / e[q], rm_[q] * e[q], 0.0};
    const Mat2 PmR = matmul(Pm, R);
    for (int i = 0; i < 4; ++i) r = std::max(r, std::abs(Pp[i] - Pm[i] - PmR[i]));
  }
  return r;
}

namespace {

RHSolution solve_all(const ScatteringData& s, const rvec& xs, double t, const RHOptions& opt, Branch b) {
  RHSolver solver(s, t, b, opt);
  RHSolution out;
  out.branch = b;
  out.z = s.z;
  for (double x : xs) {
    if (b == Branch::positive && x < 0) throw DomainError("positive branch needs x >= 0");
    if (b == Branch::negative && x > 0) throw DomainError("negative branch needs x <= 0");
    out.columns.push_back(solver.solve(x));
    out.max_residual = std::max(out.max_residual, out.columns.back().residual);
    out.max_iterations = std::max(out.max_iterations, out.columns.back().iterations);
  }
  return out;
}

}  // namespace

RHSolution solve_rh_positive(const ScatteringData& s, const rvec& xs, double t, const RHOptions& opt) {
  return solve_all(s, xs, t, opt, Branch::positive);
}

RHSolution solve_rh_negative(const ScatteringData& s, const rvec& xs, double t, const RHOptions& opt) {
  return solve_all(s, xs, t, opt, Branch::negative);
}

double unresolved_weight(const ScatteringData& s, double t) {
  if (t == 0.0 || s.size() < 2) return 0.0;
  const double dz = std::abs(s.z[1] - s.z[0]);
  const double band = std::sqrt(std::abs(t) * dz / PI);
  double in = 0, all = 0;
  for (int q = 0; q < s.size(); ++q) {
    const double w = std::norm(s.r_plus[q]);
    all += w;
    if (std::abs(s.z[q]) < band) in += w;
  }
  return all > 0 ? in / all : 0.0;
}

}  // namespace mtist::rh

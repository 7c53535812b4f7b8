#include "mtist/oracle.hpp"

#include <cmath>

namespace mtist::oracle {

cvec slave_with_source(const cvec& v, const cvec& v_mid, const cvec& s, const cvec& s_mid, double h) {
  const int n = static_cast<int>(v.size());
  cvec u(n, 0.0);
  const double H = -h;
  auto f = [](cplx vv, cplx ss, cplx uu) { return -I * (std::norm(vv) * uu - ss); };
  cplx w = 0.0;
  for (int j = n - 2; j >= 0; --j) {
    const cplx k1 = f(v[j + 1], s[j + 1], w);
    const cplx k2 = f(v_mid[j], s_mid[j], w + 0.5 * H * k1);
    const cplx k3 = f(v_mid[j], s_mid[j], w + 0.5 * H * k2);
    const cplx k4 = f(v[j], s[j], w + H * k3);
    w += H / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    u[j] = w;
  }
  return u;
}

cvec slave_u(const cvec& v, double h, const SlaveOptions& opt) {
  const int n = static_cast<int>(v.size());
  cvec fine = numerics::refine(v, 2);
  cvec mid(n);
  for (int j = 0; j < n; ++j) mid[j] = fine[2 * j + 1];
  cvec u = slave_with_source(v, mid, v, mid, h);
  if (opt.closure == Closure::right) return u;
  rvec nu = fields::nu_plus(v, h);
  cvec uh(n);
  for (int j = 0; j < n; ++j) {
    // particular solution for a unit shift of v e^{2i nu_+}, or the homogeneous one
    const cplx e = std::exp(-2.0 * I * nu[j]);
    uh[j] = opt.closure == Closure::mean_free ? -I * e * ((n - 1 - j) * h) : e;
  }
  cplx lam = u[0] / uh[0];
  if (opt.closure == Closure::symmetric) lam *= 0.5;
  for (int j = 0; j < n; ++j) u[j] -= lam * uh[j];
  return u;
}

MTState make_state(const cvec& v, double h, double t, const SlaveOptions& opt) { return {t, v, slave_u(v, h, opt)}; }

MTState step_v(const MTState& s, double h, double dt, const SlaveOptions& opt) {
  if (!(dt > 0)) throw DomainError("oracle time step must be positive");
  const size_t n = s.v.size();
  auto rhs = [&](const cvec& v, const cvec* u_known) {
    cvec u = u_known ? *u_known : slave_u(v, h, opt);
    cvec r(n);
    for (size_t j = 0; j < n; ++j) r[j] = -I * (std::norm(u[j]) * v[j] - u[j]);
    return r;
  };
  cvec k1 = rhs(s.v, s.u.size() == n ? &s.u : nullptr);
  cvec tmp(n);
  for (size_t j = 0; j < n; ++j) tmp[j] = s.v[j] + 0.5 * dt * k1[j];
  cvec k2 = rhs(tmp, nullptr);
  for (size_t j = 0; j < n; ++j) tmp[j] = s.v[j] + 0.5 * dt * k2[j];
  cvec k3 = rhs(tmp, nullptr);
  for (size_t j = 0; j < n; ++j) tmp[j] = s.v[j] + dt * k3[j];
  cvec k4 = rhs(tmp, nullptr);
  MTState out;
  out.t = s.t + dt;
  out.v.resize(n);
  for (size_t j = 0; j < n; ++j) out.v[j] = s.v[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  out.u = slave_u(out.v, h, opt);
  return out;
}

MTState integrate(const MTState& s0, double h, double T, const OracleOptions& opt,
                  const std::function<void(const MTState&)>& observer) {
  if (!(opt.dt > 0)) throw DomainError("oracle time step must be positive");
  const long steps = std::lround((T - s0.t) / opt.dt);
  if (steps < 0) throw DomainError("oracle integrates forward in time only");
  MTState s = s0;
  if (s.u.size() != s.v.size()) s.u = slave_u(s.v, h, opt.slave);
  if (observer) observer(s);
  for (long k = 0; k < steps; ++k) {
    s = step_v(s, h, opt.dt, opt.slave);
    s.t = s0.t + (k + 1) * opt.dt;
    if (observer) observer(s);
  }
  return s;
}

cvec embed(const cvec& v, int factor) {
  const size_t n = v.size();
  cvec out(n * factor, 0.0);
  const size_t off = (factor - 1) * n / 2;
  for (size_t j = 0; j < n; ++j) out[off + j] = v[j];
  return out;
}

cvec window(const cvec& v, int n) {
  const size_t off = (v.size() - n) / 2;
  return cvec(v.begin() + off, v.begin() + off + n);
}

Lattice extended_lattice(const Lattice& g, int factor) { return {g.x0 * factor, g.h, g.n * factor}; }

ConservationMonitor::ConservationMonitor(double h, double dt, int margin, int order)
    : h_(h), dt_(dt), margin_(margin) {
  if (order != 2 && order != 4) throw DomainError("conservation stencils are of order 2 or 4");
  rep_.order = order;
}

namespace {

// central first derivative at the middle of f[k - w .. k + w]
template <class F>
auto central(const F& f, int k, int order, double step) {
  if (order == 2) return (f(k + 1) - f(k - 1)) / (2 * step);
  return (-f(k + 2) + 8.0 * f(k + 1) - 8.0 * f(k - 1) + f(k - 2)) / (12 * step);
}

}  // namespace

void ConservationMonitor::push(const MTState& s) {
  const int order = rep_.order, w = order / 2, len = order + 1;
  last_.push_back(s);
  if (static_cast<int>(last_.size()) > len) last_.erase(last_.begin());
  if (static_cast<int>(last_.size()) < len) return;
  for (int k = 1; k < len; ++k)
    if (std::abs((last_[k].t - last_[k - 1].t) - dt_) > 1e-9 * dt_)
      throw DomainError("conservation residuals need a uniform time step");
  const MTState& mid = last_[w];
  const int n = static_cast<int>(mid.v.size());
  auto dens2 = [&](const cvec& v, int j) {
    const cplx vx = central([&](int i) { return v[i]; }, j, order, h_);
    return I * v[j] * std::conj(vx);
  };
  const int lo = std::max(2 * w, margin_), hi = n - 2 * w - margin_;
  for (int j = lo; j < hi; ++j) {
    const double r1 = central([&](int k) { return std::norm(last_[k].v[j]); }, w, order, dt_) +
                      central([&](int i) { return std::norm(mid.u[i]); }, j, order, h_);
    const cplx r2 = central([&](int k) { return dens2(last_[k].v, j); }, w, order, dt_) +
                    central([&](int i) { return mid.u[i] * std::conj(mid.v[i]); }, j, order, h_);
    rep_.mass.sup = std::max(rep_.mass.sup, std::abs(r1));
    rep_.momentum.sup = std::max(rep_.momentum.sup, std::abs(r2));
    mass_sq_ += r1 * r1 * h_ * dt_;
    mom_sq_ += std::norm(r2) * h_ * dt_;
  }
  rep_.mass.l2 = std::sqrt(mass_sq_);
  rep_.momentum.l2 = std::sqrt(mom_sq_);
  ++rep_.samples;
}

ConservationReport conservation_residuals(const std::vector<MTState>& history, double h, int margin, int order) {
  if (static_cast<int>(history.size()) < order + 1)
    throw DomainError("conservation residuals need at least " + std::to_string(order + 1) + " states");
  ConservationMonitor m(h, history[1].t - history[0].t, margin, order);
  for (const auto& s : history) m.push(s);
  return m.report();
}

namespace {

// trapezoid running integrals with the Euler-Maclaurin end correction
cvec running_left(const cvec& f, double h) {
  cvec c = numerics::cumulative_from_left(f, h), df = numerics::fd_derivative(f, h);
  for (size_t j = 0; j < f.size(); ++j) c[j] -= h * h / 12.0 * (df[j] - df[0]);
  return c;
}

cvec running_right(const cvec& f, double h) {
  cvec c = numerics::cumulative_to_right(f, h), df = numerics::fd_derivative(f, h);
  for (size_t j = 0; j < f.size(); ++j) c[j] -= h * h / 12.0 * (df.back() - df[j]);
  return c;
}

}  // namespace

DressingCoefficients dressing_coefficients(const MTState& s, double h) {
  const int n = static_cast<int>(s.v.size());
  DressingCoefficients d;
  rvec a2(n);
  cvec p1(n), p2(n);  // diagonal entries of V V_x = diag(-v conj(v_x), -conj(v) v_x)
  cvec vx = numerics::fd_derivative(s.v, h);
  for (int j = 0; j < n; ++j) {
    a2[j] = std::norm(s.v[j]);
    p1[j] = -s.v[j] * std::conj(vx[j]);
    p2[j] = -std::conj(s.v[j]) * vx[j];
  }
  cvec a2c(a2.begin(), a2.end());
  cvec numl = running_left(a2c, h), nupl = running_right(a2c, h);
  cvec c1l = running_left(p1, h), c2l = running_left(p2, h);
  cvec c1r = running_right(p1, h), c2r = running_right(p2, h);
  for (int side = 0; side < 2; ++side) {
    d.J0[side].resize(n);
    d.J1[side].resize(n);
    d.J2[side].resize(n);
    cvec e00(n);
    for (int j = 0; j < n; ++j) {
      const double nu = side == 0 ? 0.5 * numl[j].real() : -0.5 * nupl[j].real();
      const cplx ep = std::exp(I * nu), em = std::exp(-I * nu);
      const Mat2 J0 = {ep, 0.0, 0.0, em};
      const Mat2 V = {0.0, s.v[j], -std::conj(s.v[j]), 0.0};
      const Mat2 sJ0 = {ep, 0.0, 0.0, -em};
      // int_{-inf}^x for side 0, int_{+inf}^x = -int_x^{+inf} for side 1
      const cplx i1 = side == 0 ? c1l[j] : -c1r[j];
      const cplx i2 = side == 0 ? c2l[j] : -c2r[j];
      d.J0[side][j] = J0;
      d.J1[side][j] = matmul(V, sJ0);
      d.J2[side][j] = {-i1 * ep, 0.0, 0.0, -i2 * em};
      d.unit_det_defect = std::max(d.unit_det_defect, std::abs(ep * em - 1.0));
      d.structure_defect = std::max({d.structure_defect, std::abs(d.J1[side][j][0]), std::abs(d.J1[side][j][3])});
      e00[j] = ep;
    }
    cvec de = numerics::fd_derivative(e00, h);
    // d_x J0 = -(i/2) V^2 sigma3 J0 with V^2 = -|v|^2 I
    for (int j = 2; j < n - 2; ++j)
      d.recurrence_defect = std::max(d.recurrence_defect, std::abs(de[j] - 0.5 * I * a2[j] * e00[j]));
  }
  return d;
}

}  // namespace mtist::oracle

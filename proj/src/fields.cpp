#include "mtist/fields.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mtist::fields {

void PotentialField::validate() const {
  numerics::SampledFunction{grid, v}.validate();
  if (dv.size() != v.size()) throw DomainError("potential field: v and dv lengths differ");
}

PotentialField make_field(const Lattice& grid, cvec v, std::string label, Derivative d) {
  PotentialField p{grid, std::move(v), {}, std::move(label)};
  numerics::SampledFunction{grid, p.v}.validate();
  p.dv = d == Derivative::spectral ? numerics::spectral_derivative(p.v, grid.h)
                                   : numerics::fd_derivative(p.v, grid.h);
  return p;
}

namespace {

cvec compatible_samples(const Lattice& grid, double a, double w, double beta) {
  cvec v(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    double s = grid.at(j) / w;
    v[j] = a * (1 - beta * s * s) * std::exp(-s * s);
  }
  return v;
}

}  // namespace

double compatible_beta(const Lattice& grid, double amplitude, double width) {
  if (amplitude == 0.0) return 2.0;
  // beta = 2 makes the linear moment vanish; the phase correction is small
  const cplx ref = origin_integral(compatible_samples(grid, amplitude, width, 0.0), grid.h);
  const cplx dir = std::conj(ref) / std::abs(ref);
  auto g = [&](double b) { return (dir * origin_integral(compatible_samples(grid, amplitude, width, b), grid.h)).real(); };
  boost::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) < 1e-15; };
  auto r = boost::math::tools::toms748_solve(g, 0.5, 6.0, tol, iters);
  return 0.5 * (r.first + r.second);
}

cvec sample_family(const Lattice& grid, const FamilySpec& spec) {
  const double a = spec.amplitude, w = spec.width;
  if (!(w > 0)) throw ConfigError("potential width must be positive");
  cvec v(grid.n, 0.0);
  const auto& f = spec.family;
  if (f == "zero") return v;
  if (f == "gaussian-compatible") return compatible_samples(grid, a, w, compatible_beta(grid, a, w));
  for (int j = 0; j < grid.n; ++j) {
    double s = grid.at(j) / w;
    if (f == "gaussian") {
      v[j] = a * std::exp(-s * s);
    } else if (f == "sech") {
      v[j] = a / std::cosh(s);
    } else if (f == "box") {
      // smoothed indicator of |x| < w, edges of width w/10
      double e = 0.1;
      v[j] = a * 0.5 * (std::tanh((s + 1) / e) - std::tanh((s - 1) / e));
    } else {
      throw ConfigError("unknown potential family '" + f + "'");
    }
  }
  return v;
}

PotentialField make_family(const Lattice& grid, const FamilySpec& spec, Derivative d) {
  return make_field(grid, sample_family(grid, spec), spec.family, d);
}

PotentialField load_csv(const std::string& path, Derivative d) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open potential file " + path);
  rvec xs;
  cvec vs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (auto& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ss(line);
    double x, re, im = 0.0;
    if (!(ss >> x >> re)) {
      if (xs.empty()) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected x, Re v[, Im v]");
    }
    ss >> im;
    xs.push_back(x);
    vs.emplace_back(re, im);
  }
  const int n = static_cast<int>(xs.size());
  if (n < 8 || !numerics::is_pow2(n)) throw ConfigError(path + ": sample count must be a power of two >= 8");
  const double h = xs[1] - xs[0];
  for (int j = 1; j < n; ++j)
    if (std::abs(xs[j] - xs[j - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ConfigError(path + ":" + std::to_string(j + 1) + ": x samples are not uniform");
  Lattice g{xs[0], h, n};
  if (std::abs(g.at(n / 2)) > 1e-9 * h) throw ConfigError(path + ": x = 0 must be node n/2");
  return make_field(g, std::move(vs), path, d);
}

NormReport norms(const PotentialField& p) {
  p.validate();
  using numerics::quadrature;
  const int n = p.grid.n;
  const double h = p.grid.h;
  cvec a2(n), ab(n), w2(n), wd2(n), d2(n), dd(n);
  cvec vxx = numerics::spectral_derivative(p.v, h, 2);
  for (int j = 0; j < n; ++j) {
    double x = p.grid.at(j), wx = 1 + x * x;
    a2[j] = std::norm(p.v[j]);
    ab[j] = std::abs(p.v[j]);
    w2[j] = wx * std::norm(p.v[j]);
    wd2[j] = wx * std::norm(p.dv[j]);
    d2[j] = std::norm(p.dv[j]);
    dd[j] = std::norm(vxx[j]);
  }
  auto q = [&](const cvec& f) {
    numerics::SampledFunction s{p.grid, f};
    return quadrature(s, p.grid.front(), p.grid.front() + n * h).real();
  };
  NormReport r;
  double l2sq = q(a2), d2sq = q(d2);
  r.l2 = std::sqrt(l2sq);
  r.l1 = q(ab);
  r.l21 = std::sqrt(q(w2));
  r.h1 = std::sqrt(l2sq + d2sq);
  r.h2 = std::sqrt(l2sq + d2sq + q(dd));
  r.h11 = std::sqrt(q(w2) + q(wd2));
  for (int j = 0; j < n; ++j) ab[j] = std::abs(p.dv[j]);
  r.dv_l1 = q(ab);
  return r;
}

rvec nu_plus(const cvec& v, double h) {
  rvec a2(v.size());
  for (size_t j = 0; j < v.size(); ++j) a2[j] = std::norm(v[j]);
  rvec c = numerics::cumulative_to_right(a2, h);
  for (auto& x : c) x *= -0.5;
  return c;
}

cplx origin_integral(const cvec& v, double h) {
  rvec nu = nu_plus(v, h);
  cvec w(v.size());
  for (size_t j = 0; j < v.size(); ++j) w[j] = v[j] * std::exp(2.0 * I * nu[j]);
  return numerics::quadrature(w, h, numerics::Rule::trapezoid);
}

Admissibility check_admissibility(const PotentialField& p, double origin_tolerance) {
  NormReport nr = norms(p);
  Admissibility a;
  a.lambda_plus = 0.5 * nr.l2 * nr.l2 + std::sqrt(nr.l1 * nr.dv_l1);
  double v1 = nr.l2 * nr.l2 + 0.5 * nr.l1 + 2 * nr.dv_l1;
  a.a_lower_bound = 1 - 0.5 * (nr.l1 + nr.l2 * nr.l2) * std::exp(v1);
  a.volterra_contractive = a.lambda_plus < 1;
  a.a_nonvanishing = a.a_lower_bound > 0;
  a.origin_defect = nr.l1 > 0 ? std::abs(origin_integral(p.v, p.grid.h)) / nr.l1 : 0.0;
  a.origin_compatible = a.origin_defect <= origin_tolerance;
  return a;
}

}  // namespace mtist::fields

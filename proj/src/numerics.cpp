#include "mtist/numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace mtist::numerics {

rvec Lattice::nodes() const {
  rvec x(n);
  for (int j = 0; j < n; ++j) x[j] = at(j);
  return x;
}

bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

Lattice spatial_lattice(double L, int n) {
  if (!(L > 0)) throw DomainError("lattice half-width must be positive");
  if (n < 8 || !is_pow2(n)) throw DomainError("lattice size must be a power of two >= 8, got " + std::to_string(n));
  return {-L, 2 * L / n, n};
}

Lattice spectral_lattice(int n, double dz) {
  if (!(dz > 0)) throw DomainError("spectral spacing must be positive");
  if (n < 8 || !is_pow2(n)) throw DomainError("spectral lattice size must be a power of two >= 8, got " + std::to_string(n));
  return {-(n / 2 - 0.5) * dz, dz, n};
}

void SampledFunction::validate() const {
  if (!(grid.h > 0)) throw DomainError("sampled function: spacing must be positive");
  if (grid.n < 8 || !is_pow2(grid.n)) throw DomainError("sampled function: node count must be a power of two >= 8");
  if (static_cast<int>(values.size()) != grid.n) throw DomainError("sampled function: value count does not match lattice");
}

// ---------------------------------------------------------------- quadrature

namespace {

cplx composite(const cplx* f, int m, double h, Rule rule) {
  // m intervals, m+1 samples
  if (m <= 0) return 0.0;
  if (rule == Rule::trapezoid || m == 1) {
    cplx s = 0.5 * (f[0] + f[m]);
    for (int j = 1; j < m; ++j) s += f[j];
    return s * h;
  }
  auto simpson = [&](int a, int b) {  // even number of intervals a..b
    cplx s = f[a] + f[b];
    for (int j = a + 1; j < b; ++j) s += (((j - a) % 2) ? 4.0 : 2.0) * f[j];
    return s * (h / 3.0);
  };
  if (m % 2 == 0) return simpson(0, m);
  cplx s = m > 3 ? simpson(0, m - 3) : cplx(0.0);
  int a = m - 3;
  s += 3.0 * h / 8.0 * (f[a] + 3.0 * f[a + 1] + 3.0 * f[a + 2] + f[a + 3]);
  return s;
}

}  // namespace

cplx quadrature(const cvec& f, double h, Rule rule) {
  if (f.size() < 2) return 0.0;
  return composite(f.data(), static_cast<int>(f.size()) - 1, h, rule);
}

cplx quadrature(const SampledFunction& f, double lower, double upper, Rule rule) {
  f.validate();
  const auto& g = f.grid;
  const double lo_dom = g.x0, hi_dom = g.x0 + g.n * g.h;  // closing node wraps to the first sample
  const double eps = 1e-12 * g.h;
  if (lower > upper) return -quadrature(f, upper, lower, rule);
  if (lower < lo_dom - eps || upper > hi_dom + eps)
    throw DomainError("quadrature interval outside lattice");
  lower = std::max(lower, lo_dom);
  upper = std::min(upper, hi_dom);
  auto val = [&](long j) { return f.values[static_cast<size_t>(j % g.n)]; };
  auto interp = [&](double x) {
    double s = (x - g.x0) / g.h;
    long j = std::clamp(static_cast<long>(std::floor(s)), 0L, static_cast<long>(g.n) - 1);
    double t = s - j;
    return (1 - t) * val(j) + t * val(j + 1);
  };
  long ja = static_cast<long>(std::ceil((lower - g.x0) / g.h - 1e-9));
  long jb = static_cast<long>(std::floor((upper - g.x0) / g.h + 1e-9));
  if (jb < ja) return 0.5 * (interp(lower) + interp(upper)) * (upper - lower);
  cvec seg(jb - ja + 1);
  for (long j = ja; j <= jb; ++j) seg[j - ja] = val(j);
  cplx s = composite(seg.data(), static_cast<int>(jb - ja), g.h, rule);
  double xa = g.at(static_cast<int>(ja)), xb = g.x0 + jb * g.h;
  if (xa > lower) s += 0.5 * (interp(lower) + val(ja)) * (xa - lower);
  if (upper > xb) s += 0.5 * (val(jb) + interp(upper)) * (upper - xb);
  return s;
}

template <class V>
static V cum_left(const V& f, double h) {
  V c(f.size());
  if (f.empty()) return c;
  c[0] = 0.0;
  for (size_t j = 1; j < f.size(); ++j) c[j] = c[j - 1] + 0.5 * h * (f[j] + f[j - 1]);
  return c;
}

template <class V>
static V cum_right(const V& f, double h) {
  V c(f.size());
  if (f.empty()) return c;
  c.back() = 0.0;
  for (size_t j = f.size() - 1; j-- > 0;) c[j] = c[j + 1] + 0.5 * h * (f[j] + f[j + 1]);
  return c;
}

cvec cumulative_from_left(const cvec& f, double h) { return cum_left(f, h); }
cvec cumulative_to_right(const cvec& f, double h) { return cum_right(f, h); }
rvec cumulative_from_left(const rvec& f, double h) { return cum_left(f, h); }
rvec cumulative_to_right(const rvec& f, double h) { return cum_right(f, h); }

// ---------------------------------------------------------------- FFT

namespace {

std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan> plans;

fftw_plan get_plan(int n, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  auto* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  plans[key] = p;
  return p;
}

}  // namespace

void dft_inplace(cvec& a, int sign) {
  if (a.empty()) return;
  auto p = get_plan(static_cast<int>(a.size()), sign);
  auto* d = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(p, d, d);
}

cvec fft(const cvec& a) {
  cvec b = a;
  dft_inplace(b, -1);
  return b;
}

cvec ifft(const cvec& a) {
  cvec b = a;
  dft_inplace(b, +1);
  const double s = 1.0 / static_cast<double>(b.size());
  for (auto& x : b) x *= s;
  return b;
}

SampledFunction fourier_transform(const SampledFunction& f) {
  f.validate();
  const int n = f.grid.n;
  const double h = f.grid.h, dy = 2 * PI / (n * h);
  cvec a(n);
  for (int j = 0; j < n; ++j) a[j] = f.values[j] * ((j % 2) ? -1.0 : 1.0);
  dft_inplace(a, -1);
  // bin k of the DFT is y_k with the (-1)^j shift; y_k = (k - n/2) dy
  SampledFunction F{{-(n / 2) * dy, dy, n}, cvec(n)};
  for (int k = 0; k < n; ++k) {
    double y = F.grid.at(k);
    F.values[k] = h * std::exp(-I * (f.grid.x0 * y)) * a[k];
  }
  return F;
}

SampledFunction inverse_fourier_transform(const SampledFunction& F, double x0) {
  F.validate();
  const int n = F.grid.n;
  const double dy = F.grid.h, h = 2 * PI / (n * dy);
  cvec a(n);
  for (int k = 0; k < n; ++k) a[k] = F.values[k] * std::exp(I * (x0 * F.grid.at(k)));
  dft_inplace(a, +1);
  SampledFunction f{{x0, h, n}, cvec(n)};
  for (int j = 0; j < n; ++j) {
    // e^{i x_j y_k} = e^{i x0 y_k} e^{2 pi i j k/n} (-1)^j
    f.values[j] = a[j] * ((j % 2) ? -1.0 : 1.0) * dy / (2 * PI);
  }
  return f;
}

cvec spectral_derivative(const cvec& f, double h, int order) {
  const int n = static_cast<int>(f.size());
  cvec F = fft(f);
  for (int k = 0; k < n; ++k) {
    int kk = k <= n / 2 ? k : k - n;
    if (2 * k == n && order % 2) {
      F[k] = 0.0;
      continue;
    }
    cplx m = std::pow(I * (2 * PI * kk / (n * h)), order);
    F[k] *= m;
  }
  return ifft(F);
}

cvec fd_derivative(const cvec& f, double h) {
  const int n = static_cast<int>(f.size());
  cvec d(n);
  if (n < 5) throw DomainError("fd_derivative needs at least 5 samples");
  for (int j = 2; j < n - 2; ++j) d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12 * h);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12 * h);
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12 * h);
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12 * h);
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12 * h);
  return d;
}

cvec refine(const cvec& f, int factor) {
  const int n = static_cast<int>(f.size());
  if (factor == 1) return f;
  cvec F = fft(f), G(static_cast<size_t>(n) * factor, 0.0);
  for (int k = 0; k < n / 2; ++k) G[k] = F[k];
  for (int k = n / 2; k < n; ++k) G[G.size() - (n - k)] = F[k];
  cvec g = ifft(G);
  for (auto& x : g) x *= static_cast<double>(factor);
  return g;
}

rvec raised_cosine_taper(int n, double fraction) {
  rvec w(n, 1.0);
  int m = static_cast<int>(fraction * n);
  for (int j = 0; j < m; ++j) {
    double r = 0.5 - 0.5 * std::cos(PI * j / m);
    w[j] = r;
    w[n - 1 - j] = r;
  }
  return w;
}

// ---------------------------------------------------------------- projections

double CauchyProjector::kernel(long m) {
  if (m % 2 == 0) return 0.0;
  return 2.0 / (PI * static_cast<double>(m));
}

CauchyProjector::CauchyProjector(const Lattice& z, ProjectorOptions opt) : z_(z), opt_(opt) {
  if (z.n < 8 || !is_pow2(z.n)) throw DomainError("projector lattice must be a power of two >= 8");
  if (opt_.tail_correction && opt_.taper)
    throw PreconditionError("tail correction needs the raw lattice edge; disable the taper");
  w_ = opt_.taper ? raised_cosine_taper(z.n, opt_.taper_fraction) : rvec(z.n, 1.0);
  const int n = z.n;
  if (opt_.periodic) {
    kernel_hat_.assign(n, 0.0);
    for (int k = 1; k < n / 2; ++k) kernel_hat_[k] = -I;
    for (int k = n / 2 + 1; k < n; ++k) kernel_hat_[k] = I;
  } else {
    const int M = 2 * n;
    cvec k(M, 0.0);
    for (int m = 1; m < n; ++m) {
      k[m] = kernel(m);
      k[M - m] = kernel(-m);
    }
    kernel_hat_ = fft(k);
  }
}

cvec CauchyProjector::hilbert(const cvec& f) const {
  const int n = z_.n;
  if (static_cast<int>(f.size()) != n) throw DomainError("projector: input length mismatch");
  cvec out;
  if (opt_.periodic) {
    cvec a(n);
    for (int j = 0; j < n; ++j) a[j] = w_[j] * f[j];
    dft_inplace(a, -1);
    for (int k = 0; k < n; ++k) a[k] *= kernel_hat_[k];
    dft_inplace(a, +1);
    out.resize(n);
    for (int j = 0; j < n; ++j) out[j] = a[j] / static_cast<double>(n);
  } else {
    const int M = 2 * n;
    cvec a(M, 0.0);
    for (int j = 0; j < n; ++j) a[j] = w_[j] * f[j];
    dft_inplace(a, -1);
    for (int k = 0; k < M; ++k) a[k] *= kernel_hat_[k];
    dft_inplace(a, +1);
    out.resize(n);
    for (int j = 0; j < n; ++j) out[j] = a[j] / static_cast<double>(M);
  }
  if (opt_.tail_correction) {
    // the missing tail adds -(1/pi) int f(s)/(s - z) ds = i * 2 * T with T the Cauchy tail term below
    const int m = std::max(4, n / 20);
    cplx cp = 0.0, cm = 0.0;
    for (int j = 0; j < m; ++j) {
      cp += z_.at(n - 1 - j) * f[n - 1 - j];
      cm += z_.at(j) * f[j];
    }
    cp /= static_cast<double>(m);
    cm /= static_cast<double>(m);
    const double Zp = z_.back() + 0.5 * z_.h, Zm = z_.front() - 0.5 * z_.h;
    for (int j = 0; j < n; ++j) {
      double zz = z_.at(j);
      cplx T = (-cp * std::log1p(-zz / Zp) / zz + cm * std::log1p(-zz / Zm) / zz) / (2.0 * PI * I);
      out[j] += -2.0 * I * T;
    }
  }
  return out;
}

cvec CauchyProjector::nonlocal(const cvec& f) const {
  cvec h = hilbert(f);
  for (auto& x : h) x *= 0.5 * I;
  return h;
}

void CauchyProjector::project_pair(const cvec& f, cvec& plus, cvec& minus) const {
  if (!opt_.taper && !opt_.tail_correction) {
    double peak = sup_abs(f);
    double edge = std::max(std::abs(f.front()), std::abs(f.back()));
    if (peak > 0 && edge > opt_.decay_threshold * peak)
      throw PreconditionError("projection input does not decay toward the lattice edge and windowing is disabled");
  }
  cvec q = nonlocal(f);
  plus.resize(f.size());
  minus.resize(f.size());
  for (size_t j = 0; j < f.size(); ++j) {
    plus[j] = 0.5 * f[j] + q[j];
    minus[j] = -0.5 * f[j] + q[j];
  }
}

cvec CauchyProjector::project(const cvec& f, Projection kind) const {
  cvec p, m;
  project_pair(f, p, m);
  return kind == Projection::plus ? p : m;
}

SampledFunction cauchy_project(const SampledFunction& f, Projection kind, ProjectorOptions opt) {
  f.validate();
  CauchyProjector P(f.grid, opt);
  return {f.grid, P.project(f.values, kind)};
}

SampledFunction hilbert_transform(const SampledFunction& f, ProjectorOptions opt) {
  f.validate();
  CauchyProjector P(f.grid, opt);
  return {f.grid, P.hilbert(f.values)};
}

}  // namespace mtist::numerics

#pragma once

#include "mtist/core.hpp"

namespace mtist::numerics {

// Uniform lattice x_j = x0 + j h, j = 0..n-1.
struct Lattice {
  double x0 = 0.0;
  double h = 1.0;
  int n = 0;

  double at(int j) const { return x0 + j * h; }
  double front() const { return x0; }
  double back() const { return x0 + (n - 1) * h; }
  rvec nodes() const;
};

bool is_pow2(long n);

// Spatial lattice on [-L, L) with x = 0 at node n/2.
Lattice spatial_lattice(double L, int n);
// Spectral lattice with half-cell offset so the origin is never a node.
Lattice spectral_lattice(int n, double dz);

struct SampledFunction {
  Lattice grid;
  cvec values;
  void validate() const;
};

enum class Rule { trapezoid, simpson };

cplx quadrature(const SampledFunction& f, double lower, double upper, Rule rule = Rule::simpson);
cplx quadrature(const cvec& f, double h, Rule rule = Rule::simpson);

// Running integrals by the trapezoid rule: from_left[j] = int_{x_0}^{x_j}, to_right[j] = int_{x_j}^{x_{n-1}}.
cvec cumulative_from_left(const cvec& f, double h);
cvec cumulative_to_right(const cvec& f, double h);
rvec cumulative_from_left(const rvec& f, double h);
rvec cumulative_to_right(const rvec& f, double h);

// Unnormalized DFT, sign = -1 forward, +1 backward. FFTW plans are cached.
void dft_inplace(cvec& a, int sign);
cvec fft(const cvec& a);
cvec ifft(const cvec& a);

// F[f](y) = int f(z) e^{-izy} dz on the conjugate lattice y_k = (k - n/2) dy, dy = 2 pi/(n h).
SampledFunction fourier_transform(const SampledFunction& f);
// Inverse of fourier_transform; the target lattice origin must be supplied.
SampledFunction inverse_fourier_transform(const SampledFunction& F, double x0);

// Spectral derivative of periodic samples with spacing h.
cvec spectral_derivative(const cvec& f, double h, int order = 1);
// Fourth-order central differences, one-sided near the ends.
cvec fd_derivative(const cvec& f, double h);
// Band-limited upsampling by an integer factor (zero padding in frequency).
cvec refine(const cvec& f, int factor);

rvec raised_cosine_taper(int n, double fraction);

enum class Projection { plus, minus };

struct ProjectorOptions {
  bool taper = true;
  double taper_fraction = 0.1;
  // Periodic DFT multiplier instead of the aperiodic lattice convolution.
  bool periodic = false;
  // Add the Cauchy integral of a fitted c/z tail beyond the lattice.
  bool tail_correction = false;
  // Inputs whose edge magnitude exceeds this fraction of their peak count as non-decaying.
  double decay_threshold = 1e-2;
};

// Cauchy boundary projections with P+ - P- = I and P+ + P- = iH,
// H the standard Hilbert transform (1/pi) p.v. int f(s)/(z - s) ds.
class CauchyProjector {
 public:
  CauchyProjector() = default;
  CauchyProjector(const Lattice& z, ProjectorOptions opt = {});

  cvec hilbert(const cvec& f) const;
  cvec project(const cvec& f, Projection kind) const;
  void project_pair(const cvec& f, cvec& plus, cvec& minus) const;
  cvec plus(const cvec& f) const { return project(f, Projection::plus); }
  cvec minus(const cvec& f) const { return project(f, Projection::minus); }

  const Lattice& lattice() const { return z_; }
  const ProjectorOptions& options() const { return opt_; }
  const rvec& taper() const { return w_; }
  // Lattice kernel entry k(m) of the discrete Hilbert convolution (lattice mode).
  static double kernel(long m);

 private:
  cvec nonlocal(const cvec& f) const;  // i H (w f) plus optional tail term
  Lattice z_;
  ProjectorOptions opt_;
  rvec w_;
  cvec kernel_hat_;
};

SampledFunction cauchy_project(const SampledFunction& f, Projection kind, ProjectorOptions opt = {});
SampledFunction hilbert_transform(const SampledFunction& f, ProjectorOptions opt = {});

}  // namespace mtist::numerics

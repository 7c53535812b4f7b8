#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "mtist/rh.hpp"

using namespace mtist;
using namespace mtist::rh;

namespace {

const auto X = numerics::spatial_lattice(20, 1024);
const auto Z = numerics::spectral_lattice(1024, 1.0 / 16);

const ScatteringData& seeded(double amp = 0.3) {
  static std::map<double, ScatteringData> cache;
  auto it = cache.find(amp);
  if (it == cache.end())
    it = cache.emplace(amp, direct::direct_transform(fields::make_family(X, {"gaussian", amp, 1.0}), Z)).first;
  return it->second;
}

ScatteringData zero_data() { return direct::direct_transform(fields::make_family(X, {"zero", 0, 1}), Z); }

double l2z(const cvec& f, double dz) { return l2(f) * std::sqrt(dz); }

}  // namespace

TEST_CASE("time evolution of reflection data") {
  const auto& s = seeded();
  cvec rp, rm;
  evolve_reflection(s, 0.0, rp, rm);
  CHECK(sup_diff(rp, s.r_plus) == 0.0);
  CHECK(sup_diff(rm, s.r_minus) == 0.0);
  for (double t : {0.5, 3.0}) {
    evolve_reflection(s, t, rp, rm);
    for (int q = 0; q < s.size(); ++q) {
      CHECK(std::abs(std::abs(rp[q]) - std::abs(s.r_plus[q])) < 1e-15);
      CHECK(std::abs(rm[q] - s.r_minus[q] * std::exp(I * t / s.z[q])) < 1e-15);
    }
  }
}

TEST_CASE("jump data") {
  SUBCASE("zero reflection") {
    auto J = assemble_jump(zero_data(), 0.7, 0.3);
    for (size_t q = 0; q < J.R.size(); ++q)
      for (int i = 0; i < 4; ++i) {
        CHECK(J.R[q][i] == 0.0);
        CHECK(J.S[q][i] == 0.0);
      }
  }
  SUBCASE("gaussian seed") {
    const auto& s = seeded();
    for (double t : {0.0, 1.0})
      for (double x : {-3.0, 0.0, 2.5}) {
        auto J = assemble_jump(s, x, t);
        CHECK(J.tau_defect <= 1e-12);
        for (int q = 0; q < s.size(); ++q) {
          const double r2 = std::norm(s.r[q]);
          CHECK(std::abs(J.R[q][0] - (s.z[q] > 0 ? -r2 : r2)) < 1e-14);
        }
      }
  }
  SUBCASE("origin on the lattice") {
    ScatteringData s = seeded();
    s.z[s.size() / 2] = 0.0;
    CHECK_THROWS_AS(assemble_jump(s, 0.0, 0.0), DomainError);
  }
}

TEST_CASE("scalar delta problem") {
  SUBCASE("zero reflection") {
    auto D = solve_scalar_delta(zero_data(), 0.0);
    for (size_t q = 0; q < D.z.size(); ++q) {
      CHECK(D.delta_plus[q] == 1.0);
      CHECK(D.delta_minus[q] == 1.0);
    }
  }
  SUBCASE("gaussian seed") {
    const auto& s = seeded();
    for (double t : {0.0, 0.5}) {
      auto D = solve_scalar_delta(s, t);
      CHECK(D.modulus_defect < 1e-8);
      CHECK(D.jump_residual < 1e-8);
      CHECK(D.edge_defect < 2e-3);
      cvec rp, rm;
      evolve_reflection(s, t, rp, rm);
      for (int q = 0; q < s.size(); ++q) {
        CHECK(std::abs(std::abs(D.r_plus_delta[q]) - std::abs(rp[q])) < 1e-8 * (1 + std::abs(rp[q])));
        CHECK(std::abs(std::abs(D.r_minus_delta[q]) - std::abs(rm[q])) < 1e-8 * (1 + std::abs(rm[q])));
      }
    }
  }
  SUBCASE("branch ambiguity") {
    ScatteringData s = seeded();
    // force 1 + conj(r_+) r_- = 1 - 4 z |r_+|^2 below zero at one positive node
    int q = s.size() / 2 + 3;
    s.r_plus[q] = 1.0 / std::sqrt(2.0 * s.z[q]);
    s.r_minus[q] = -4.0 * s.z[q] * s.r_plus[q];
    CHECK_THROWS_AS(solve_scalar_delta(s, 0.0), DomainError);
  }
}

TEST_CASE("riemann-hilbert columns for zero data") {
  auto s = zero_data();
  rvec xs{0.0, 1.0, 7.5};
  auto P = solve_rh_positive(s, xs, 0.0);
  auto N = solve_rh_negative(s, {-7.5, -1.0, 0.0}, 0.0);
  for (const auto* sol : {&P, &N})
    for (const auto& c : sol->columns)
      for (size_t q = 0; q < s.z.size(); ++q) {
        CHECK(c.xi1[q] == 1.0);
        CHECK(c.xi2[q] == 0.0);
        CHECK(c.eta1[q] == 0.0);
        CHECK(c.eta2[q] == 1.0);
      }
  CHECK_THROWS_AS(solve_rh_positive(s, {-1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(solve_rh_negative(s, {1.0}, 0.0), DomainError);
}

TEST_CASE("positive branch") {
  const auto& s = seeded();
  RHSolver solver(s, 0.0, Branch::positive);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0, 10);
  int max_it = 0;
  for (int i = 0; i < 5; ++i) {
    auto c = solver.solve(U(rng));
    CHECK(c.residual <= 1e-9);
    CHECK(solver.jump_audit(c) < 1e-8);
    max_it = std::max(max_it, c.iterations);
    // columns tend to e1, e2 like 1/z toward the lattice edge
    const int n = s.size(), mid = n / 2 + n / 8;  // z near 8
    CHECK(std::abs(c.xi1.back() - 1.0) < 2e-3);
    CHECK(std::abs(c.eta2.front() - 1.0) < 2e-3);
    CHECK(std::abs(c.xi1.back() - 1.0) < std::abs(c.xi1[mid] - 1.0));
    CHECK(std::abs(c.eta2.back() - 1.0) < std::abs(c.eta2[mid] - 1.0));
  }
  CHECK(max_it < 60);

  SUBCASE("columns against the Volterra side") {
    // xi_- = e^{-i nu_+ sigma3} m_+
    rvec xs{0.0, 0.8, 2.3, 5.1};
    auto p = fields::make_family(X, {"gaussian", 0.3, 1.0});
    cvec z(s.z.begin(), s.z.end());
    auto js = direct::solve_jost(p, z, {4, xs});
    for (double x : xs) {
      const auto& sl = js.slice_at(x);
      const double nu = js.nu_plus[sl.node];
      auto c = solver.solve(sl.x);
      double e = 0;
      for (int q = 0; q < s.size(); ++q) {
        e = std::max(e, std::abs(c.xi1[q] - std::exp(-I * nu) * sl.m_plus.c1[q]));
        e = std::max(e, std::abs(c.xi2[q] - std::exp(I * nu) * sl.m_plus.c2[q]));
      }
      CHECK(e < 1e-5);
    }
  }
}

TEST_CASE("time-evolved positive branch") {
  auto p = fields::make_family(X, {"gaussian-compatible", 0.3, 1.0});
  auto s = direct::direct_transform(p, Z);
  RHSolver solver(s, 1.0, Branch::positive);
  for (double x : {0.0, 2.0, 6.0}) {
    auto c = solver.solve(x);
    CHECK(c.residual <= 1e-9);
    CHECK(solver.jump_audit(c) < 1e-8);
  }
  CHECK(unresolved_weight(s, 0.0) == 0.0);
  CHECK(unresolved_weight(s, 1.0) < 1e-2);
}

TEST_CASE("dense fallback agrees with the fixed point") {
  const auto& s = seeded();
  RHOptions it;
  it.dense_fallback = false;
  RHOptions dense;
  dense.max_iter = 0;  // go straight to the collocation solve
  RHSolver a(s, 0.0, Branch::positive, it), b(s, 0.0, Branch::positive, dense);
  auto ca = a.solve(1.3), cb = b.solve(1.3);
  CHECK(cb.dense);
  CHECK_FALSE(ca.dense);
  CHECK(sup_diff(ca.xi1, cb.xi1) < 1e-9);
  CHECK(sup_diff(ca.eta2, cb.eta2) < 1e-9);
  RHOptions none = dense;
  none.dense_fallback = false;
  RHSolver c(s, 0.0, Branch::positive, none);
  CHECK_THROWS_AS(c.solve(1.3), ConvergenceError);
}

TEST_CASE("column bound across scales") {
  // ||Phi - I||_2 <= C (||r_+||_2 + ||r_-||_2) with C bounded over amplitudes
  rvec C;
  for (double amp : {0.05, 0.1, 0.2, 0.3}) {
    const auto& s = seeded(amp);
    RHSolver solver(s, 0.0, Branch::positive);
    const double dz = solver.dz();
    const double rn = l2z(s.r_plus, dz) + l2z(s.r_minus, dz);
    double worst = 0;
    for (double x : {0.0, 1.0, 4.0}) {
      auto c = solver.solve(x);
      cvec d1 = c.xi1, d2 = c.eta2;
      for (auto& v : d1) v -= 1.0;
      for (auto& v : d2) v -= 1.0;
      double n = std::sqrt(std::pow(l2z(d1, dz), 2) + std::pow(l2z(c.xi2, dz), 2) + std::pow(l2z(c.eta1, dz), 2) +
                           std::pow(l2z(d2, dz), 2));
      worst = std::max(worst, n / rn);
    }
    MESSAGE("amplitude " << amp << ": C = " << worst);
    C.push_back(worst);
  }
  const double lo = *std::min_element(C.begin(), C.end()), hi = *std::max_element(C.begin(), C.end());
  CHECK(hi < 3 * lo);
  CHECK(hi < 10.0);
}

TEST_CASE("negative branch") {
  const auto& s = seeded();
  RHSolver solver(s, 0.0, Branch::negative);
  REQUIRE(solver.delta() != nullptr);
  for (double x : {-9.0, -2.0, 0.0}) {
    auto c = solver.solve(x);
    CHECK(c.residual <= 1e-9);
  }
  CHECK_THROWS_AS(solver.jump_audit(solver.solve(0.0)), PreconditionError);

  SUBCASE("weighted bound across amplitudes") {
    // sup_x <x> ||eta^(2) - 1||_{L2_z} against ||r_{-,delta}||_{H1}
    rvec lhs, C;
    for (double amp : {0.1, 0.2, 0.3}) {
      const auto& sa = seeded(amp);
      RHSolver sv(sa, 0.0, Branch::negative);
      const double dz = sv.dz();
      const cvec& rm = sv.r_minus();
      cvec d = numerics::fd_derivative(rm, dz);
      const double h1 = std::sqrt(std::pow(l2z(rm, dz), 2) + std::pow(l2z(d, dz), 2));
      double worst = 0;
      for (double x : {-6.0, -3.0, -1.0, 0.0}) {
        auto c = sv.solve(x);
        cvec e2 = c.eta2;
        for (auto& v : e2) v -= 1.0;
        worst = std::max(worst, std::sqrt(1 + x * x) * l2z(e2, dz));
      }
      lhs.push_back(worst);
      C.push_back(worst / h1);
      MESSAGE("amplitude " << amp << ": C = " << worst / h1);
    }
    CHECK(lhs[0] < lhs[1]);
    CHECK(lhs[1] < lhs[2]);
    // the constant grows with the data but stays bounded
    CHECK(C[0] <= C[1]);
    CHECK(C[1] <= C[2]);
    CHECK(C[2] < 1.0);
  }
}

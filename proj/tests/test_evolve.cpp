#include <doctest.h>

#include <cmath>

#include "mtist/evolve.hpp"

using namespace mtist;
using namespace mtist::evolve;

namespace {

const auto X = numerics::spatial_lattice(20, 1024);

EvolveOptions plain() {
  EvolveOptions o;
  o.stencil_dt = 0;
  return o;
}

const ISTRun& compatible_run() {
  static auto r = evolve_ist(fields::make_family(X, {"gaussian-compatible", 0.3, 1.0}), {}, {0.0, 0.5, 1.0}, plain());
  return r;
}

}  // namespace

TEST_CASE("spectral grid") {
  auto z = spectral_grid(X, {});
  CHECK(z.n == X.n);
  CHECK(z.h == doctest::Approx(1.0 / 16));
  EvolveOptions o;
  o.refine_origin = true;
  auto zr = spectral_grid(X, o);
  CHECK(zr.n == 2 * X.n);
  CHECK(zr.h == doctest::Approx(z.h / 2));
  o = {};
  o.nz = 100;
  CHECK_THROWS_AS(spectral_grid(X, o), ConfigError);
  o = {};
  o.z_max = -1;
  CHECK_THROWS_AS(spectral_grid(X, o), ConfigError);
  // a coarse z spacing would alias the spatial window
  o = {};
  o.nz = 256;
  CHECK_THROWS_AS(spectral_grid(X, o), ConfigError);
}

TEST_CASE("zero potential evolves to zero") {
  auto run = evolve_ist(fields::make_family(X, {"zero", 0, 1}), cvec(X.n, 0.0), {0.0, 1.0, 4.0}, plain());
  REQUIRE(run.all_ok());
  CHECK(run.u0_mismatch == 0.0);
  for (const auto& r : run.results) {
    CHECK(sup_abs(r.state.v) == 0.0);
    CHECK(sup_abs(r.state.u) == 0.0);
    CHECK(r.norms.l2 == 0.0);
  }
}

TEST_CASE("t = 0 equals the plain round trip") {
  const auto& run = compatible_run();
  REQUIRE(run.all_ok());
  auto direct = recon::inverse_transform(run.data, X, 0.0);
  CHECK(sup_diff(run.results[0].state.v, direct.v) == 0.0);
  CHECK(sup_diff(run.results[0].state.u, direct.u) == 0.0);
  CHECK(rel_l2(run.results[0].state.v, run.initial.v) < 1e-3);
}

TEST_CASE("evolved states") {
  const auto& run = compatible_run();
  REQUIRE(run.results.size() == 3);
  for (const auto& r : run.results) {
    CHECK(r.ok);
    CHECK(r.state.rh_residual <= 1e-9);
    CHECK(r.state.residual_mt1 < 1e-3);
    CHECK(r.u_path_gap < 0);  // no stencil requested
    // the L2 norm is conserved by the flow
    CHECK(std::abs(r.norms.l2 - run.results[0].norms.l2) < 1e-3 * run.results[0].norms.l2);
  }
  // reflection moduli are invariant
  cvec rp, rm;
  for (double t : run.times) {
    rh::evolve_reflection(run.data, t, rp, rm);
    for (int q = 0; q < run.data.size(); ++q) {
      CHECK(std::abs(std::abs(rp[q]) - std::abs(run.data.r_plus[q])) < 1e-15);
      CHECK(std::abs(std::abs(rm[q]) - std::abs(run.data.r_minus[q])) < 1e-15 * (1 + std::abs(rm[q])));
    }
  }
  // the state actually moves
  CHECK(rel_l2(run.results[2].state.v, run.results[0].state.v) > 1e-3);
}

TEST_CASE("input validation") {
  auto v0 = fields::make_family(X, {"gaussian-compatible", 0.3, 1.0});
  CHECK_THROWS_AS(evolve_ist(v0, {}, {0.5, 0.5}, plain()), ConfigError);
  CHECK_THROWS_AS(evolve_ist(v0, {}, {1.0, 0.5}, plain()), ConfigError);
  CHECK_THROWS_AS(evolve_ist(v0, cvec(7, 0.0), {0.0}, plain()), ConfigError);
  CHECK_THROWS_AS(evolve_ist(fields::make_family(X, {"gaussian", 2.0, 1.0}), {}, {0.0}, plain()), AdmissibilityError);
}

TEST_CASE("u0 mismatch is reported, not fatal") {
  auto v0 = fields::make_family(X, {"gaussian-compatible", 0.3, 1.0});
  cvec u0 = recon::reconstruct_u(v0.v, fields::nu_plus(v0.v, X.h), X.h);
  auto good = evolve_ist(v0, u0, {0.0}, plain());
  CHECK(good.u0_consistent);
  CHECK(good.u0_mismatch == 0.0);
  for (auto& x : u0) x += 0.01;
  auto bad = evolve_ist(v0, u0, {0.0}, plain());
  CHECK_FALSE(bad.u0_consistent);
  CHECK(bad.u0_mismatch == doctest::Approx(0.01));
  CHECK(bad.all_ok());
}

TEST_CASE("per-time failures are isolated") {
  // the plain Gaussian keeps r_+ ~ 1/z weight at the origin, so a large t is not resolvable
  auto run = evolve_ist(fields::make_family(X, {"gaussian", 0.3, 1.0}), {}, {0.0, 50.0}, plain());
  REQUIRE(run.results.size() == 2);
  CHECK(run.results[0].ok);
  CHECK_FALSE(run.results[1].ok);
  CHECK(run.results[1].exit_code == 4);
  CHECK_FALSE(run.results[1].error.empty());
  CHECK_FALSE(run.all_ok());
}

TEST_CASE("time stencil") {
  EvolveOptions o;
  o.stencil_dt = 1e-3;
  auto run = evolve_ist(fields::make_family(X, {"gaussian-compatible", 0.3, 1.0}), {}, {0.5}, o);
  REQUIRE(run.all_ok());
  const auto& r = run.results[0];
  CHECK(r.state.residual_mt2 >= 0);
  CHECK(r.state.residual_mt2 < 1e-2);
  // u from the x equation against u from the t equation
  CHECK(r.u_path_gap >= 0);
  CHECK(r.u_path_gap < 1e-2);
}

TEST_CASE("lipschitz in time") {
  const auto& base = compatible_run();
  cvec v = base.initial.v;
  for (int j = 0; j < X.n; ++j) v[j] *= 1.0 + 1e-3 * std::exp(-X.at(j) * X.at(j) / 4);
  auto pert = evolve_ist(fields::make_field(X, v), {}, {1.0}, plain());
  REQUIRE(pert.all_ok());
  const double d0 = rel_l2(v, base.initial.v);
  const double d1 = rel_l2(pert.results[0].state.v, base.results[2].state.v);
  MESSAGE("initial distance " << d0 << ", at t = 1 " << d1);
  CHECK(d1 < 10 * d0);
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mtist/fields.hpp"
#include "mtist/io.hpp"

using namespace mtist;
using namespace mtist::fields;

namespace {

const auto G = numerics::spatial_lattice(20, 2048);

PotentialField gaussian(double a) { return make_family(G, {"gaussian", a, 1.0}); }

}  // namespace

TEST_CASE("field construction") {
  auto p = gaussian(0.3);
  CHECK(p.v.size() == p.dv.size());
  CHECK(p.origin() == 1024);
  CHECK(p.x(p.origin()) == 0.0);
  // re-differentiating reproduces dv
  auto d = numerics::spectral_derivative(p.v, G.h);
  CHECK(sup_diff(d, p.dv) < 1e-8 * sup_abs(p.dv));
  double e = 0;
  for (int j = 0; j < G.n; ++j) {
    double x = G.at(j);
    e = std::max(e, std::abs(p.dv[j] + 0.6 * x * std::exp(-x * x)));
  }
  CHECK(e < 1e-10);
  auto q = make_family(G, {"gaussian", 0.3, 1.0}, Derivative::finite_difference);
  CHECK(sup_diff(q.dv, p.dv) < 1e-4);

  PotentialField bad = p;
  bad.dv.pop_back();
  CHECK_THROWS(bad.validate());
  CHECK_THROWS_AS(make_family(G, {"lorentzian", 1, 1}), ConfigError);
  CHECK_THROWS_AS(make_family(G, {"gaussian", 1, 0}), ConfigError);
}

TEST_CASE("families") {
  auto z = make_family(G, {"zero", 1, 1});
  CHECK(sup_abs(z.v) == 0.0);
  auto s = make_family(G, {"sech", 0.2, 2.0});
  CHECK(std::abs(s.v[1024] - 0.2) < 1e-15);
  CHECK(std::abs(s.v[1024 + 103] - 0.2 / std::cosh(G.at(1024 + 103) / 2)) < 1e-15);
  auto b = make_family(G, {"box", 0.1, 3.0});
  CHECK(std::abs(b.v[1024] - 0.1) < 1e-8);  // tanh(10) edge factor
  CHECK(std::abs(b.v[0]) < 1e-12);
  auto c = make_family(G, {"gaussian-compatible", 0.3, 1.0});
  CHECK(std::abs(origin_integral(c.v, G.h)) < 1e-12);
  CHECK(compatible_beta(G, 0.3, 1.0) == doctest::Approx(2.000477).epsilon(1e-5));
  // the plain Gaussian is not origin-compatible
  CHECK(std::abs(origin_integral(gaussian(0.3).v, G.h)) > 0.1);
}

TEST_CASE("norms") {
  SUBCASE("zero") {
    auto r = norms(make_family(G, {"zero", 0, 1}));
    CHECK(r.l2 == 0.0);
    CHECK(r.l1 == 0.0);
    CHECK(r.l21 == 0.0);
    CHECK(r.h1 == 0.0);
    CHECK(r.h2 == 0.0);
    CHECK(r.h11 == 0.0);
    CHECK(r.dv_l1 == 0.0);
  }
  SUBCASE("gaussian 0.3") {
    auto r = norms(gaussian(0.3));
    CHECK(std::abs(r.l2 * r.l2 - 0.09 * std::sqrt(PI / 2)) < 1e-8);
    CHECK(std::abs(r.l1 - 0.3 * std::sqrt(PI)) < 1e-8);
    CHECK(std::abs(r.dv_l1 - 0.6) < 1e-6);  // |x| kink at the origin
    // weighted and Sobolev norms, analytic: int x^2 e^{-2x^2} = sqrt(pi/2)/4, int x^4 e^{-2x^2} = 3 sqrt(pi/2)/16
    const double g0 = std::sqrt(PI / 2), g2 = g0 / 4, g4 = 3 * g0 / 16;
    CHECK(std::abs(r.l21 * r.l21 - 0.09 * (g0 + g2)) < 1e-8);
    CHECK(std::abs(r.h1 * r.h1 - 0.09 * (g0 + 4 * g2)) < 1e-8);
    // v_xx = 0.3 (4x^2 - 2) e^{-x^2}
    CHECK(std::abs(r.h2 * r.h2 - 0.09 * (g0 + 4 * g2 + 16 * g4 - 16 * g2 + 4 * g0)) < 1e-8);
    // dv weighted: int (1+x^2) 4x^2 e^{-2x^2}
    CHECK(std::abs(r.h11 * r.h11 - 0.09 * (g0 + g2 + 4 * g2 + 4 * g4)) < 1e-8);
    CHECK(r.l2 <= r.l21);
  }
  SUBCASE("x e^{-x^2}") {
    cvec v(G.n);
    for (int j = 0; j < G.n; ++j) v[j] = G.at(j) * std::exp(-G.at(j) * G.at(j));
    auto r = norms(make_field(G, v));
    CHECK(std::abs(r.l2 * r.l2 - 0.25 * std::sqrt(PI / 2)) < 1e-8);
  }
  SUBCASE("homogeneity") {
    auto p = make_family(G, {"sech", 0.25, 1.5});
    auto r = norms(p);
    const cplx c{-0.6, 1.3};
    cvec w = p.v;
    for (auto& x : w) x *= c;
    auto rc = norms(make_field(G, w));
    const double m = std::abs(c);
    CHECK(rc.l2 == doctest::Approx(m * r.l2).epsilon(1e-12));
    CHECK(rc.l1 == doctest::Approx(m * r.l1).epsilon(1e-12));
    CHECK(rc.l21 == doctest::Approx(m * r.l21).epsilon(1e-12));
    CHECK(rc.h1 == doctest::Approx(m * r.h1).epsilon(1e-12));
    CHECK(rc.h2 == doctest::Approx(m * r.h2).epsilon(1e-12));
    CHECK(rc.h11 == doctest::Approx(m * r.h11).epsilon(1e-12));
    CHECK(rc.dv_l1 == doctest::Approx(m * r.dv_l1).epsilon(1e-12));
  }
}

TEST_CASE("admissibility") {
  SUBCASE("zero") {
    auto a = check_admissibility(make_family(G, {"zero", 0, 1}));
    CHECK(a.lambda_plus == 0.0);
    CHECK(a.a_lower_bound == 1.0);
    CHECK(a.volterra_contractive);
    CHECK(a.a_nonvanishing);
  }
  SUBCASE("gaussian 0.3") {
    auto a = check_admissibility(gaussian(0.3));
    const double expect = 0.5 * 0.09 * std::sqrt(PI / 2) + std::sqrt(0.3 * std::sqrt(PI) * 0.6);
    CHECK(a.lambda_plus == doctest::Approx(expect).epsilon(1e-6));
    CHECK(a.lambda_plus == doctest::Approx(0.6213).epsilon(1e-4));
    CHECK(a.volterra_contractive);
    CHECK_FALSE(a.origin_compatible);
  }
  SUBCASE("gaussian 2.0") {
    auto a = check_admissibility(gaussian(2.0));
    CHECK(a.lambda_plus == doctest::Approx(0.5 * 4 * std::sqrt(PI / 2) + std::sqrt(2 * std::sqrt(PI) * 4)).epsilon(1e-6));
    CHECK(a.lambda_plus == doctest::Approx(6.27).epsilon(1e-3));
    CHECK_FALSE(a.volterra_contractive);
  }
  SUBCASE("flags follow the numbers") {
    for (double amp : {0.01, 0.1, 0.3, 0.5, 1.0}) {
      auto a = check_admissibility(gaussian(amp));
      CHECK(a.volterra_contractive == (a.lambda_plus < 1));
      CHECK(a.a_nonvanishing == (a.a_lower_bound > 0));
    }
  }
  SUBCASE("small-amplitude scaling") {
    // lambda_+(c v) / |c| -> sqrt(||v||_1 ||v_x||_1)
    auto r = norms(gaussian(1.0));
    const double slope = std::sqrt(r.l1 * r.dv_l1);
    for (double c : {1e-2, 1e-3, 1e-4}) {
      auto a = check_admissibility(gaussian(c));
      CHECK(std::abs(a.lambda_plus / c - slope) < 2 * c);
    }
  }
  SUBCASE("compatible seed") {
    auto a = check_admissibility(make_family(G, {"gaussian-compatible", 0.3, 1.0}));
    CHECK(a.origin_compatible);
    CHECK(a.volterra_contractive);
  }
}

TEST_CASE("nu_plus profile") {
  auto p = gaussian(0.3);
  auto nu = nu_plus(p.v, G.h);
  CHECK(nu.back() == 0.0);
  CHECK(nu.front() == doctest::Approx(-0.5 * 0.09 * std::sqrt(PI / 2)).epsilon(1e-8));
  for (int j = 1; j < G.n; ++j) CHECK(nu[j] >= nu[j - 1]);
}

TEST_CASE("potential csv") {
  namespace fs = std::filesystem;
  fs::create_directories("test_tmp");
  auto p = make_family(G, {"sech", 0.2, 1.0});
  for (int j = 0; j < G.n; ++j) p.v[j] *= std::exp(I * 0.3 * G.at(j));
  p = make_field(G, p.v);
  io::write_potential_csv("test_tmp/pot.csv", p);
  auto q = load_csv("test_tmp/pot.csv");
  CHECK(q.grid.n == G.n);
  CHECK(q.grid.x0 == doctest::Approx(G.x0));
  CHECK(q.grid.h == doctest::Approx(G.h));
  CHECK(sup_diff(q.v, p.v) == 0.0);

  std::ofstream("test_tmp/short.csv") << "x,re,im\n0,1,0\n1,1,0\n";
  CHECK_THROWS_AS(load_csv("test_tmp/short.csv"), ConfigError);
  std::ofstream("test_tmp/garbage.csv") << "# comment\n0,abc\n";
  CHECK_THROWS_AS(load_csv("test_tmp/garbage.csv"), ConfigError);
  CHECK_THROWS_AS(load_csv("test_tmp/missing.csv"), ConfigError);
}

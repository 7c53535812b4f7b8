#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mtist/config.hpp"
#include "mtist/io.hpp"

using namespace mtist;
using namespace mtist::config;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  auto c = parse("");
  CHECK(c.grid.L == 20.0);
  CHECK(c.grid.n == 2048);
  CHECK(c.potential.family == "gaussian");
  CHECK(c.potential.amplitude == 0.3);
  CHECK(c.times == rvec{0.0});
  CHECK(c.tolerances.volterra == 1e-6);
  CHECK(c.tolerances.rh == 1e-9);
  CHECK(c.flags.dense_fallback);
  CHECK_FALSE(c.flags.taper);
  CHECK(c.oracle.closure == oracle::Closure::symmetric);
  CHECK(c.oracle.extension == 8);
}

TEST_CASE("full file") {
  const std::string text = R"(# run
[grid]
L = 15
n = 512   ; comment
[potential]
family = sech
amplitude = 0.2
width = 2
[spectral]
nz = 1024
z_max = 40
[times]
values = 0, 0.5 1.0
[tolerances]
volterra = 1e-5
rh = 1e-10
[outputs]
directory = results/a
[flags]
taper = yes
dense_fallback = off
refine_origin = true
[oracle]
dt = 5e-4
extension = 4
closure = mean-free
stencil_dt = 0
)";
  auto c = parse(text);
  CHECK(c.grid.L == 15);
  CHECK(c.grid.n == 512);
  CHECK(c.potential.family == "sech");
  CHECK(c.potential.width == 2);
  CHECK(c.spectral.nz == 1024);
  CHECK(c.spectral.z_max == 40);
  CHECK(c.times == rvec{0.0, 0.5, 1.0});
  CHECK(c.tolerances.volterra == 1e-5);
  CHECK(c.outputs == "results/a");
  CHECK(c.flags.taper);
  CHECK_FALSE(c.flags.dense_fallback);
  CHECK(c.flags.refine_origin);
  CHECK(c.oracle.dt == 5e-4);
  CHECK(c.oracle.extension == 4);
  CHECK(c.oracle.closure == oracle::Closure::mean_free);
  CHECK(c.stencil_dt == 0);
  CHECK(c.source == text);

  auto o = c.evolve_options();
  CHECK(o.nz == 1024);
  CHECK(o.z_max == 40);
  CHECK(o.refine_origin);
  CHECK(o.inverse.rh.residual_tol == 1e-10);
  CHECK_FALSE(o.inverse.rh.dense_fallback);
  CHECK(o.inverse.rh.projector.taper);
  CHECK(o.stencil_dt == 0);

  auto p = c.potential_field();
  CHECK(p.grid.n == 512);
  CHECK(p.v[256].real() == doctest::Approx(0.2));
  CHECK(closure_name(c.oracle.closure) == "mean-free");
}

TEST_CASE("errors name the line and the key") {
  CHECK(error_of("[grid]\nn = 1000\n").find("cfg:2: grid.n") != std::string::npos);
  CHECK(error_of("[grid]\nL = -1\n").find("cfg:2: grid.L") != std::string::npos);
  CHECK(error_of("\n\n[grid]\nwidth = 3\n").find("cfg:4: grid.width: unknown key") != std::string::npos);
  CHECK(error_of("[grid]\nL = abc\n").find("cannot read") != std::string::npos);
  CHECK(error_of("[grid\n").find("cfg:1") != std::string::npos);
  CHECK(error_of("just words\n").find("cfg:1: expected key = value") != std::string::npos);
  CHECK(error_of("[grid]\nn = 8\nn = 16\n").find("duplicate") != std::string::npos);
  CHECK(error_of("[flags]\ntaper = maybe\n").find("flags.taper") != std::string::npos);
  CHECK(error_of("[tolerances]\nrh = 0\n").find("tolerances.rh") != std::string::npos);
  CHECK(error_of("[times]\nvalues = 1, 0.5\n").find("increase") != std::string::npos);
  CHECK(error_of("[times]\nvalues = -1\n").find("times.values") != std::string::npos);
  CHECK(error_of("[times]\nvalues = 0, x\n").find("list item") != std::string::npos);
  CHECK(error_of("[oracle]\nclosure = left\n").find("cfg:2: oracle.closure") != std::string::npos);
  CHECK(error_of("[oracle]\nextension = 3\n").find("oracle.extension") != std::string::npos);
  CHECK(error_of("[spectral]\nnz = 12\n").find("spectral.nz") != std::string::npos);
  CHECK_THROWS_AS(load("test_tmp/does-not-exist.cfg"), ConfigError);
  auto bad = parse("[potential]\nfamily = lorentzian\n");
  CHECK_THROWS_AS(bad.potential_field(), ConfigError);
}

TEST_CASE("potential from file") {
  namespace fs = std::filesystem;
  fs::create_directories("test_tmp");
  auto g = numerics::spatial_lattice(10, 256);
  auto p = fields::make_family(g, {"sech", 0.25, 1.0});
  io::write_potential_csv("test_tmp/cfg_pot.csv", p);
  std::ofstream("test_tmp/run.cfg") << "[grid]\nL = 10\nn = 256\n[potential]\nfile = test_tmp/cfg_pot.csv\n";
  auto c = load("test_tmp/run.cfg");
  auto q = c.potential_field();
  CHECK(sup_diff(q.v, p.v) == 0.0);
  auto mismatch = parse("[grid]\nL = 10\nn = 512\n[potential]\nfile = test_tmp/cfg_pot.csv\n");
  CHECK_THROWS_AS(mismatch.potential_field(), ConfigError);
}

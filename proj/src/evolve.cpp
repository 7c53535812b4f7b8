#include "mtist/evolve.hpp"

#include <cmath>

namespace mtist::evolve {

Lattice spectral_grid(const Lattice& x, const EvolveOptions& opt) {
  int nz = opt.nz > 0 ? opt.nz : x.n;
  if (!numerics::is_pow2(nz) || nz < 8) throw ConfigError("spectral node count must be a power of two >= 8");
  if (!(opt.z_max > 0)) throw ConfigError("z_max must be positive");
  double dz = 2 * opt.z_max / nz;
  if (opt.refine_origin) {
    nz *= 2;
    dz /= 2;
  }
  const double width = x.n * x.h;
  if (PI / dz < width * (1 - 1e-12))
    throw ConfigError("z spacing " + std::to_string(dz) + " aliases the spatial window; need pi/dz >= 2L");
  return numerics::spectral_lattice(nz, dz);
}

bool ISTRun::all_ok() const {
  for (const auto& r : results)
    if (!r.ok) return false;
  return true;
}

ISTRun evolve_ist(const PotentialField& v0, const cvec& u0, const rvec& times, const EvolveOptions& opt) {
  v0.validate();
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ConfigError("target times must be strictly increasing");
  ISTRun run;
  run.initial = v0;
  run.times = times;
  const double h = v0.grid.h;
  cvec slaved = recon::reconstruct_u(v0.v, fields::nu_plus(v0.v, h), h);
  if (u0.empty()) {
    run.u0 = slaved;
  } else {
    if (u0.size() != v0.v.size()) throw ConfigError("u0 and v0 sample counts differ");
    run.u0 = u0;
    run.u0_mismatch = sup_diff(u0, slaved);
    run.u0_consistent = run.u0_mismatch <= opt.u0_tolerance;
  }
  run.data = direct::direct_transform(v0, spectral_grid(v0.grid, opt), opt.scattering);

  for (double t : times) {
    TimeResult tr;
    tr.t = t;
    try {
      tr.state = recon::inverse_transform(run.data, v0.grid, t, opt.inverse);
      if (opt.stencil_dt > 0) {
        auto lo = recon::inverse_transform(run.data, v0.grid, t - opt.stencil_dt, opt.inverse);
        auto hi = recon::inverse_transform(run.data, v0.grid, t + opt.stencil_dt, opt.inverse);
        tr.state.residual_mt2 = recon::mt2_residual(lo.v, hi.v, tr.state.u, tr.state.v, opt.stencil_dt);
        cvec u2 = recon::reconstruct_u_secondary(lo.v, tr.state.v, hi.v, opt.stencil_dt, h);
        tr.u_path_gap = sup_diff(u2, tr.state.u);
      }
      tr.norms = fields::norms(fields::make_field(v0.grid, tr.state.v));
      tr.ok = true;
    } catch (const Error& e) {
      tr.error = e.what();
      tr.exit_code = e.exit_code();
    } catch (const std::exception& e) {
      tr.error = e.what();
      tr.exit_code = 1;
    }
    run.results.push_back(std::move(tr));
  }
  return run;
}

}  // namespace mtist::evolve

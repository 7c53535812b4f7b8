#include "mtist/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "mtist/io.hpp"

namespace mtist::commands {

using io::json;

namespace {

struct Session {
  const config::RunConfig& cfg;
  std::string dir;
  const Context& ctx;

  Session(const config::RunConfig& c, const Context& x) : cfg(c), dir(x.out_dir.empty() ? c.outputs : x.out_dir), ctx(x) {
    io::ensure_directory(dir);
  }
  std::string path(const std::string& name) const { return dir + "/" + name; }
  void say(const std::string& msg) const {
    if (ctx.verbose) (ctx.log ? *ctx.log : std::cerr) << msg << "\n";
  }
};

json norms_json(const fields::NormReport& n) {
  return {{"l2", n.l2}, {"l1", n.l1}, {"l21", n.l21}, {"h1", n.h1}, {"h2", n.h2}, {"h11", n.h11}, {"dv_l1", n.dv_l1}};
}

json admissibility_json(const fields::Admissibility& a) {
  return {{"lambda_plus", a.lambda_plus},
          {"a_lower_bound", a.a_lower_bound},
          {"volterra_contractive", a.volterra_contractive},
          {"a_nonvanishing", a.a_nonvanishing},
          {"origin_defect", a.origin_defect},
          {"origin_compatible", a.origin_compatible}};
}

// Admissibility report plus exit-code gate.
fields::Admissibility gate(const Session& s, const fields::PotentialField& p) {
  auto a = fields::check_admissibility(p);
  json j = admissibility_json(a);
  j["norms"] = norms_json(fields::norms(p));
  io::write_json(s.path("admissibility.json"), j);
  if (!a.volterra_contractive)
    throw AdmissibilityError("potential is not admissible: lambda_plus = " + io::fmt(a.lambda_plus) + " >= 1");
  s.say("lambda_plus = " + io::fmt(a.lambda_plus));
  return a;
}

direct::ScatteringOptions scattering_options() {
  direct::ScatteringOptions o;
  o.jost.enforce_admissibility = false;  // gated above
  return o;
}

void check_integrals(const config::RunConfig& cfg, const direct::ScatteringData& s) {
  if (s.integral_mismatch > cfg.tolerances.volterra)
    throw ConvergenceError("Wronskian and integral forms of the scattering data differ by " +
                           io::fmt(s.integral_mismatch) + "; refine the spatial grid");
}

json state_json(const evolve::TimeResult& r) {
  json j = {{"t", r.t}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    j["exit_code"] = r.exit_code;
    return j;
  }
  const auto& st = r.state;
  j["residual_mt1"] = st.residual_mt1;
  if (st.residual_mt2 >= 0) j["residual_mt2"] = st.residual_mt2;
  if (r.u_path_gap >= 0) j["u_path_gap"] = r.u_path_gap;
  j["seam"] = st.seam;
  j["tail_estimate"] = st.tail_estimate;
  j["rh_residual"] = st.rh_residual;
  j["rh_iterations"] = st.rh_iterations;
  j["dense_used"] = st.dense_used;
  j["nu_plus_left"] = st.nu_plus.front();
  j["norms"] = norms_json(r.norms);
  return j;
}

std::string time_tag(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "state_t%.6f.csv", t);
  return buf;
}

double rel_l2_range(const cvec& a, const cvec& b, int lo, int hi) {
  cvec x(a.begin() + lo, a.begin() + hi), y(b.begin() + lo, b.begin() + hi);
  return rel_l2(x, y);
}

}  // namespace

int scatter(const config::RunConfig& cfg, const Context& ctx) {
  Session s(cfg, ctx);
  auto p = cfg.potential_field();
  gate(s, p);
  auto zg = evolve::spectral_grid(p.grid, cfg.evolve_options());
  cvec z(zg.n);
  for (int q = 0; q < zg.n; ++q) z[q] = zg.at(q);
  auto jo = scattering_options().jost;
  jo.probes = {-0.5 * cfg.grid.L, 0.25 * cfg.grid.L, 0.5 * cfg.grid.L};
  auto js = direct::solve_jost(p, z, jo);
  auto sd = direct::scattering_coefficients(js, p);
  sd.zgrid = zg;
  check_integrals(cfg, sd);
  io::write_scattering_csv(s.path("scattering.csv"), sd);
  io::save_scattering(s.path("scattering.bin"), sd);

  auto sym = direct::verify_symmetries(js, p);
  auto uni = direct::unimodularity(sd);
  double constraint = 0;
  for (int q = 0; q < sd.size(); ++q)
    constraint = std::max(constraint, std::abs(sd.r_minus[q] + 4.0 * sd.z[q] * sd.r_plus[q]));
  json j = {{"conjugation_defect", sym.conjugation_defect},
            {"parity_defect", sym.parity_defect},
            {"wronskian_defect", sym.wronskian_defect},
            {"r_parity_defect", sym.r_parity_defect},
            {"unimodularity_real_k", uni.real_k},
            {"unimodularity_imaginary_k", uni.imaginary_k},
            {"reflection_floor", uni.reflection_floor},
            {"r_constraint_defect", constraint},
            {"integral_mismatch", sd.integral_mismatch},
            {"r_origin_limit", std::abs(direct::reflection_origin_limit(p, jo))},
            {"nu", sd.nu}};
  io::write_json(s.path("symmetry-report.json"), j);
  s.say("scattering data written to " + s.dir);
  return 0;
}

int roundtrip(const config::RunConfig& cfg, const Context& ctx) {
  Session s(cfg, ctx);
  auto p = cfg.potential_field();
  gate(s, p);
  auto opt = cfg.evolve_options();
  opt.scattering = scattering_options();
  opt.stencil_dt = 0;
  auto run = evolve::evolve_ist(p, {}, {0.0}, opt);
  check_integrals(cfg, run.data);
  io::write_scattering_csv(s.path("scattering.csv"), run.data);
  const auto& r = run.results.front();
  if (!r.ok) {
    if (r.exit_code == 4) throw ConvergenceError(r.error);
    throw DomainError(r.error);
  }
  io::write_state_csv(s.path("state.csv"), r.state);
  const int n = p.grid.n, o = n / 2;
  json j = state_json(r);
  j["rel_l2_positive"] = rel_l2_range(r.state.v, p.v, o, n);
  j["rel_l2_negative"] = rel_l2_range(r.state.v, p.v, 0, o + 1);
  j["rel_l2_dv"] = rel_l2(r.state.dv, p.dv);
  io::write_json(s.path("roundtrip.json"), j);
  s.say("round trip relative L2: " + io::fmt(j["rel_l2_positive"]) + " (x >= 0), " + io::fmt(j["rel_l2_negative"]) +
        " (x <= 0)");
  return 0;
}

int evolve(const config::RunConfig& cfg, const Context& ctx) {
  Session s(cfg, ctx);
  auto p = cfg.potential_field();
  gate(s, p);
  auto opt = cfg.evolve_options();
  opt.scattering = scattering_options();
  auto run = evolve::evolve_ist(p, {}, cfg.times, opt);
  check_integrals(cfg, run.data);
  json states = json::array(), files = json::array();
  bool failed = false;
  for (const auto& r : run.results) {
    states.push_back(state_json(r));
    if (r.ok) {
      const std::string name = time_tag(r.t);
      io::write_state_csv(s.path(name), r.state);
      files.push_back(name);
      s.say("t = " + io::fmt(r.t) + " written to " + name);
    } else {
      failed = true;
      s.say("t = " + io::fmt(r.t) + " failed: " + r.error);
    }
  }
  io::write_json(s.path("residuals.json"), {{"states", states}, {"u0_mismatch", run.u0_mismatch}});
  json manifest = {{"config", cfg.source},
                   {"config_sha256", io::sha256_hex(cfg.source)},
                   {"potential_sha256", io::sha256_hex(p.v)},
                   {"grid", {{"L", cfg.grid.L}, {"n", cfg.grid.n}}},
                   {"spectral", {{"n", run.data.size()}, {"dz", run.data.zgrid.h}}},
                   {"times", cfg.times},
                   {"tolerances", {{"volterra", cfg.tolerances.volterra}, {"rh", cfg.tolerances.rh}}},
                   {"outputs", files}};
  io::write_json(s.path("manifest.json"), manifest);
  return failed ? 3 : 0;
}

int oracle_compare(const config::RunConfig& cfg, const Context& ctx) {
  Session s(cfg, ctx);
  auto p = cfg.potential_field();
  gate(s, p);
  auto opt = cfg.evolve_options();
  opt.scattering = scattering_options();
  opt.stencil_dt = 0;
  auto run = evolve::evolve_ist(p, {}, cfg.times, opt);
  check_integrals(cfg, run.data);

  const int n = p.grid.n, F = cfg.oracle.extension;
  const double h = p.grid.h, dt = cfg.oracle.dt;
  oracle::OracleOptions oo;
  oo.dt = dt;
  oo.slave.closure = cfg.oracle.closure;
  auto s0 = oracle::make_state(oracle::embed(p.v, F), h, 0.0, oo.slave);
  const double mass0 = l2(s0.v);
  oracle::ConservationMonitor mon(h, dt, (F - 1) * n / 2);
  std::vector<long> want;
  for (double t : cfg.times) want.push_back(std::lround(t / dt));
  std::vector<oracle::MTState> snaps(cfg.times.size());
  std::vector<oracle::ConservationReport> cons(cfg.times.size());
  long step = 0;
  s.say("oracle on " + std::to_string(n * F) + " nodes, dt = " + io::fmt(dt));
  oracle::integrate(s0, h, cfg.times.back(), oo, [&](const oracle::MTState& st) {
    mon.push(st);
    for (size_t i = 0; i < want.size(); ++i)
      if (want[i] == step) {
        snaps[i] = st;
        cons[i] = mon.report();
      }
    ++step;
  });

  std::string csv = "t,v_distance,u_distance,u_distance_unanchored,mass_residual,momentum_residual,mass_drift\n";
  bool failed = false;
  oracle::SlaveOptions right;
  right.closure = oracle::Closure::right;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < cfg.times.size(); ++i) {
    const auto& r = run.results[i];
    cvec vo = oracle::window(snaps[i].v, n), uo = oracle::window(snaps[i].u, n);
    cvec ua = oracle::slave_u(vo, h, right);
    double dv = nan, du = nan, dun = nan;
    if (r.ok) {
      dv = rel_l2(r.state.v, vo);
      du = rel_l2(r.state.u, ua);
      dun = rel_l2(r.state.u, uo);
    } else {
      failed = true;
    }
    const double drift = mass0 > 0 ? std::abs(l2(snaps[i].v) - mass0) / mass0 : l2(snaps[i].v);
    csv += io::fmt(cfg.times[i]) + "," + io::fmt(dv) + "," + io::fmt(du) + "," + io::fmt(dun) + "," +
           io::fmt(cons[i].mass.sup) + "," + io::fmt(cons[i].momentum.sup) + "," + io::fmt(drift) + "\n";
    s.say("t = " + io::fmt(cfg.times[i]) + ": v distance " + io::fmt(dv) + ", u distance " + io::fmt(du));
  }
  io::write_text(s.path("comparison.csv"), csv);
  return failed ? 3 : 0;
}

int norms(const config::RunConfig& cfg, const Context& ctx) {
  Session s(cfg, ctx);
  auto p = cfg.potential_field();
  auto a = fields::check_admissibility(p);
  json j = norms_json(fields::norms(p));
  j["admissibility"] = admissibility_json(a);
  j["nu_plus_left"] = fields::nu_plus(p.v, p.grid.h).front();
  io::write_json(s.path("norms.json"), j);
  s.say("norms written to " + s.dir);
  return 0;
}

int run(const std::string& name, const std::string& config_path, const Context& ctx, std::ostream& err) {
  try {
    auto cfg = config::load(config_path);
    if (name == "scatter") return scatter(cfg, ctx);
    if (name == "roundtrip") return roundtrip(cfg, ctx);
    if (name == "evolve") return evolve(cfg, ctx);
    if (name == "oracle-compare") return oracle_compare(cfg, ctx);
    if (name == "norms") return norms(cfg, ctx);
    err << "unknown command '" << name << "'\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mtist::commands

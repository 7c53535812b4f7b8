#include "mtist/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mtist::config {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> e, std::string origin) : e_(std::move(e)), origin_(std::move(origin)) {}

  template <class T>
  void get(const std::string& key, T& out) {
    auto it = e_.find(key);
    if (it == e_.end()) return;
    used_.insert(key);
    try {
      out = boost::lexical_cast<T>(it->second.value);
    } catch (const boost::bad_lexical_cast&) {
      fail(it->second.line, key, "cannot read '" + it->second.value + "'");
    }
  }

  void get(const std::string& key, bool& out) {
    auto it = e_.find(key);
    if (it == e_.end()) return;
    used_.insert(key);
    std::string v = boost::to_lower_copy(it->second.value);
    if (v == "true" || v == "yes" || v == "on" || v == "1")
      out = true;
    else if (v == "false" || v == "no" || v == "off" || v == "0")
      out = false;
    else
      fail(it->second.line, key, "expected a boolean, got '" + it->second.value + "'");
  }

  void get(const std::string& key, std::string& out) {
    auto it = e_.find(key);
    if (it == e_.end()) return;
    used_.insert(key);
    out = it->second.value;
  }

  void get_list(const std::string& key, rvec& out) {
    auto it = e_.find(key);
    if (it == e_.end()) return;
    used_.insert(key);
    out.clear();
    std::vector<std::string> parts;
    boost::split(parts, it->second.value, boost::is_any_of(", \t"), boost::token_compress_on);
    for (auto& p : parts) {
      if (p.empty()) continue;
      try {
        out.push_back(boost::lexical_cast<double>(p));
      } catch (const boost::bad_lexical_cast&) {
        fail(it->second.line, key, "cannot read list item '" + p + "'");
      }
    }
  }

  [[noreturn]] void fail(int line, const std::string& key, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + key + ": " + msg);
  }

  int line_of(const std::string& key) const {
    auto it = e_.find(key);
    return it == e_.end() ? 0 : it->second.line;
  }

  void reject_unknown() const {
    for (const auto& [k, e] : e_)
      if (!used_.count(k)) fail(e.line, k, "unknown key");
  }

 private:
  std::map<std::string, Entry> e_;
  std::set<std::string> used_;
  std::string origin_;
};

}  // namespace

std::string closure_name(oracle::Closure c) {
  switch (c) {
    case oracle::Closure::right: return "right";
    case oracle::Closure::mean_free: return "mean-free";
    default: return "symmetric";
  }
}

RunConfig parse(const std::string& text, const std::string& origin) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    boost::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = boost::trim_copy(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = boost::trim_copy(line.substr(0, eq));
    std::string val = boost::trim_copy(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    if (entries.count(full))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + full + ": duplicate key");
    entries[full] = {val, lineno};
  }

  RunConfig c;
  c.source = text;
  Reader r(std::move(entries), origin);
  r.get("grid.L", c.grid.L);
  r.get("grid.n", c.grid.n);
  r.get("potential.family", c.potential.family);
  r.get("potential.amplitude", c.potential.amplitude);
  r.get("potential.width", c.potential.width);
  r.get("potential.file", c.potential.file);
  r.get("spectral.nz", c.spectral.nz);
  r.get("spectral.z_max", c.spectral.z_max);
  r.get_list("times.values", c.times);
  r.get("tolerances.volterra", c.tolerances.volterra);
  r.get("tolerances.rh", c.tolerances.rh);
  r.get("outputs.directory", c.outputs);
  r.get("flags.taper", c.flags.taper);
  r.get("flags.dense_fallback", c.flags.dense_fallback);
  r.get("flags.refine_origin", c.flags.refine_origin);
  r.get("oracle.dt", c.oracle.dt);
  r.get("oracle.extension", c.oracle.extension);
  std::string closure = closure_name(c.oracle.closure);
  r.get("oracle.closure", closure);
  r.get("oracle.stencil_dt", c.stencil_dt);
  r.reject_unknown();

  if (closure == "right")
    c.oracle.closure = oracle::Closure::right;
  else if (closure == "mean-free")
    c.oracle.closure = oracle::Closure::mean_free;
  else if (closure == "symmetric")
    c.oracle.closure = oracle::Closure::symmetric;
  else
    r.fail(r.line_of("oracle.closure"), "oracle.closure", "expected right, mean-free or symmetric");

  if (!(c.grid.L > 0)) r.fail(r.line_of("grid.L"), "grid.L", "must be positive");
  if (c.grid.n < 8 || !numerics::is_pow2(c.grid.n)) r.fail(r.line_of("grid.n"), "grid.n", "must be a power of two >= 8");
  if (c.spectral.nz != 0 && (c.spectral.nz < 8 || !numerics::is_pow2(c.spectral.nz)))
    r.fail(r.line_of("spectral.nz"), "spectral.nz", "must be 0 or a power of two >= 8");
  if (!(c.spectral.z_max > 0)) r.fail(r.line_of("spectral.z_max"), "spectral.z_max", "must be positive");
  if (!(c.tolerances.volterra > 0)) r.fail(r.line_of("tolerances.volterra"), "tolerances.volterra", "must be positive");
  if (!(c.tolerances.rh > 0)) r.fail(r.line_of("tolerances.rh"), "tolerances.rh", "must be positive");
  if (!(c.potential.width > 0)) r.fail(r.line_of("potential.width"), "potential.width", "must be positive");
  if (!(c.oracle.dt > 0)) r.fail(r.line_of("oracle.dt"), "oracle.dt", "must be positive");
  if (c.oracle.extension < 1 || !numerics::is_pow2(c.oracle.extension))
    r.fail(r.line_of("oracle.extension"), "oracle.extension", "must be a power of two >= 1");
  if (!(c.stencil_dt >= 0)) r.fail(r.line_of("oracle.stencil_dt"), "oracle.stencil_dt", "must be >= 0");
  if (c.times.empty()) r.fail(r.line_of("times.values"), "times.values", "needs at least one time");
  for (size_t i = 0; i < c.times.size(); ++i) {
    if (c.times[i] < 0) r.fail(r.line_of("times.values"), "times.values", "times must be >= 0");
    if (i && !(c.times[i] > c.times[i - 1])) r.fail(r.line_of("times.values"), "times.values", "times must increase");
  }
  return c;
}

RunConfig load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

evolve::EvolveOptions RunConfig::evolve_options() const {
  evolve::EvolveOptions o;
  o.nz = spectral.nz;
  o.z_max = spectral.z_max;
  o.refine_origin = flags.refine_origin;
  o.inverse.rh.residual_tol = tolerances.rh;
  o.inverse.rh.dense_fallback = flags.dense_fallback;
  o.inverse.rh.projector.taper = flags.taper;
  o.stencil_dt = stencil_dt;
  return o;
}

fields::PotentialField RunConfig::potential_field() const {
  if (!potential.file.empty()) {
    auto p = fields::load_csv(potential.file);
    const double L = -p.grid.x0;
    if (p.grid.n != grid.n || std::abs(L - grid.L) > 1e-9 * grid.L)
      throw ConfigError("potential file " + potential.file + " does not match [grid] (n = " + std::to_string(p.grid.n) +
                        ", L = " + std::to_string(L) + ")");
    return p;
  }
  return fields::make_family(lattice(), {potential.family, potential.amplitude, potential.width});
}

}  // namespace mtist::config

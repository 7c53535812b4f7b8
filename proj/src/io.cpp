#include "mtist/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace mtist::io {

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

void write_json(const std::string& path, json j) {
  j["schema_version"] = schema_version;
  write_text(path, j.dump(2) + "\n");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

void write_scattering_csv(const std::string& path, const direct::ScatteringData& s) {
  std::string out = "z,re_a,im_a,re_r_plus,im_r_plus,re_r_minus,im_r_minus\n";
  for (int q = 0; q < s.size(); ++q) {
    out += fmt(s.z[q]) + "," + fmt(s.a[q].real()) + "," + fmt(s.a[q].imag()) + "," + fmt(s.r_plus[q].real()) + "," +
           fmt(s.r_plus[q].imag()) + "," + fmt(s.r_minus[q].real()) + "," + fmt(s.r_minus[q].imag()) + "\n";
  }
  write_text(path, out);
}

void write_state_csv(const std::string& path, const recon::ReconstructedState& st) {
  std::string out = "x,re_v,im_v,re_u,im_u,nu_plus\n";
  for (int j = 0; j < st.grid.n; ++j) {
    out += fmt(st.grid.at(j)) + "," + fmt(st.v[j].real()) + "," + fmt(st.v[j].imag()) + "," + fmt(st.u[j].real()) +
           "," + fmt(st.u[j].imag()) + "," + fmt(st.nu_plus[j]) + "\n";
  }
  write_text(path, out);
}

void write_potential_csv(const std::string& path, const fields::PotentialField& p) {
  std::string out = "x,re_v,im_v\n";
  for (int j = 0; j < p.grid.n; ++j)
    out += fmt(p.grid.at(j)) + "," + fmt(p.v[j].real()) + "," + fmt(p.v[j].imag()) + "\n";
  write_text(path, out);
}

namespace {

constexpr char magic[8] = {'M', 'T', 'S', 'C', 'A', 'T', '0', '1'};

void put_vec(std::ofstream& f, const cvec& v) {
  f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
}

void get_vec(std::ifstream& f, cvec& v, size_t n) {
  v.resize(n);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
}

}  // namespace

void save_scattering(const std::string& path, const direct::ScatteringData& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f.write(magic, sizeof magic);
  const int64_t n = s.size();
  const double head[5] = {s.zgrid.x0, s.zgrid.h, s.nu, s.t, s.integral_mismatch};
  f.write(reinterpret_cast<const char*>(&n), sizeof n);
  f.write(reinterpret_cast<const char*>(head), sizeof head);
  f.write(reinterpret_cast<const char*>(s.z.data()), static_cast<std::streamsize>(n * sizeof(double)));
  for (const cvec* v : {&s.a, &s.B, &s.b, &s.r, &s.r_plus, &s.r_minus}) put_vec(f, *v);
}

direct::ScatteringData load_scattering(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);
  char m[8];
  f.read(m, sizeof m);
  if (!f || !std::equal(m, m + 8, magic)) throw ConfigError(path + ": not a scattering data file");
  int64_t n = 0;
  double head[5];
  f.read(reinterpret_cast<char*>(&n), sizeof n);
  f.read(reinterpret_cast<char*>(head), sizeof head);
  if (!f || n < 0 || n > (int64_t(1) << 28)) throw ConfigError(path + ": corrupt header");
  direct::ScatteringData s;
  s.zgrid = {head[0], head[1], static_cast<int>(n)};
  s.nu = head[2];
  s.t = head[3];
  s.integral_mismatch = head[4];
  s.z.resize(n);
  f.read(reinterpret_cast<char*>(s.z.data()), static_cast<std::streamsize>(n * sizeof(double)));
  for (cvec* v : {&s.a, &s.B, &s.b, &s.r, &s.r_plus, &s.r_minus}) get_vec(f, *v, n);
  if (!f) throw ConfigError(path + ": truncated");
  return s;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_hex(const cvec& samples) {
  return sha256_hex(std::string(reinterpret_cast<const char*>(samples.data()), samples.size() * sizeof(cplx)));
}

}  // namespace mtist::io

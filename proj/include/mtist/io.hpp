#pragma once

#include <json.hpp>
#include <string>

#include "mtist/evolve.hpp"

namespace mtist::io {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

void ensure_directory(const std::string& dir);
void write_text(const std::string& path, const std::string& text);
// Adds the schema_version field.
void write_json(const std::string& path, json j);

// Full-precision scientific notation.
std::string fmt(double x);

void write_scattering_csv(const std::string& path, const direct::ScatteringData& s);
void write_state_csv(const std::string& path, const recon::ReconstructedState& st);
void write_potential_csv(const std::string& path, const fields::PotentialField& p);

void save_scattering(const std::string& path, const direct::ScatteringData& s);
direct::ScatteringData load_scattering(const std::string& path);

std::string sha256_hex(const std::string& data);
std::string sha256_hex(const cvec& samples);

}  // namespace mtist::io

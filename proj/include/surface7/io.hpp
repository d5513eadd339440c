// Copyright 2026 The surface7 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Result documents (JSON and CSV) and run manifests.
//
// Every floating-point value is rounded to 12 significant digits and then
// written in its shortest round-trip form, so output files compare equal
// byte for byte across runs and platforms. Requires OpenSSL (libcrypto) for
// the config digest.

#pragma once

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "surface7/device.hpp"
#include "surface7/errors.hpp"
#include "surface7/experiment.hpp"
#include "surface7/fit.hpp"

#ifndef SURFACE7_VERSION
#define SURFACE7_VERSION "0.0.0"
#endif

namespace surface7::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = SURFACE7_VERSION;

/// x rounded to 12 significant digits; -0 becomes 0.
inline double round12(double x) {
  if (!std::isfinite(x)) throw NumericError("cannot serialize a non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

/// Text form used in CSV cells.
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", round12(x));
  return buf;
}

inline json number(double x) { return round12(x); }

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  static constexpr char kHex[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

/// Compact JSON of the resolved config with sorted keys.
inline std::string canonical_config(const DeviceConfig& config) { return to_json(config).dump(); }

inline std::string config_digest(const DeviceConfig& config) { return "sha256:" + sha256_hex(canonical_config(config)); }

struct Manifest {
  std::string command;
  std::string config_digest;
  std::optional<std::uint64_t> seed;
  std::string tool_version = kToolVersion;
};

inline Manifest make_manifest(std::string command, const DeviceConfig& config,
                              std::optional<std::uint64_t> seed = std::nullopt) {
  return {std::move(command), config_digest(config), seed, kToolVersion};
}

inline json to_json(const Manifest& m) {
  json j = {{"command", m.command}, {"config_digest", m.config_digest}, {"tool_version", m.tool_version}};
  j["seed"] = m.seed ? json(*m.seed) : json();
  return j;
}

inline json complex_matrix(const CMatrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({number(m(r, c).real()), number(m(r, c).imag())});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json prep_document(const Manifest& m, const PrepSpec& target, const PrepResult& r) {
  json j;
  j["manifest"] = to_json(m);
  if (const auto* named = std::get_if<LogicalTarget>(&target)) {
    j["target"] = std::string(to_string(*named));
  } else {
    const PrepAmplitudes a = amplitudes_of(target);
    j["target"] = {{"a", number(a.a)}, {"b", number(a.b)}, {"phi", number(a.phi)}};
  }
  j["success_prob"] = number(r.success_prob);
  j["p_l"] = number(r.p_l);
  j["f_phys"] = number(r.f_phys);
  j["f_l"] = number(r.f_l);
  j["rho_l"] = complex_matrix(r.rho_l);
  return j;
}

inline std::string detection_csv(const std::vector<DetectionPoint>& points) {
  std::ostringstream os;
  os << "n,t_us,observable,p_s,k0,k1,k2,k3\n";
  for (const auto& p : points) {
    os << p.n << ',' << format_number(p.t_us) << ',' << format_number(p.observable) << ',' << format_number(p.p_s);
    for (double k : p.k_dist) os << ',' << format_number(k);
    os << '\n';
  }
  return os.str();
}

/// Points as they read back from the CSV, so a fit of the file reproduces
/// the sidecar exactly.
inline std::vector<DetectionPoint> rounded(std::vector<DetectionPoint> points) {
  for (auto& p : points) {
    p.t_us = round12(p.t_us);
    p.observable = round12(p.observable);
  }
  return points;
}

/// `fit` is null when fewer than three cycles were run.
inline json fit_document(const Manifest& m, const PrepSpec& target, Basis basis, const std::optional<FitResult>& fit) {
  json j;
  j["manifest"] = to_json(m);
  j["target"] = std::string(to_string(std::get<LogicalTarget>(target)));
  j["basis"] = std::string(to_string(basis));
  if (fit) {
    j["fit"] = {{"amplitude", number(fit->amplitude)},
                {"decay_time_us", number(fit->decay_time_us)},
                {"stderr_us", number(fit->stderr_us)},
                {"error_per_cycle", number(fit->error_per_cycle)},
                {"decay_resolved", fit->decay_resolved}};
  } else {
    j["fit"] = nullptr;
  }
  return j;
}

inline json parity_document(const Manifest& m, const std::vector<ParityResult>& results) {
  json j;
  j["manifest"] = to_json(m);
  json list = json::array();
  for (const auto& r : results) {
    json s;
    s["stabilizer"] = std::string(to_string(r.check));
    s["ancilla"] = std::string(to_string(r.ancilla));
    json data = json::array();
    for (QubitId q : r.data) data.push_back(std::string(to_string(q)));
    s["data_qubits"] = data;
    json outcomes = json::object();
    for (const auto& e : r.entries) {
      outcomes[e.label] = {{"p0", number(e.p0)}, {"p1", number(e.p1)}, {"ideal", e.ideal}};
    }
    s["outcomes"] = outcomes;
    s["success_prob"] = number(r.success);
    list.push_back(std::move(s));
  }
  j["stabilizers"] = list;
  return j;
}

inline json sample_document(const Manifest& m, const PrepSpec& target, int cycles, std::uint64_t shots,
                            const SyndromeHistogram& histogram) {
  json j;
  j["manifest"] = to_json(m);
  j["target"] = std::string(to_string(std::get<LogicalTarget>(target)));
  j["cycles"] = cycles;
  j["shots"] = shots;
  json h = json::object();
  for (const auto& [history, count] : histogram) h[history] = count;
  j["histogram"] = h;
  return j;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

inline DeviceConfig load_config_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return load_config(text);
  } catch (const ConfigError& e) {
    std::vector<std::string> errors;
    for (const auto& msg : e.errors()) errors.push_back(path + ": " + msg);
    throw ConfigError(std::move(errors));
  }
}

/// "out/run.csv" -> "out/run.fit.json".
inline std::string sidecar_path(const std::string& csv_path) {
  const auto slash = csv_path.find_last_of('/');
  const auto dot = csv_path.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? csv_path.substr(0, dot) : csv_path) + ".fit.json";
}

}  // namespace surface7::io

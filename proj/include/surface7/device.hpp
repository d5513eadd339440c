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

// Physical device parameters.
//
// Units are fixed and never appear in key names: microseconds for T1/T2*,
// nanoseconds for every timing, MHz for residual ZZ shifts and 1/us for
// measurement-induced dephasing rates.

#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "surface7/errors.hpp"
#include "surface7/qop.hpp"

namespace surface7 {

struct QubitParams {
  double t1 = 0.0;       // us
  double t2_star = 0.0;  // us
  double p00 = 1.0;      // P(read 0 | prepared 0)
  double p11 = 1.0;      // P(read 1 | prepared 1)

  bool operator==(const QubitParams&) const = default;
};

using QubitMatrix = std::array<std::array<double, kQubitCount>, kQubitCount>;

/// Symmetric residual-ZZ shifts in MHz. alpha[i][j] shifts the |11> level of pair (i, j).
struct ZZMatrix {
  QubitMatrix alpha{};

  double operator()(QubitId a, QubitId b) const {
    return alpha[static_cast<std::size_t>(position(a))][static_cast<std::size_t>(position(b))];
  }
  void set(QubitId a, QubitId b, double mhz) {
    alpha[static_cast<std::size_t>(position(a))][static_cast<std::size_t>(position(b))] = mhz;
    alpha[static_cast<std::size_t>(position(b))][static_cast<std::size_t>(position(a))] = mhz;
  }
  bool operator==(const ZZMatrix&) const = default;
};

struct Timing {
  double single_gate_ns = 40.0;
  double cz_gate_ns = 120.0;
  double readout_a2_ns = 300.0;
  double readout_a1a3_ns = 300.0;
  double cycle_ns = 1920.0;
  double prep_offset_ns = 300.0;

  bool operator==(const Timing&) const = default;
};

struct Options {
  bool dd_enabled = true;
  /// meas_dephasing[i][j]: extra dephasing rate (1/us) of qubit i while qubit j is read out.
  std::optional<QubitMatrix> meas_dephasing;
  double integrator_dt_ns = 1.0;
  /// Order of the four CZ gates between A2 and the data qubits.
  std::array<QubitId, 4> a2_cz_order{QubitId::D1, QubitId::D2, QubitId::D3, QubitId::D4};

  bool operator==(const Options&) const = default;
};

struct DeviceConfig {
  std::map<QubitId, QubitParams> qubits;
  ZZMatrix zz;
  Timing timing;
  Options options;

  const QubitParams& qubit(QubitId q) const {
    const auto it = qubits.find(q);
    if (it == qubits.end()) throw ConfigError("missing qubit entry " + std::string(to_string(q)));
    return it->second;
  }

  bool operator==(const DeviceConfig&) const = default;
};

/// Measured parameters of the seven-qubit device. Readout is symmetric
/// (p00 = p11 = multiplexed assignment probability); residual ZZ defaults to zero.
inline DeviceConfig default_config() {
  using enum QubitId;
  DeviceConfig c;
  c.qubits = {
      {D1, {11.2, 18.2, 0.989, 0.989}}, {D2, {8.7, 14.4, 0.991, 0.991}},  {D3, {8.7, 4.3, 0.982, 0.982}},
      {D4, {16.3, 21.5, 0.974, 0.974}}, {A1, {5.7, 8.5, 0.977, 0.977}},   {A2, {16.8, 16.7, 0.984, 0.984}},
      {A3, {11.8, 9.9, 0.986, 0.986}},
  };
  return c;
}

/// Every violated invariant, one message each. Empty means valid.
inline std::vector<std::string> validate(const DeviceConfig& c) {
  std::vector<std::string> errors;
  for (QubitId q : kAllQubits) {
    const auto it = c.qubits.find(q);
    const std::string name(to_string(q));
    if (it == c.qubits.end()) {
      errors.push_back("missing qubit entry " + name);
      continue;
    }
    const QubitParams& p = it->second;
    if (!(p.t1 > 0.0)) errors.push_back(name + ": t1 must be > 0");
    if (!(p.t2_star > 0.0)) errors.push_back(name + ": t2_star must be > 0");
    if (p.t1 > 0.0 && p.t2_star > 2.0 * p.t1) {
      errors.push_back(name + ": unphysical dephasing (t2_star " + std::to_string(p.t2_star) + " > 2*t1 " +
                       std::to_string(2.0 * p.t1) + ")");
    }
    for (auto [key, v] : {std::pair{"p00", p.p00}, std::pair{"p11", p.p11}}) {
      if (!(v > 0.5 && v <= 1.0)) errors.push_back(name + ": " + key + " must lie in (0.5, 1]");
    }
  }
  for (std::size_t i = 0; i < kQubitCount; ++i) {
    if (c.zz.alpha[i][i] != 0.0) errors.push_back("zz: diagonal entry " + std::to_string(i) + " must be zero");
    for (std::size_t j = 0; j < kQubitCount; ++j) {
      if (!std::isfinite(c.zz.alpha[i][j])) errors.push_back("zz: non-finite entry");
      if (j > i && c.zz.alpha[i][j] != c.zz.alpha[j][i]) {
        errors.push_back("zz: asymmetric zz matrix at (" + std::string(to_string(kAllQubits[i])) + "," +
                         std::string(to_string(kAllQubits[j])) + ")");
      }
    }
  }
  const Timing& t = c.timing;
  for (auto [key, v] : {std::pair{"single_gate_ns", t.single_gate_ns}, std::pair{"cz_gate_ns", t.cz_gate_ns},
                        std::pair{"readout_a2_ns", t.readout_a2_ns}, std::pair{"readout_a1a3_ns", t.readout_a1a3_ns},
                        std::pair{"cycle_ns", t.cycle_ns}}) {
    if (!(v > 0.0) || !std::isfinite(v)) errors.push_back(std::string("timing: ") + key + " must be > 0");
  }
  if (!(t.prep_offset_ns >= 0.0) || !std::isfinite(t.prep_offset_ns)) {
    errors.push_back("timing: prep_offset_ns must be >= 0");
  }
  if (!(c.options.integrator_dt_ns > 0.0) || !std::isfinite(c.options.integrator_dt_ns)) {
    errors.push_back("options: integrator_dt_ns must be > 0");
  }
  if (c.options.meas_dephasing) {
    for (const auto& row : *c.options.meas_dephasing) {
      for (double v : row) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          errors.push_back("options: meas_dephasing rates must be finite and >= 0");
          break;
        }
      }
    }
  }
  std::set<QubitId> order(c.options.a2_cz_order.begin(), c.options.a2_cz_order.end());
  if (order.size() != 4 || !std::all_of(order.begin(), order.end(), is_data)) {
    errors.push_back("options: a2_cz_order must be a permutation of D1..D4");
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::json matrix_to_json(const QubitMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

inline QubitMatrix matrix_from_json(const nlohmann::json& j, const std::string& what,
                                    std::vector<std::string>& errors) {
  QubitMatrix m{};
  if (!j.is_array() || j.size() != kQubitCount) {
    errors.push_back(what + " must be a 7x7 array");
    return m;
  }
  for (std::size_t i = 0; i < kQubitCount; ++i) {
    if (!j[i].is_array() || j[i].size() != kQubitCount) {
      errors.push_back(what + " must be a 7x7 array");
      return m;
    }
    for (std::size_t k = 0; k < kQubitCount; ++k) {
      if (!j[i][k].is_number()) {
        errors.push_back(what + " entries must be numbers");
        return m;
      }
      m[i][k] = j[i][k].get<double>();
    }
  }
  return m;
}

inline void read_number(const nlohmann::json& obj, const char* key, double& out, const std::string& where,
                        std::vector<std::string>& errors) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_number()) {
    errors.push_back(where + "." + key + " must be a number");
    return;
  }
  out = obj[key].get<double>();
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where, std::vector<std::string>& errors) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      errors.push_back(where + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace detail

inline nlohmann::json to_json(const DeviceConfig& c) {
  nlohmann::json j;
  for (const auto& [q, p] : c.qubits) {
    j["qubits"][std::string(to_string(q))] = {{"t1", p.t1}, {"t2_star", p.t2_star}, {"p00", p.p00}, {"p11", p.p11}};
  }
  j["zz"]["alpha"] = detail::matrix_to_json(c.zz.alpha);
  const Timing& t = c.timing;
  j["timing"] = {{"single_gate_ns", t.single_gate_ns}, {"cz_gate_ns", t.cz_gate_ns},
                 {"readout_a2_ns", t.readout_a2_ns},   {"readout_a1a3_ns", t.readout_a1a3_ns},
                 {"cycle_ns", t.cycle_ns},             {"prep_offset_ns", t.prep_offset_ns}};
  const Options& o = c.options;
  j["options"]["dd_enabled"] = o.dd_enabled;
  j["options"]["integrator_dt_ns"] = o.integrator_dt_ns;
  j["options"]["meas_dephasing"] = o.meas_dephasing ? detail::matrix_to_json(*o.meas_dephasing) : nlohmann::json();
  nlohmann::json order = nlohmann::json::array();
  for (QubitId q : o.a2_cz_order) order.push_back(std::string(to_string(q)));
  j["options"]["a2_cz_order"] = order;
  return j;
}

inline std::string serialize(const DeviceConfig& c) { return to_json(c).dump(2); }

/// Overlays `doc` onto default_config() and validates the result.
/// Throws ConfigError with every problem found.
inline DeviceConfig config_from_json(const nlohmann::json& doc) {
  std::vector<std::string> errors;
  DeviceConfig c = default_config();
  if (!doc.is_object()) throw ConfigError("config document must be an object");
  // "note" is free text for humans.
  detail::reject_unknown_keys(doc, {"qubits", "zz", "timing", "options", "note"}, "config", errors);

  if (doc.contains("qubits")) {
    const auto& qs = doc["qubits"];
    if (!qs.is_object()) {
      errors.push_back("qubits must be an object");
    } else {
      for (const auto& [name, entry] : qs.items()) {
        const auto q = qubit_from_string(name);
        if (!q) {
          errors.push_back("qubits: unknown qubit '" + name + "'");
          continue;
        }
        if (!entry.is_object()) {
          errors.push_back("qubits." + name + " must be an object");
          continue;
        }
        detail::reject_unknown_keys(entry, {"t1", "t2_star", "p00", "p11"}, "qubits." + name, errors);
        QubitParams& p = c.qubits[*q];
        detail::read_number(entry, "t1", p.t1, "qubits." + name, errors);
        detail::read_number(entry, "t2_star", p.t2_star, "qubits." + name, errors);
        detail::read_number(entry, "p00", p.p00, "qubits." + name, errors);
        detail::read_number(entry, "p11", p.p11, "qubits." + name, errors);
      }
    }
  }
  if (doc.contains("zz")) {
    const auto& zz = doc["zz"];
    if (!zz.is_object()) {
      errors.push_back("zz must be an object");
    } else {
      detail::reject_unknown_keys(zz, {"alpha"}, "zz", errors);
      if (zz.contains("alpha")) c.zz.alpha = detail::matrix_from_json(zz["alpha"], "zz.alpha", errors);
    }
  }
  if (doc.contains("timing")) {
    const auto& t = doc["timing"];
    if (!t.is_object()) {
      errors.push_back("timing must be an object");
    } else {
      detail::reject_unknown_keys(t,
                                  {"single_gate_ns", "cz_gate_ns", "readout_a2_ns", "readout_a1a3_ns", "cycle_ns",
                                   "prep_offset_ns"},
                                  "timing", errors);
      detail::read_number(t, "single_gate_ns", c.timing.single_gate_ns, "timing", errors);
      detail::read_number(t, "cz_gate_ns", c.timing.cz_gate_ns, "timing", errors);
      detail::read_number(t, "readout_a2_ns", c.timing.readout_a2_ns, "timing", errors);
      detail::read_number(t, "readout_a1a3_ns", c.timing.readout_a1a3_ns, "timing", errors);
      detail::read_number(t, "cycle_ns", c.timing.cycle_ns, "timing", errors);
      detail::read_number(t, "prep_offset_ns", c.timing.prep_offset_ns, "timing", errors);
    }
  }
  if (doc.contains("options")) {
    const auto& o = doc["options"];
    if (!o.is_object()) {
      errors.push_back("options must be an object");
    } else {
      detail::reject_unknown_keys(o, {"dd_enabled", "meas_dephasing", "integrator_dt_ns", "a2_cz_order"}, "options",
                                  errors);
      if (o.contains("dd_enabled")) {
        if (o["dd_enabled"].is_boolean()) {
          c.options.dd_enabled = o["dd_enabled"].get<bool>();
        } else {
          errors.push_back("options.dd_enabled must be a boolean");
        }
      }
      detail::read_number(o, "integrator_dt_ns", c.options.integrator_dt_ns, "options", errors);
      if (o.contains("meas_dephasing")) {
        if (o["meas_dephasing"].is_null()) {
          c.options.meas_dephasing.reset();
        } else {
          c.options.meas_dephasing = detail::matrix_from_json(o["meas_dephasing"], "options.meas_dephasing", errors);
        }
      }
      if (o.contains("a2_cz_order")) {
        const auto& order = o["a2_cz_order"];
        if (!order.is_array() || order.size() != 4) {
          errors.push_back("options.a2_cz_order must list four data qubits");
        } else {
          for (std::size_t k = 0; k < 4; ++k) {
            const auto q = order[k].is_string() ? qubit_from_string(order[k].get<std::string>()) : std::nullopt;
            if (!q) {
              errors.push_back("options.a2_cz_order: unknown qubit");
              break;
            }
            c.options.a2_cz_order[k] = *q;
          }
        }
      }
    }
  }
  if (errors.empty()) errors = validate(c);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

inline DeviceConfig load_config(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

// ---------------------------------------------------------------------------
// Derived rates, in 1/ns

/// 1/T1.
inline double relaxation_rate_per_ns(const QubitParams& p) { return 1.0 / (p.t1 * 1000.0); }

/// Rate of the sigma_z collapse operator: (1/T2 - 1/(2 T1)) / 2.
inline double dephasing_rate_per_ns(const QubitParams& p) {
  const double r = 0.5 * (1.0 / p.t2_star - 1.0 / (2.0 * p.t1)) / 1000.0;
  return r < 0.0 && r > -1e-15 ? 0.0 : r;
}

}  // namespace surface7

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

// Compiles the pipelined stabilizer cycle into a timed list of segments.
//
// Gates are instantaneous; their physical duration shows up as the noisy
// idle that follows them. A measurement occupies a readout window during
// which every qubit keeps idling, and its POVM fires at the window end.
// Segments are stored in execution order, so a Measure segment appears right
// after the idle that closes its window while its start_ns marks the window
// start.

#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "surface7/device.hpp"
#include "surface7/errors.hpp"
#include "surface7/qop.hpp"

namespace surface7 {

struct Gate {
  GateKind kind = GateKind::I;
  double angle = 0.0;
  std::vector<QubitId> targets;

  Operator matrix() const { return kind == GateKind::CZ ? cz_gate() : single_qubit_gate(kind, angle); }
  Operator embedded() const { return embed(matrix(), targets); }
  bool operator==(const Gate&) const = default;
};

inline Gate ry(QubitId q, double angle) { return {GateKind::Ry, angle, {q}}; }
inline Gate rz(QubitId q, double angle) { return {GateKind::Rz, angle, {q}}; }
inline Gate cz(QubitId a, QubitId b) { return {GateKind::CZ, 0.0, {a, b}}; }

struct UnitarySegment {
  std::vector<Gate> gates;
  bool operator==(const UnitarySegment&) const = default;
};

struct IdleSegment {
  double duration_ns = 0.0;
  /// Qubits whose readout window covers this idle.
  std::vector<QubitId> reading;
  bool operator==(const IdleSegment&) const = default;
};

struct MeasureSegment {
  std::vector<QubitId> qubits;
  double window_ns = 0.0;
  bool operator==(const MeasureSegment&) const = default;
};

struct Segment {
  double start_ns = 0.0;
  std::variant<UnitarySegment, IdleSegment, MeasureSegment> body;

  bool is_unitary() const { return std::holds_alternative<UnitarySegment>(body); }
  bool is_idle() const { return std::holds_alternative<IdleSegment>(body); }
  bool is_measure() const { return std::holds_alternative<MeasureSegment>(body); }
  const UnitarySegment& unitary() const { return std::get<UnitarySegment>(body); }
  const IdleSegment& idle() const { return std::get<IdleSegment>(body); }
  const MeasureSegment& measure() const { return std::get<MeasureSegment>(body); }

  double duration_ns() const {
    if (is_idle()) return idle().duration_ns;
    if (is_measure()) return measure().window_ns;
    return 0.0;
  }
  bool operator==(const Segment&) const = default;
};

inline std::string format_gate(const Gate& g) {
  std::ostringstream os;
  os << to_string(g.kind);
  if (g.kind == GateKind::Ry || g.kind == GateKind::Rz) {
    os << '(' << std::setprecision(6) << g.angle / kPi << "pi)";
  }
  for (std::size_t k = 0; k < g.targets.size(); ++k) os << (k == 0 ? " " : ",") << to_string(g.targets[k]);
  return os.str();
}

struct Schedule {
  std::vector<Segment> segments;
  double total_ns = 0.0;

  /// One row per segment: start_ns, kind, detail.
  std::string dump() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    os << "start_ns  kind     detail\n";
    for (const Segment& s : segments) {
      os << std::setw(8) << s.start_ns << "  ";
      if (s.is_unitary()) {
        os << "unitary  ";
        const auto& gates = s.unitary().gates;
        for (std::size_t k = 0; k < gates.size(); ++k) os << (k ? "; " : "") << format_gate(gates[k]);
      } else if (s.is_idle()) {
        os << "idle     " << s.idle().duration_ns << " ns";
        if (!s.idle().reading.empty()) {
          os << " reading";
          for (QubitId q : s.idle().reading) os << ' ' << to_string(q);
        }
      } else {
        os << "measure  ";
        for (QubitId q : s.measure().qubits) os << to_string(q) << ' ';
        os << "window " << s.measure().window_ns << " ns";
      }
      os << '\n';
    }
    os << "total_ns " << total_ns << '\n';
    return os.str();
  }

  std::size_t count_gates(GateKind kind) const {
    std::size_t n = 0;
    for (const Segment& s : segments) {
      if (!s.is_unitary()) continue;
      for (const Gate& g : s.unitary().gates) n += g.kind == kind;
    }
    return n;
  }

  bool operator==(const Schedule&) const = default;
};

// ---------------------------------------------------------------------------
// Timeline assembly

namespace detail {

class TimelineBuilder {
 public:
  void gates(double t, std::vector<Gate> gates) { bursts_.push_back({t, std::move(gates)}); }
  void readout(double start, double window, std::vector<QubitId> qubits) {
    windows_.push_back({start, window, std::move(qubits)});
  }

  double latest_event() const {
    double t = 0.0;
    for (const auto& b : bursts_) t = std::max(t, b.time);
    for (const auto& w : windows_) t = std::max(t, w.start + w.window);
    return t;
  }

  Schedule build(double total_ns) const {
    constexpr double kEps = 1e-9;
    // Instants at which something happens: POVMs (rank 0) before gate bursts (rank 1).
    struct Event {
      double time;
      int rank;
      std::size_t index;
    };
    std::vector<Event> events;
    for (std::size_t k = 0; k < windows_.size(); ++k) events.push_back({windows_[k].start + windows_[k].window, 0, k});
    for (std::size_t k = 0; k < bursts_.size(); ++k) events.push_back({bursts_[k].time, 1, k});
    std::stable_sort(events.begin(), events.end(), [&](const Event& a, const Event& b) {
      if (std::abs(a.time - b.time) > kEps) return a.time < b.time;
      return a.rank < b.rank;
    });

    Schedule out;
    out.total_ns = total_ns;
    double cursor = 0.0;
    const auto idle_until = [&](double t) {
      // Split at window boundaries so every idle knows which qubits are read out.
      std::vector<double> cuts{t};
      for (const auto& w : windows_) {
        for (double edge : {w.start, w.start + w.window}) {
          if (edge > cursor + kEps && edge < t - kEps) cuts.push_back(edge);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      for (double cut : cuts) {
        if (cut <= cursor + kEps) continue;
        IdleSegment idle{cut - cursor, reading_at(0.5 * (cursor + cut))};
        out.segments.push_back({cursor, idle});
        cursor = cut;
      }
    };
    for (std::size_t e = 0; e < events.size(); ++e) {
      const Event& ev = events[e];
      idle_until(ev.time);
      if (ev.rank == 0) {
        const auto& w = windows_[ev.index];
        out.segments.push_back({w.start, MeasureSegment{w.qubits, w.window}});
        continue;
      }
      // Merge bursts that share an instant.
      UnitarySegment burst{bursts_[ev.index].gates};
      while (e + 1 < events.size() && events[e + 1].rank == 1 && std::abs(events[e + 1].time - ev.time) <= kEps) {
        ++e;
        const auto& more = bursts_[events[e].index].gates;
        burst.gates.insert(burst.gates.end(), more.begin(), more.end());
      }
      out.segments.push_back({ev.time, std::move(burst)});
    }
    idle_until(total_ns);
    return out;
  }

 private:
  struct Burst {
    double time;
    std::vector<Gate> gates;
  };
  struct Window {
    double start;
    double window;
    std::vector<QubitId> qubits;
  };

  std::vector<QubitId> reading_at(double t) const {
    std::set<QubitId> r;
    for (const auto& w : windows_) {
      if (t > w.start && t < w.start + w.window) r.insert(w.qubits.begin(), w.qubits.end());
    }
    return {r.begin(), r.end()};
  }

  std::vector<Burst> bursts_;
  std::vector<Window> windows_;
};

}  // namespace detail

/// Throws ScheduleError if a Unitary segment touches a qubit twice or the
/// segment timeline does not tile [0, total_ns].
inline void check_schedule(const Schedule& s) {
  double covered = 0.0;
  for (const Segment& seg : s.segments) {
    if (seg.is_idle()) {
      if (std::abs(seg.start_ns - covered) > 1e-6) throw ScheduleError("idle segments do not tile the cycle");
      covered += seg.idle().duration_ns;
    }
    if (!seg.is_unitary()) continue;
    std::set<QubitId> used;
    for (const Gate& g : seg.unitary().gates) {
      for (QubitId q : g.targets) {
        if (!used.insert(q).second) {
          throw ScheduleError("qubit " + std::string(to_string(q)) + " appears in two gates of one burst at " +
                              std::to_string(seg.start_ns) + " ns");
        }
      }
    }
  }
  if (std::abs(covered - s.total_ns) > 1e-6) throw ScheduleError("idle segments do not cover total_ns");
}

// ---------------------------------------------------------------------------
// State preparation

enum class LogicalTarget { ZeroL, OneL, PlusL, MinusL };

/// Product state |0>(a|0> + b|1>)|0>(a|0> + b e^{i phi}|1>) on D1..D4.
struct PrepAmplitudes {
  double a = 1.0;
  double b = 0.0;
  double phi = 0.0;
};

using PrepSpec = std::variant<LogicalTarget, PrepAmplitudes>;

inline std::string_view to_string(LogicalTarget t) {
  switch (t) {
    case LogicalTarget::ZeroL: return "0L";
    case LogicalTarget::OneL: return "1L";
    case LogicalTarget::PlusL: return "+L";
    case LogicalTarget::MinusL: return "-L";
  }
  return "?";
}

inline LogicalTarget parse_logical_target(std::string_view s) {
  for (LogicalTarget t : {LogicalTarget::ZeroL, LogicalTarget::OneL, LogicalTarget::PlusL, LogicalTarget::MinusL}) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError("unknown logical state '" + std::string(s) + "' (expected 0L, 1L, +L or -L)");
}

inline PrepAmplitudes amplitudes_of(const PrepSpec& spec) {
  if (const auto* amp = std::get_if<PrepAmplitudes>(&spec)) {
    if (!std::isfinite(amp->a) || !std::isfinite(amp->b) || !std::isfinite(amp->phi) ||
        std::abs(amp->a * amp->a + amp->b * amp->b - 1.0) > 1e-12) {
      throw ConfigError("prep amplitudes must satisfy a^2 + b^2 = 1");
    }
    return *amp;
  }
  const double h = 1.0 / std::sqrt(2.0);
  switch (std::get<LogicalTarget>(spec)) {
    case LogicalTarget::ZeroL: return {1.0, 0.0, 0.0};
    case LogicalTarget::OneL: return {0.0, 1.0, 0.0};
    case LogicalTarget::PlusL: return {h, h, 0.0};
    case LogicalTarget::MinusL: return {h, h, kPi};
  }
  return {};
}

/// Ideal (normalized) data state the post-selected preparation should reach.
inline CVector target_logical_amplitudes(const PrepSpec& spec) {
  const PrepAmplitudes amp = amplitudes_of(spec);
  CVector v(2);
  v << Complex(amp.a * amp.a), amp.b * amp.b * std::exp(Complex(0.0, amp.phi));
  return v / v.norm();
}

inline CVector target_data_state(const PrepSpec& spec) {
  const CVector l = target_logical_amplitudes(spec);
  return logical_state(l(0), l(1));
}

/// Ry rotations on D2 and D4 producing the requested product state from |0000>.
/// A phase other than 0 or pi adds an Rz on D4 after its Ry.
inline Segment build_prep(const PrepSpec& spec) {
  UnitarySegment burst;
  if (std::holds_alternative<LogicalTarget>(spec)) {
    switch (std::get<LogicalTarget>(spec)) {
      case LogicalTarget::ZeroL: break;
      case LogicalTarget::OneL: burst.gates = {ry(QubitId::D2, kPi), ry(QubitId::D4, kPi)}; break;
      case LogicalTarget::PlusL: burst.gates = {ry(QubitId::D2, kPi / 2), ry(QubitId::D4, kPi / 2)}; break;
      case LogicalTarget::MinusL: burst.gates = {ry(QubitId::D2, kPi / 2), ry(QubitId::D4, -kPi / 2)}; break;
    }
    return {0.0, burst};
  }
  const PrepAmplitudes amp = amplitudes_of(spec);
  const double theta = 2.0 * std::atan2(amp.b, amp.a);
  if (std::abs(theta) < 1e-15) return {0.0, burst};
  burst.gates.push_back(ry(QubitId::D2, theta));
  const double phi = std::remainder(amp.phi, 2.0 * kPi);
  if (std::abs(phi) < 1e-15) {
    burst.gates.push_back(ry(QubitId::D4, theta));
  } else if (std::abs(std::abs(phi) - kPi) < 1e-15) {
    burst.gates.push_back(ry(QubitId::D4, -theta));
  } else {
    burst.gates.push_back(ry(QubitId::D4, theta));
    burst.gates.push_back(rz(QubitId::D4, phi));
  }
  return {0.0, burst};
}

// ---------------------------------------------------------------------------
// The stabilizer cycle

/// One pipelined stabilizer cycle: the X-type check through A2 first, then
/// the two Z-type checks through A1 and A3 while A2 is still being read out,
/// optional data echoes, and idle padding up to cycle_ns.
inline Schedule build_cycle(const DeviceConfig& config) {
  using enum QubitId;
  const Timing& t = config.timing;
  detail::TimelineBuilder tl;

  // X half: basis change on the data, parity onto A2, basis change back.
  double now = 0.0;
  std::vector<Gate> open{ry(D1, kPi / 2), ry(D2, kPi / 2), ry(D3, kPi / 2), ry(D4, kPi / 2), ry(A2, kPi / 2)};
  tl.gates(now, open);
  now += t.single_gate_ns;
  for (QubitId d : config.options.a2_cz_order) {
    tl.gates(now, {cz(A2, d)});
    now += t.cz_gate_ns;
  }
  tl.gates(now, {ry(D1, -kPi / 2), ry(D2, -kPi / 2), ry(D3, -kPi / 2), ry(D4, -kPi / 2), ry(A2, -kPi / 2)});
  now += t.single_gate_ns;
  tl.readout(now, t.readout_a2_ns, {A2});

  // Z half, overlapping the A2 readout window.
  tl.gates(now, {ry(A1, kPi / 2), ry(A3, kPi / 2)});
  now += t.single_gate_ns;
  tl.gates(now, {cz(A1, D1), cz(A3, D2)});
  now += t.cz_gate_ns;
  tl.gates(now, {cz(A1, D3), cz(A3, D4)});
  now += t.cz_gate_ns;
  tl.gates(now, {ry(A1, -kPi / 2), ry(A3, -kPi / 2)});
  now += t.single_gate_ns;
  const double z_window_start = now;
  tl.readout(now, t.readout_a1a3_ns, {A1, A3});

  const double critical = tl.latest_event();
  if (critical > t.cycle_ns + 1e-9) {
    std::ostringstream os;
    os << "critical path " << critical << " ns exceeds cycle_ns " << t.cycle_ns << " ns by " << critical - t.cycle_ns
       << " ns";
    throw ScheduleError(os.str());
  }

  if (config.options.dd_enabled) {
    // Data echo at the center of the A1/A3 window. The center of the A2
    // window falls between the two CZ layers of the Z checks.
    tl.gates(z_window_start + 0.5 * t.readout_a1a3_ns, {ry(D1, kPi), ry(D2, kPi), ry(D3, kPi), ry(D4, kPi)});
  }

  Schedule s = tl.build(t.cycle_ns);
  check_schedule(s);
  return s;
}

// ---------------------------------------------------------------------------
// Single-stabilizer parity circuits used for characterization

enum class ParityCheck { A1_Z13, A2_Z1234, A3_Z24 };

inline constexpr std::array<ParityCheck, 3> kParityChecks{ParityCheck::A1_Z13, ParityCheck::A2_Z1234,
                                                          ParityCheck::A3_Z24};

inline QubitId parity_ancilla(ParityCheck c) {
  switch (c) {
    case ParityCheck::A1_Z13: return QubitId::A1;
    case ParityCheck::A2_Z1234: return QubitId::A2;
    case ParityCheck::A3_Z24: return QubitId::A3;
  }
  return QubitId::A1;
}

inline std::string_view to_string(ParityCheck c) {
  switch (c) {
    case ParityCheck::A1_Z13: return "Z_D1Z_D3";
    case ParityCheck::A2_Z1234: return "Z_D1Z_D2Z_D3Z_D4";
    case ParityCheck::A3_Z24: return "Z_D2Z_D4";
  }
  return "?";
}

/// Data qubits in CZ order.
inline std::vector<QubitId> parity_data_qubits(ParityCheck c, const DeviceConfig& config) {
  using enum QubitId;
  switch (c) {
    case ParityCheck::A1_Z13: return {D1, D3};
    case ParityCheck::A2_Z1234: return {config.options.a2_cz_order.begin(), config.options.a2_cz_order.end()};
    case ParityCheck::A3_Z24: return {D2, D4};
  }
  return {};
}

/// Z-type parity of the data qubits onto one ancilla, without data basis
/// changes. `excited` lists the data qubits flipped to |1> at t = 0.
inline Schedule build_parity_circuit(const DeviceConfig& config, ParityCheck check,
                                     const std::vector<QubitId>& excited) {
  const Timing& t = config.timing;
  const QubitId anc = parity_ancilla(check);
  detail::TimelineBuilder tl;
  double now = 0.0;
  std::vector<Gate> prep;
  for (QubitId q : excited) prep.push_back(ry(q, kPi));
  if (!prep.empty()) tl.gates(now, prep);
  now += t.single_gate_ns;
  tl.gates(now, {ry(anc, kPi / 2)});
  now += t.single_gate_ns;
  for (QubitId d : parity_data_qubits(check, config)) {
    tl.gates(now, {cz(anc, d)});
    now += t.cz_gate_ns;
  }
  tl.gates(now, {ry(anc, -kPi / 2)});
  now += t.single_gate_ns;
  const double window = anc == QubitId::A2 ? t.readout_a2_ns : t.readout_a1a3_ns;
  tl.readout(now, window, {anc});
  Schedule s = tl.build(now + window);
  check_schedule(s);
  return s;
}

// ---------------------------------------------------------------------------
// Noiseless verification of the parity map

struct UnitaryCheckReport {
  std::size_t checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

inline QubitId stabilizer_ancilla_for(int stabilizer_index) {
  static constexpr std::array<QubitId, 3> kMap{QubitId::A2, QubitId::A1, QubitId::A3};
  return kMap[static_cast<std::size_t>(stabilizer_index)];
}

/// Applies the schedule's unitaries to `data` (ancillas in |000>), with every
/// measurement deferred. Whenever `data` is an eigenstate of a stabilizer,
/// its ancilla must read |0> for eigenvalue +1 and |1> for -1 at the moment
/// the ancilla is measured.
inline void ideal_cycle_unitary_check(const Schedule& schedule, const CVector& data, const std::string& label,
                                      UnitaryCheckReport& report) {
  const Stabilizers stab = stabilizer_set(Register::Data);
  const std::array<const Operator*, 3> ops{&stab.s_x, &stab.s_z1, &stab.s_z2};
  const CVector d = data / data.norm();
  std::array<int, 3> eigen{0, 0, 0};
  for (std::size_t k = 0; k < 3; ++k) {
    const double v = (d.adjoint() * ops[k]->matrix() * d)(0, 0).real();
    if (std::abs(v - 1.0) < 1e-9) eigen[k] = +1;
    if (std::abs(v + 1.0) < 1e-9) eigen[k] = -1;
  }
  CVector psi = with_ground_ancillas(d);
  for (const Segment& seg : schedule.segments) {
    if (seg.is_unitary()) {
      for (const Gate& g : seg.unitary().gates) psi = g.embedded().matrix() * psi;
    } else if (seg.is_measure()) {
      for (QubitId anc : seg.measure().qubits) {
        for (int k = 0; k < 3; ++k) {
          if (stabilizer_ancilla_for(k) != anc || eigen[static_cast<std::size_t>(k)] == 0) continue;
          double p1 = 0.0;
          const std::size_t mask = bit_mask(anc);
          for (Index i = 0; i < psi.size(); ++i) {
            if (static_cast<std::size_t>(i) & mask) p1 += std::norm(psi(i));
          }
          const double expected = eigen[static_cast<std::size_t>(k)] == 1 ? 0.0 : 1.0;
          ++report.checked;
          if (std::abs(p1 - expected) > 1e-9) {
            std::ostringstream os;
            os << label << ": " << to_string(anc) << " reads |1> with probability " << p1 << ", expected "
               << expected;
            report.failures.push_back(os.str());
          }
        }
      }
    }
  }
}

/// Runs the check over all 16 Z-basis and all 16 X-basis data product states.
inline UnitaryCheckReport ideal_cycle_unitary_check(const Schedule& schedule) {
  UnitaryCheckReport report;
  for (Index b = 0; b < kDataDim; ++b) {
    CVector z = CVector::Zero(kDataDim);
    z(b) = 1.0;
    ideal_cycle_unitary_check(schedule, z, "Z-basis " + std::to_string(b), report);

    // X-basis product state: bit set -> |->, clear -> |+>.
    CVector x(kDataDim);
    for (Index i = 0; i < kDataDim; ++i) {
      double sign = 1.0;
      for (int q = 0; q < kDataQubitCount; ++q) {
        const Index m = Index{1} << q;
        if ((b & m) && (i & m)) sign = -sign;
      }
      x(i) = sign / 4.0;
    }
    ideal_cycle_unitary_check(schedule, x, "X-basis " + std::to_string(b), report);
  }
  return report;
}

}  // namespace surface7

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

// The three experiments: single-stabilizer parity characterization,
// post-selected logical state preparation, and repeated error detection,
// plus a Monte Carlo sampler over syndrome histories.
//
// Only the all-zero syndrome branch is carried from one cycle to the next.
// Within a cycle, every branch of an intermediate measurement (A2) is kept
// until the last measurement of the cycle so the full 8-outcome syndrome
// distribution is available. After that measurement the ancillas are traced
// out and reset to |000>.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "surface7/device.hpp"
#include "surface7/errors.hpp"
#include "surface7/fit.hpp"
#include "surface7/lindblad.hpp"
#include "surface7/measurement.hpp"
#include "surface7/parallel.hpp"
#include "surface7/qop.hpp"
#include "surface7/schedule.hpp"

namespace surface7 {

/// Syndrome bits packed as A1 (bit 2), A2 (bit 1), A3 (bit 0), so the
/// printed form "A1A2A3" reads most significant first.
using Syndrome = std::uint8_t;

inline Syndrome syndrome_bit(QubitId ancilla) {
  switch (ancilla) {
    case QubitId::A1: return 0b100;
    case QubitId::A2: return 0b010;
    case QubitId::A3: return 0b001;
    default: throw std::invalid_argument("syndrome_bit: not an ancilla");
  }
}

inline std::string syndrome_string(Syndrome s) {
  return {static_cast<char>('0' + ((s >> 2) & 1)), static_cast<char>('0' + ((s >> 1) & 1)),
          static_cast<char>('0' + (s & 1))};
}

struct Branch {
  Syndrome syndrome = 0;
  double weight = 1.0;
  DensityMatrix state;
};

/// Result of running a cycle up to and including its last measurement.
struct CycleHead {
  std::array<double, 8> prob{};
  /// Post-measurement states (normalized, ancillas reset), where retained.
  std::array<std::optional<DensityMatrix>, 8> state;
};

/// Executes schedules on branch sets for one device model. With noise off
/// every idle is the identity and every POVM is projective.
class CycleSimulator {
 public:
  CycleSimulator(DeviceConfig config, bool noise)
      : config_(std::move(config)), noise_(noise), cycle_(build_cycle(config_)) {
    if (auto errors = validate(config_); !errors.empty()) throw ConfigError(std::move(errors));
    const std::array<QubitRates, kQubitCount> zero_rates{};
    for (unsigned mask = 0; mask < 8; ++mask) {
      if (!noise_) {
        generators_.emplace_back(zero_rates, QubitMatrix{});
        continue;
      }
      std::vector<QubitId> reading;
      for (QubitId a : kAncillaQubits) {
        if (mask & syndrome_bit(a)) reading.push_back(a);
      }
      generators_.push_back(make_idle_generator(config_, reading));
    }
    for (QubitId q : kAllQubits) {
      const QubitParams& p = config_.qubit(q);
      povms_.push_back(noise_ ? Povm::from_assignment(p.p00, p.p11) : Povm::ideal());
    }
    last_measure_ = 0;
    for (std::size_t k = 0; k < cycle_.segments.size(); ++k) {
      if (cycle_.segments[k].is_measure()) last_measure_ = k;
    }
  }

  const DeviceConfig& config() const noexcept { return config_; }
  bool noise() const noexcept { return noise_; }
  const Schedule& cycle() const noexcept { return cycle_; }

  const IdleGenerator& generator(std::span<const QubitId> reading) const {
    unsigned mask = 0;
    for (QubitId q : reading) {
      if (is_data(q)) throw std::invalid_argument("data-qubit readout windows are not modeled");
      mask |= syndrome_bit(q);
    }
    return generators_[mask];
  }

  const Povm& povm(QubitId q) const { return povms_[static_cast<std::size_t>(position(q))]; }

  static DensityMatrix ground_state() { return DensityMatrix::basis_state(0, kDim); }

  /// |0>^7, then the preparation burst and one single-gate idle.
  DensityMatrix prepare(const PrepSpec& spec) const {
    const Segment prep = build_prep(spec);
    DensityMatrix rho = apply_unitary_segment(ground_state(), prep.unitary());
    return evolve_idle(std::move(rho), generator({}), config_.timing.single_gate_ns, config_.options.integrator_dt_ns);
  }

  /// Runs `segments` on every branch. Measurement outcomes are OR-ed into
  /// each branch's syndrome and multiply its weight; states stay normalized.
  std::vector<Branch> run(std::vector<Branch> branches, std::span<const Segment> segments) const {
    for (const Segment& seg : segments) {
      if (seg.is_unitary()) {
        for (Branch& b : branches) b.state = apply_unitary_segment(b.state, seg.unitary());
      } else if (seg.is_idle()) {
        const IdleGenerator& gen = generator(seg.idle().reading);
        for (Branch& b : branches) {
          b.state = evolve_idle(std::move(b.state), gen, seg.idle().duration_ns, config_.options.integrator_dt_ns);
        }
      } else {
        const auto& qubits = seg.measure().qubits;
        std::vector<Povm> povms;
        for (QubitId q : qubits) povms.push_back(povm(q));
        std::vector<Branch> next;
        for (Branch& b : branches) {
          for (auto& e : measure_multi(b.state, qubits, povms).entries) {
            Syndrome s = b.syndrome;
            for (std::size_t k = 0; k < qubits.size(); ++k) {
              if (e.bits[k] == '1') s |= syndrome_bit(qubits[k]);
            }
            const double w = b.weight * e.prob;
            if (w < kBranchPruneThreshold) continue;
            next.push_back({s, w, std::move(e.state)});
          }
        }
        branches = std::move(next);
      }
    }
    return branches;
  }

  /// Cycle up to its last POVM. Post-measurement states are kept for every
  /// syndrome when `keep_all`, otherwise only for the all-zero syndrome.
  CycleHead run_cycle_head(const DensityMatrix& rho) const { return run_cycle_head(rho, false); }

  CycleHead run_cycle_head(const DensityMatrix& rho, bool keep_all) const {
    const std::span<const Segment> all(cycle_.segments);
    std::vector<Branch> branches{{0, 1.0, rho}};
    branches = run(std::move(branches), all.first(last_measure_ + 1));
    CycleHead head;
    for (Branch& b : branches) {
      head.prob[b.syndrome] += b.weight;
      if (!keep_all && b.syndrome != 0) continue;
      if (head.state[b.syndrome]) throw std::logic_error("duplicate syndrome branch");
      head.state[b.syndrome] = attach_ground_ancillas(trace_out_ancillas(b.state));
    }
    return head;
  }

  /// Remainder of the cycle after its last POVM.
  DensityMatrix run_cycle_tail(const DensityMatrix& rho) const {
    const std::span<const Segment> all(cycle_.segments);
    auto out = run({{0, 1.0, rho}}, all.subspan(last_measure_ + 1));
    return std::move(out.front().state);
  }

 private:
  DeviceConfig config_;
  bool noise_;
  Schedule cycle_;
  std::vector<IdleGenerator> generators_;
  std::vector<Povm> povms_;
  std::size_t last_measure_ = 0;
};

// ---------------------------------------------------------------------------
// Logical projection

struct LogicalProjection {
  CMatrix rho_l;  // 2x2 over {|0_L>, |1_L>}
  double p_l = 0.0;
};

/// rho_L[j][i] = <j_L|rho|i_L> / P_L with P_L = sum_i <i_L|rho|i_L>.
inline LogicalProjection project_logical(const DensityMatrix& rho_data) {
  if (rho_data.dim() != kDataDim) throw std::invalid_argument("project_logical expects a 4-qubit state");
  CMatrix basis(kDataDim, 2);
  basis.col(0) = logical_zero();
  basis.col(1) = logical_one();
  CMatrix block = basis.adjoint() * rho_data.matrix() * basis;
  const double p_l = block.trace().real();
  if (p_l < 1e-12) throw NumericError("state has no weight in the logical subspace");
  return {block / p_l, p_l};
}

// ---------------------------------------------------------------------------
// Preparation

struct PrepResult {
  DensityMatrix rho_full = CycleSimulator::ground_state();  // conditioned on the all-zero syndrome
  double success_prob = 0.0;
  double p_l = 0.0;
  double f_phys = 0.0;
  CMatrix rho_l;
  double f_l = 0.0;
};

inline PrepResult run_prep(const PrepSpec& target, const CycleSimulator& sim) {
  const CycleHead head = sim.run_cycle_head(sim.prepare(target));
  if (head.prob[0] < 1e-12 || !head.state[0]) throw NumericError("post-selection impossible");
  PrepResult out;
  out.success_prob = head.prob[0];
  out.rho_full = sim.run_cycle_tail(*head.state[0]);
  const DensityMatrix data = trace_out_ancillas(out.rho_full);
  const LogicalProjection proj = project_logical(data);
  out.p_l = proj.p_l;
  out.rho_l = proj.rho_l;
  out.f_phys = fidelity(data, target_data_state(target));
  out.f_l = fidelity(DensityMatrix(proj.rho_l), target_logical_amplitudes(target));
  return out;
}

inline PrepResult run_prep(const PrepSpec& target, const DeviceConfig& config, bool noise) {
  return run_prep(target, CycleSimulator(config, noise));
}

// ---------------------------------------------------------------------------
// Repeated detection

enum class Basis { Z, X };

inline std::string_view to_string(Basis b) { return b == Basis::Z ? "Z" : "X"; }

inline Basis parse_basis(std::string_view s) {
  if (s == "Z") return Basis::Z;
  if (s == "X") return Basis::X;
  throw ConfigError("unknown basis '" + std::string(s) + "' (expected Z or X)");
}

struct DetectionPoint {
  int n = 0;
  double t_us = 0.0;
  double observable = 0.0;    // <Z_D1 Z_D2> or <X_D1 X_D3>
  double observable_b = 0.0;  // <Z_D3 Z_D4> or <X_D2 X_D4>
  double p_s = 0.0;
  std::array<double, 4> k_dist{};
};

struct ConditionedObservable {
  double value_a = 0.0;
  double value_b = 0.0;
  double acceptance = 0.0;
};

/// Ideal final data check: project onto Z_D1Z_D3 = Z_D2Z_D4 = +1 (basis Z)
/// or X_D1X_D2X_D3X_D4 = +1 (basis X), renormalize, and read both variants
/// of the logical operator.
inline ConditionedObservable conditioned_observable(const DensityMatrix& rho_full, Basis basis) {
  const DensityMatrix data = trace_out_ancillas(rho_full);
  const Stabilizers s = stabilizer_set(Register::Data);
  const LogicalOperators l = logical_operators(Register::Data);
  const CMatrix id = CMatrix::Identity(kDataDim, kDataDim);
  CMatrix proj = basis == Basis::Z ? CMatrix(0.25 * (id + s.s_z1.matrix()) * (id + s.s_z2.matrix()))
                                   : CMatrix(0.5 * (id + s.s_x.matrix()));
  CMatrix post = proj * data.matrix() * proj;
  const double acc = post.trace().real();
  if (acc < kBranchPruneThreshold) throw NumericError("final data check has zero acceptance");
  const DensityMatrix cond(post / acc);
  const Operator& a = basis == Basis::Z ? l.z_l_a : l.x_l_a;
  const Operator& b = basis == Basis::Z ? l.z_l_b : l.x_l_b;
  return {expectation(cond, a), expectation(cond, b), acc};
}

inline void check_detection_target(const PrepSpec& target, Basis basis) {
  const auto* named = std::get_if<LogicalTarget>(&target);
  const bool ok = named && (basis == Basis::Z ? (*named == LogicalTarget::ZeroL || *named == LogicalTarget::OneL)
                                              : (*named == LogicalTarget::PlusL || *named == LogicalTarget::MinusL));
  if (!ok) throw ConfigError("detection in basis " + std::string(to_string(basis)) + " needs target " +
                             (basis == Basis::Z ? "0L or 1L" : "+L or -L"));
}

inline std::vector<DetectionPoint> run_detection(const PrepSpec& target, int n_max, const CycleSimulator& sim,
                                                 Basis basis) {
  check_detection_target(target, basis);
  if (n_max < 1) throw ConfigError("detection needs at least one cycle");
  const Timing& t = sim.config().timing;
  std::vector<DetectionPoint> points;
  DensityMatrix rho = sim.prepare(target);
  double p_s = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    CycleHead head = sim.run_cycle_head(rho);
    if (head.prob[0] < kBranchPruneThreshold || !head.state[0]) {
      throw NumericError("clean-branch weight underflow at cycle " + std::to_string(n));
    }
    DetectionPoint pt;
    pt.n = n;
    pt.t_us = (t.cycle_ns * n + t.prep_offset_ns) / 1000.0;
    p_s *= head.prob[0];
    pt.p_s = p_s;
    double total = 0.0;
    for (unsigned s = 0; s < 8; ++s) total += head.prob[s];
    for (unsigned s = 0; s < 8; ++s) pt.k_dist[static_cast<std::size_t>(std::popcount(s))] += head.prob[s] / total;
    rho = sim.run_cycle_tail(*head.state[0]);
    const ConditionedObservable obs = conditioned_observable(rho, basis);
    pt.observable = obs.value_a;
    pt.observable_b = obs.value_b;
    points.push_back(pt);
  }
  return points;
}

inline std::vector<DetectionPoint> run_detection(const PrepSpec& target, int n_max, const DeviceConfig& config,
                                                 Basis basis, bool noise = true) {
  return run_detection(target, n_max, CycleSimulator(config, noise), basis);
}

inline FitResult fit_detection(const std::vector<DetectionPoint>& points, double cycle_us = 1.92) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : points) xy.emplace_back(p.t_us, p.observable);
  return fit_exponential(xy, cycle_us);
}

// ---------------------------------------------------------------------------
// Parity characterization

struct ParityEntry {
  std::string label;  // data bits in the check's qubit order, e.g. "0110"
  int ideal = 0;      // parity outcome a perfect device reports
  double p0 = 0.0;
  double p1 = 0.0;
};

struct ParityResult {
  ParityCheck check = ParityCheck::A1_Z13;
  QubitId ancilla = QubitId::A1;
  std::vector<QubitId> data;
  std::vector<ParityEntry> entries;
  double success = 0.0;  // mean probability of the ideal outcome
};

inline std::vector<ParityResult> run_parity_characterization(const CycleSimulator& sim) {
  std::vector<ParityResult> out;
  for (ParityCheck check : kParityChecks) {
    ParityResult r;
    r.check = check;
    r.ancilla = parity_ancilla(check);
    r.data = parity_data_qubits(check, sim.config());
    std::sort(r.data.begin(), r.data.end());
    const std::size_t m = r.data.size();
    r.entries.resize(std::size_t{1} << m);
    parallel_for(r.entries.size(), [&](std::size_t bits) {
      ParityEntry e;
      std::vector<QubitId> excited;
      for (std::size_t k = 0; k < m; ++k) {
        const bool one = (bits >> (m - 1 - k)) & 1u;
        e.label.push_back(one ? '1' : '0');
        if (one) excited.push_back(r.data[k]);
      }
      e.ideal = static_cast<int>(excited.size() % 2);
      const Schedule circuit = build_parity_circuit(sim.config(), check, excited);
      for (const Branch& b : sim.run({{0, 1.0, CycleSimulator::ground_state()}}, circuit.segments)) {
        (b.syndrome ? e.p1 : e.p0) += b.weight;
      }
      r.entries[bits] = std::move(e);
    });
    double sum = 0.0;
    for (const auto& e : r.entries) sum += e.ideal ? e.p1 : e.p0;
    r.success = sum / static_cast<double>(r.entries.size());
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ParityResult> run_parity_characterization(const DeviceConfig& config, bool noise) {
  return run_parity_characterization(CycleSimulator(config, noise));
}

// ---------------------------------------------------------------------------
// Monte Carlo over syndrome histories

namespace detail {

/// Lazily expanded tree of syndrome histories; each node is one cycle.
class HistoryTree {
 public:
  struct Node {
    std::once_flag once;
    std::optional<DensityMatrix> input;  // state entering the node (pre-tail for non-root nodes)
    bool needs_tail = false;
    std::array<double, 8> prob{};
    std::array<std::unique_ptr<Node>, 8> children;
  };

  HistoryTree(const CycleSimulator& sim, DensityMatrix start, int depth) : sim_(sim), depth_(depth) {
    root_.input = std::move(start);
  }

  Node& root() { return root_; }

  const Node& expand(Node& node, int level) {
    std::call_once(node.once, [&] {
      DensityMatrix rho = node.needs_tail ? sim_.run_cycle_tail(*node.input) : std::move(*node.input);
      node.input.reset();
      const bool more = level + 1 < depth_;
      CycleHead head = sim_.run_cycle_head(rho, more);
      node.prob = head.prob;
      if (!more) return;
      for (std::size_t s = 0; s < 8; ++s) {
        if (!head.state[s]) continue;
        node.children[s] = std::make_unique<Node>();
        node.children[s]->input = std::move(head.state[s]);
        node.children[s]->needs_tail = true;
      }
    });
    return node;
  }

 private:
  const CycleSimulator& sim_;
  int depth_;
  Node root_;
};

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

using SyndromeHistogram = std::map<std::string, std::uint64_t>;

/// Draws `shots` syndrome histories of `n_cycles` cycles from the exact
/// branch distribution. Histories print as per-cycle "A1A2A3" groups joined
/// by '-'. Shots are split into fixed chunks with seeds derived from (seed,
/// chunk), so counts do not depend on the number of threads.
inline SyndromeHistogram sample_trajectories(const PrepSpec& target, int n_cycles, std::uint64_t shots,
                                             std::uint64_t seed, const CycleSimulator& sim) {
  if (shots < 1) throw ConfigError("shots must be >= 1");
  if (n_cycles < 1) throw ConfigError("n_cycles must be >= 1");
  detail::HistoryTree tree(sim, sim.prepare(target), n_cycles);
  const std::uint64_t chunks = std::min<std::uint64_t>(shots, 64);
  std::vector<SyndromeHistogram> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    const std::uint64_t begin = shots * c / chunks;
    const std::uint64_t end = shots * (c + 1) / chunks;
    for (std::uint64_t shot = begin; shot < end; ++shot) {
      std::string history;
      auto* node = &tree.root();
      for (int level = 0; level < n_cycles; ++level) {
        const auto& expanded = tree.expand(*node, level);
        double total = 0.0;
        for (double p : expanded.prob) total += p;
        const double u = detail::uniform01(rng) * total;
        std::size_t pick = 0;
        double acc = 0.0;
        for (std::size_t s = 0; s < 8; ++s) {
          if (expanded.prob[s] <= 0.0) continue;
          pick = s;
          acc += expanded.prob[s];
          if (u < acc) break;
        }
        if (level) history.push_back('-');
        history += syndrome_string(static_cast<Syndrome>(pick));
        if (level + 1 < n_cycles) node = expanded.children[pick].get();
      }
      ++partial[c][history];
    }
  });
  SyndromeHistogram merged;
  for (const auto& p : partial) {
    for (const auto& [k, v] : p) merged[k] += v;
  }
  return merged;
}

inline SyndromeHistogram sample_trajectories(const PrepSpec& target, int n_cycles, std::uint64_t shots,
                                             std::uint64_t seed, const DeviceConfig& config, bool noise = true) {
  return sample_trajectories(target, n_cycles, shots, seed, CycleSimulator(config, noise));
}

}  // namespace surface7

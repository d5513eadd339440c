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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "surface7/schedule.hpp"

namespace surface7 {
namespace {

using enum QubitId;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Brute-force state-vector oracle that does not use embed(): every gate is
// applied by direct index manipulation on the 128-vector.
CVector apply_gate_oracle(const CVector& psi, const Gate& g) {
  CVector out = psi;
  if (g.kind == GateKind::CZ) {
    const std::size_t m = bit_mask(g.targets[0]) | bit_mask(g.targets[1]);
    for (Index i = 0; i < psi.size(); ++i) {
      if ((static_cast<std::size_t>(i) & m) == m) out(i) = -psi(i);
    }
    return out;
  }
  const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
  const std::size_t m = bit_mask(g.targets[0]);
  for (Index i = 0; i < psi.size(); ++i) {
    if (static_cast<std::size_t>(i) & m) continue;
    const Index j = i | static_cast<Index>(m);
    if (g.kind == GateKind::Ry) {
      out(i) = c * psi(i) - s * psi(j);
      out(j) = s * psi(i) + c * psi(j);
    } else if (g.kind == GateKind::Rz) {
      out(i) = std::exp(Complex(0, -g.angle / 2)) * psi(i);
      out(j) = std::exp(Complex(0, g.angle / 2)) * psi(j);
    }
  }
  return out;
}

// P(ancilla = 1) just before each of its measurements, for data input `data`.
std::map<QubitId, double> ancilla_ones(const Schedule& s, const CVector& data) {
  CVector psi = CVector::Zero(kDim);
  for (Index a = 0; a < kDataDim; ++a) psi(a * 8) = data(a);
  std::map<QubitId, double> out;
  for (const Segment& seg : s.segments) {
    if (seg.is_unitary()) {
      for (const Gate& g : seg.unitary().gates) psi = apply_gate_oracle(psi, g);
    } else if (seg.is_measure()) {
      for (QubitId q : seg.measure().qubits) {
        double p = 0;
        for (Index i = 0; i < kDim; ++i) {
          if (static_cast<std::size_t>(i) & bit_mask(q)) p += std::norm(psi(i));
        }
        out[q] = p;
      }
    }
  }
  return out;
}

CVector data_basis(const std::string& bits) {
  CVector v = CVector::Zero(kDataDim);
  v(std::stoi(bits, nullptr, 2)) = 1.0;
  return v;
}

TEST(BuildCycle, DefaultStructure) {
  const Schedule s = build_cycle(default_config());
  EXPECT_DOUBLE_EQ(s.total_ns, 1920.0);
  EXPECT_EQ(s.count_gates(GateKind::CZ), 8u);

  std::set<std::pair<QubitId, QubitId>> pairs;
  int cz_bursts = 0;
  for (const Segment& seg : s.segments) {
    if (!seg.is_unitary()) continue;
    bool has_cz = false;
    for (const Gate& g : seg.unitary().gates) {
      if (g.kind == GateKind::CZ) {
        has_cz = true;
        pairs.insert({g.targets[0], g.targets[1]});
      }
    }
    cz_bursts += has_cz;
  }
  EXPECT_EQ(cz_bursts, 6);
  const std::set<std::pair<QubitId, QubitId>> expected{{A2, D1}, {A2, D2}, {A2, D3}, {A2, D4},
                                                       {A1, D1}, {A1, D3}, {A3, D2}, {A3, D4}};
  EXPECT_EQ(pairs, expected);

  std::vector<std::vector<QubitId>> measured;
  for (const Segment& seg : s.segments) {
    if (seg.is_measure()) measured.push_back(seg.measure().qubits);
  }
  ASSERT_EQ(measured.size(), 2u);
  EXPECT_EQ(measured[0], std::vector<QubitId>{A2});
  EXPECT_EQ(measured[1], (std::vector<QubitId>{A1, A3}));
}

TEST(BuildCycle, IdlesTileTheCycle) {
  const Schedule s = build_cycle(default_config());
  double t = 0.0;
  for (const Segment& seg : s.segments) {
    if (!seg.is_idle()) continue;
    EXPECT_NEAR(seg.start_ns, t, 1e-9);
    t += seg.idle().duration_ns;
  }
  EXPECT_NEAR(t, 1920.0, 1e-9);
}

TEST(BuildCycle, NoQubitTwiceInABurst) {
  DeviceConfig c = default_config();
  for (bool dd : {true, false}) {
    c.options.dd_enabled = dd;
    for (const Segment& seg : build_cycle(c).segments) {
      if (!seg.is_unitary()) continue;
      std::set<QubitId> seen;
      for (const Gate& g : seg.unitary().gates) {
        for (QubitId q : g.targets) EXPECT_TRUE(seen.insert(q).second) << "at " << seg.start_ns;
      }
    }
  }
}

TEST(BuildCycle, DecouplingOption) {
  DeviceConfig c = default_config();
  const auto count_pi = [](const Schedule& s) {
    int n = 0;
    for (const Segment& seg : s.segments) {
      if (!seg.is_unitary()) continue;
      for (const Gate& g : seg.unitary().gates) n += g.kind == GateKind::Ry && std::abs(g.angle - kPi) < 1e-12;
    }
    return n;
  };
  EXPECT_EQ(count_pi(build_cycle(c)), 4);
  c.options.dd_enabled = false;
  EXPECT_EQ(count_pi(build_cycle(c)), 0);
}

TEST(BuildCycle, EchoSitsInsideAReadoutWindow) {
  const Schedule s = build_cycle(default_config());
  for (const Segment& seg : s.segments) {
    if (!seg.is_unitary() || seg.unitary().gates.front().angle != kPi) continue;
    EXPECT_DOUBLE_EQ(seg.start_ns, 880.0 + 150.0);
  }
}

TEST(BuildCycle, Deterministic) {
  EXPECT_EQ(build_cycle(default_config()).dump(), build_cycle(default_config()).dump());
}

TEST(BuildCycle, CriticalPathOverflow) {
  DeviceConfig c = default_config();
  c.timing.cycle_ns = 1000.0;
  try {
    build_cycle(c);
    FAIL() << "expected ScheduleError";
  } catch (const ScheduleError& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds cycle_ns 1000 ns by 180 ns"), std::string::npos) << e.what();
  }
}

TEST(BuildCycle, GoldenDump) {
  const std::string golden = read_file(std::string(SURFACE7_TEST_DATA_DIR) + "/cycle_default.txt");
  ASSERT_FALSE(golden.empty());
  EXPECT_EQ(build_cycle(default_config()).dump(), golden);
}

TEST(IdealCycleCheck, PassesForAll32ProductInputs) {
  const UnitaryCheckReport r = ideal_cycle_unitary_check(build_cycle(default_config()));
  EXPECT_TRUE(r.ok()) << ::testing::PrintToString(r.failures);
  // 16 Z inputs x 2 Z checks + 16 X inputs x 1 X check.
  EXPECT_EQ(r.checked, 48u);
}

TEST(IdealCycleCheck, PassesForEveryCzOrderAndWithoutEchoes) {
  DeviceConfig c = default_config();
  std::array<QubitId, 4> order{D1, D2, D3, D4};
  do {
    c.options.a2_cz_order = order;
    c.options.dd_enabled = order[0] == D1;
    EXPECT_TRUE(ideal_cycle_unitary_check(build_cycle(c)).ok());
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(IdealCycleCheck, DetectsABrokenSchedule) {
  Schedule s = build_cycle(default_config());
  for (Segment& seg : s.segments) {
    if (seg.is_unitary() && seg.start_ns == 600.0) std::get<UnitarySegment>(seg.body).gates.pop_back();
  }
  EXPECT_FALSE(ideal_cycle_unitary_check(s).ok());
}

TEST(IdealCycleOracle, ReferenceInputs) {
  const Schedule s = build_cycle(default_config());
  auto p = ancilla_ones(s, data_basis("0000"));
  EXPECT_NEAR(p[A1], 0.0, 1e-12);
  EXPECT_NEAR(p[A3], 0.0, 1e-12);

  p = ancilla_ones(s, data_basis("1000"));
  EXPECT_NEAR(p[A1], 1.0, 1e-12);
  EXPECT_NEAR(p[A3], 0.0, 1e-12);

  const CVector ghz = (data_basis("0000") + data_basis("1111")) / std::sqrt(2.0);
  EXPECT_NEAR(ancilla_ones(s, ghz)[A2], 0.0, 1e-12);
  const CVector ghz_minus = (data_basis("0000") - data_basis("1111")) / std::sqrt(2.0);
  EXPECT_NEAR(ancilla_ones(s, ghz_minus)[A2], 1.0, 1e-12);
}

TEST(BuildPrep, NamedTargets) {
  EXPECT_TRUE(build_prep(LogicalTarget::ZeroL).unitary().gates.empty());
  const auto one = build_prep(LogicalTarget::OneL).unitary().gates;
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].targets[0], D2);
  EXPECT_EQ(one[1].targets[0], D4);
  EXPECT_DOUBLE_EQ(one[0].angle, kPi);
  const auto plus = build_prep(LogicalTarget::PlusL).unitary().gates;
  EXPECT_DOUBLE_EQ(plus[0].angle, kPi / 2);
  EXPECT_DOUBLE_EQ(plus[1].angle, kPi / 2);
}

TEST(BuildPrep, ProducesRequestedProductState) {
  const double a = 0.6, b = 0.8, phi = 0.7;
  CVector psi = CVector::Zero(kDim);
  psi(0) = 1.0;
  const Segment prep = build_prep(PrepAmplitudes{a, b, phi});
  for (const Gate& g : prep.unitary().gates) psi = apply_gate_oracle(psi, g);
  // |0>(a|0>+b|1>)|0>(a|0>+b e^{i phi}|1>) up to global phase.
  CVector expected = CVector::Zero(kDim);
  const Complex e = std::exp(Complex(0, phi));
  expected(0) = a * a;
  expected(std::stoi("0001", nullptr, 2) * 8) = a * b * e;
  expected(std::stoi("0100", nullptr, 2) * 8) = b * a;
  expected(std::stoi("0101", nullptr, 2) * 8) = b * b * e;
  EXPECT_NEAR(std::abs(expected.dot(psi)), 1.0, 1e-12);
}

TEST(BuildPrep, RejectsUnnormalizedAmplitudes) {
  EXPECT_THROW(build_prep(PrepAmplitudes{0.6, 0.6, 0.0}), ConfigError);
  EXPECT_THROW(parse_logical_target("2L"), ConfigError);
}

TEST(ParityCircuit, IdealParityForEveryBasisState) {
  for (ParityCheck check : kParityChecks) {
    const auto data = parity_data_qubits(check, default_config());
    for (unsigned bits = 0; bits < (1u << data.size()); ++bits) {
      std::vector<QubitId> excited;
      for (std::size_t k = 0; k < data.size(); ++k) {
        if (bits & (1u << k)) excited.push_back(data[k]);
      }
      const Schedule s = build_parity_circuit(default_config(), check, excited);
      const double p1 = ancilla_ones(s, data_basis("0000"))[parity_ancilla(check)];
      EXPECT_NEAR(p1, static_cast<double>(excited.size() % 2), 1e-12);
      for (const Segment& seg : s.segments) {
        if (!seg.is_unitary()) continue;
        for (const Gate& g : seg.unitary().gates) {
          // Z-type parity: no data basis change.
          if (is_data(g.targets[0]) && g.kind == GateKind::Ry) EXPECT_DOUBLE_EQ(g.angle, kPi);
        }
      }
    }
  }
}

}  // namespace
}  // namespace surface7

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

#include <cstdlib>

#include "surface7/surface7.hpp"

namespace surface7 {
namespace {

using enum QubitId;
using enum LogicalTarget;

// Shared simulators; building one costs a few hundred milliseconds.
const CycleSimulator& noisy() {
  static const CycleSimulator sim(default_config(), true);
  return sim;
}

const CycleSimulator& ideal() {
  static const CycleSimulator sim(default_config(), false);
  return sim;
}

const std::vector<DetectionPoint>& detection(LogicalTarget t) {
  static std::map<LogicalTarget, std::vector<DetectionPoint>> cache;
  auto it = cache.find(t);
  if (it == cache.end()) {
    const Basis b = (t == ZeroL || t == OneL) ? Basis::Z : Basis::X;
    it = cache.emplace(t, run_detection(t, 3, noisy(), b)).first;
  }
  return it->second;
}

// Oracle for the noiseless acceptance probability: the squared norm of the
// prepared data state inside the code space.
double code_space_weight(const PrepSpec& spec) {
  const PrepAmplitudes amp = amplitudes_of(spec);
  const CVector q = (CVector(2) << amp.a, amp.b).finished();
  const CVector r = (CVector(2) << Complex(amp.a), amp.b * std::exp(Complex(0, amp.phi))).finished();
  const CVector zero = (CVector(2) << 1.0, 0.0).finished();
  // D1 D2 D3 D4 = |0> q |0> r, leftmost most significant.
  CVector psi = CVector::Zero(kDataDim);
  for (Index i2 = 0; i2 < 2; ++i2) {
    for (Index i4 = 0; i4 < 2; ++i4) psi(i2 * 4 + i4) = zero(0) * q(i2) * zero(0) * r(i4);
  }
  return (psi.adjoint() * code_projector().matrix() * psi)(0, 0).real();
}

TEST(Syndrome, Packing) {
  EXPECT_EQ(syndrome_bit(A1), 4);
  EXPECT_EQ(syndrome_bit(A2), 2);
  EXPECT_EQ(syndrome_bit(A3), 1);
  EXPECT_EQ(syndrome_string(0b100), "100");
  EXPECT_EQ(syndrome_string(0b011), "011");
}

TEST(ProjectLogical, Examples) {
  auto p = project_logical(DensityMatrix::from_pure(logical_zero()));
  EXPECT_NEAR(p.p_l, 1.0, 1e-15);
  EXPECT_NEAR(std::abs(p.rho_l(0, 0) - 1.0), 0.0, 1e-15);

  p = project_logical(DensityMatrix::basis_state(0, kDataDim));
  EXPECT_NEAR(p.p_l, 0.5, 1e-15);
  EXPECT_NEAR(p.rho_l(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(p.rho_l(1, 1)), 0.0, 1e-15);

  p = project_logical(DensityMatrix::maximally_mixed(kDataDim));
  EXPECT_NEAR(p.p_l, 2.0 / 16.0, 1e-15);
  EXPECT_LE(max_abs_diff(p.rho_l, CMatrix::Identity(2, 2) / 2.0), 1e-15);

  EXPECT_THROW(project_logical(DensityMatrix::basis_state(8, kDataDim)), NumericError);
}

TEST(Prep, NoiselessZeroL) {
  const PrepResult r = run_prep(ZeroL, ideal());
  EXPECT_NEAR(r.success_prob, 0.5, 1e-9);
  EXPECT_NEAR(r.f_phys, 1.0, 1e-9);
  EXPECT_NEAR(r.p_l, 1.0, 1e-9);
  EXPECT_NEAR(r.f_l, 1.0, 1e-9);
}

TEST(Prep, NoiselessSuccessEqualsCodeSpaceWeight) {
  const std::vector<PrepSpec> specs{ZeroL, OneL, PlusL, MinusL, PrepAmplitudes{0.6, 0.8, 0.0},
                                    PrepAmplitudes{0.8, 0.6, 1.1}};
  for (const PrepSpec& s : specs) {
    const PrepResult r = run_prep(s, ideal());
    EXPECT_NEAR(r.success_prob, code_space_weight(s), 1e-9);
    EXPECT_NEAR(r.f_l, 1.0, 1e-9);
    EXPECT_NEAR(r.p_l, 1.0, 1e-9);
  }
}

TEST(Prep, NoiselessAmplitudeTargetMatchesOracle) {
  const double a = 0.6, b = 0.8, phi = 0.9;
  const PrepResult r = run_prep(PrepAmplitudes{a, b, phi}, ideal());
  CVector v(2);
  v << a * a, b * b * std::exp(Complex(0, phi));
  v /= v.norm();
  EXPECT_LE(max_abs_diff(r.rho_l, v * v.adjoint()), 1e-9);
}

TEST(Prep, NoisyZeroLInBandAndConsistent) {
  const PrepResult r = run_prep(ZeroL, noisy());
  EXPECT_GE(r.f_l, 0.965);
  EXPECT_LE(r.f_l, 1.0);
  EXPECT_GE(r.p_l, 0.6);
  EXPECT_LE(r.p_l, 0.85);
  EXPECT_NEAR(r.f_phys, r.f_l * r.p_l, 1e-12);
  EXPECT_NO_THROW(r.rho_full.check());
  EXPECT_GT(r.success_prob, 0.0);
  EXPECT_LT(r.success_prob, 0.5);
}

TEST(Detection, NoiselessFixedPoint) {
  for (LogicalTarget t : {ZeroL, PlusL}) {
    const Basis b = t == ZeroL ? Basis::Z : Basis::X;
    const auto pts = run_detection(t, 4, ideal(), b);
    ASSERT_EQ(pts.size(), 4u);
    for (const auto& p : pts) {
      EXPECT_NEAR(p.observable, 1.0, 1e-9);
      EXPECT_NEAR(p.observable_b, 1.0, 1e-9);
      EXPECT_NEAR(p.p_s, t == ZeroL ? 0.5 : 0.25, 1e-9);
      EXPECT_NEAR(p.t_us, (1920.0 * p.n + 300.0) / 1000.0, 1e-12);
    }
  }
  EXPECT_NEAR(run_detection(OneL, 2, ideal(), Basis::Z).back().observable, -1.0, 1e-9);
  EXPECT_NEAR(run_detection(MinusL, 2, ideal(), Basis::X).back().observable, -1.0, 1e-9);
}

TEST(Detection, RejectsBasisMismatch) {
  EXPECT_THROW(run_detection(ZeroL, 2, ideal(), Basis::X), ConfigError);
  EXPECT_THROW(run_detection(PlusL, 2, ideal(), Basis::Z), ConfigError);
  EXPECT_THROW(run_detection(PrepAmplitudes{0.6, 0.8, 0.0}, 2, ideal(), Basis::Z), ConfigError);
  EXPECT_THROW(run_detection(ZeroL, 0, ideal(), Basis::Z), ConfigError);
}

TEST(Detection, NoisyInvariants) {
  for (LogicalTarget t : {ZeroL, OneL}) {
    const auto& pts = detection(t);
    double prev = 1.0;
    for (const auto& p : pts) {
      double sum = 0.0;
      for (double k : p.k_dist) sum += k;
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_LT(p.p_s, prev);
      prev = p.p_s;
      EXPECT_NEAR(p.observable, p.observable_b, 1e-9);
      EXPECT_LE(std::abs(p.observable), 1.0);
    }
  }
}

TEST(Detection, ZeroAndOneAreMirrorImages) {
  const auto& zero = detection(ZeroL);
  const auto& one = detection(OneL);
  for (std::size_t i = 0; i < zero.size(); ++i) {
    EXPECT_GT(zero[i].observable, 0.5);
    EXPECT_LT(one[i].observable, -0.5);
    EXPECT_LE(std::abs(zero[i].observable + one[i].observable), 0.02) << "n=" << zero[i].n;
  }
}

TEST(Parity, NoiselessIsPerfect) {
  for (const ParityResult& r : run_parity_characterization(ideal())) {
    EXPECT_NEAR(r.success, 1.0, 1e-12);
    for (const auto& e : r.entries) EXPECT_NEAR(e.ideal ? e.p1 : e.p0, 1.0, 1e-12);
  }
}

TEST(Parity, NoisyOrderingAndStructure) {
  const auto results = run_parity_characterization(noisy());
  ASSERT_EQ(results.size(), 3u);
  const ParityResult& a1 = results[0];
  const ParityResult& a2 = results[1];
  EXPECT_EQ(a1.ancilla, A1);
  EXPECT_EQ(a2.ancilla, A2);
  EXPECT_EQ(a2.entries.size(), 16u);
  EXPECT_GT(a1.success, a2.success);
  EXPECT_EQ(a2.entries.front().label, "0000");
  EXPECT_EQ(a2.entries.back().label, "1111");
  EXPECT_LT(a2.entries.back().p0, a2.entries.front().p0);
  for (const auto& r : results) {
    for (const auto& e : r.entries) EXPECT_NEAR(e.p0 + e.p1, 1.0, 1e-9);
  }
}

TEST(Sampler, NoiselessOneCycle) {
  const std::uint64_t shots = 10000;
  const auto h = sample_trajectories(ZeroL, 1, shots, 123, ideal());
  std::uint64_t total = 0;
  for (const auto& [k, v] : h) total += v;
  EXPECT_EQ(total, shots);
  const double frac = static_cast<double>(h.count("000") ? h.at("000") : 0) / static_cast<double>(shots);
  EXPECT_NEAR(frac, 0.5, 3.0 * std::sqrt(0.25 / static_cast<double>(shots)));
  for (const auto& [k, v] : h) EXPECT_TRUE(k == "000" || k == "010") << k;
}

TEST(Sampler, DeterministicAndThreadIndependent) {
  const auto a = sample_trajectories(PlusL, 2, 500, 7, ideal());
  EXPECT_EQ(a, sample_trajectories(PlusL, 2, 500, 7, ideal()));
  ::setenv("SURFACE7_THREADS", "1", 1);
  const auto single = sample_trajectories(PlusL, 2, 500, 7, ideal());
  ::setenv("SURFACE7_THREADS", "3", 1);
  const auto three = sample_trajectories(PlusL, 2, 500, 7, ideal());
  ::unsetenv("SURFACE7_THREADS");
  EXPECT_EQ(a, single);
  EXPECT_EQ(a, three);
  EXPECT_NE(a, sample_trajectories(PlusL, 2, 500, 8, ideal()));
}

TEST(Sampler, AgreesWithDeterministicPostSelection) {
  const std::uint64_t shots = 4000;
  const auto h = sample_trajectories(ZeroL, 2, shots, 2026, noisy());
  const double p = detection(ZeroL)[1].p_s;
  const double frac = static_cast<double>(h.count("000-000") ? h.at("000-000") : 0) / static_cast<double>(shots);
  EXPECT_NEAR(frac, p, 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(shots)));
}

TEST(Sampler, RejectsBadArguments) {
  EXPECT_THROW(sample_trajectories(ZeroL, 1, 0, 1, ideal()), ConfigError);
  EXPECT_THROW(sample_trajectories(ZeroL, 0, 10, 1, ideal()), ConfigError);
}

}  // namespace
}  // namespace surface7

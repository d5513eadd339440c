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

// Idle evolution under the Lindblad master equation
//
//   drho/dt = -i [H_zz, rho] + sum_c ( c rho c^dag - {c^dag c, rho} / 2 )
//
// with one sqrt(1/T1) sigma_minus and one sqrt((1/T2 - 1/(2 T1))/2) sigma_z
// collapse operator per qubit and a diagonal residual-ZZ Hamiltonian. Time is
// in nanoseconds throughout.
//
// Every term is diagonal or a single-qubit lowering, so the generator acts
// entrywise on rho plus one shifted read per relaxing qubit. That form is
// what the integrator uses; the dense operators are kept for verification.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "surface7/device.hpp"
#include "surface7/errors.hpp"
#include "surface7/qop.hpp"
#include "surface7/schedule.hpp"

namespace surface7 {

/// Collapse operator with its rate folded into the normalization.
struct CollapseOp {
  Operator op;
};

/// Per-qubit rates in 1/ns.
struct QubitRates {
  double relaxation = 0.0;  // 1/T1
  double dephasing = 0.0;   // (1/T2 - 1/(2 T1)) / 2, the sigma_z collapse rate
};

class IdleGenerator {
 public:
  /// `zz_mhz` follows the ZZMatrix convention: H_zz = sum_{i<j} 2 pi alpha_ij |11><11|_ij.
  IdleGenerator(const std::array<QubitRates, kQubitCount>& rates, const QubitMatrix& zz_mhz) : rates_(rates) {
    for (const QubitRates& r : rates_) {
      if (!(r.relaxation >= 0.0) || !(r.dephasing >= 0.0) || !std::isfinite(r.relaxation) ||
          !std::isfinite(r.dephasing)) {
        throw ConfigError("negative or non-finite collapse rate");
      }
    }
    h_diag_ = Eigen::VectorXd::Zero(kDim);
    for (Index s = 0; s < kDim; ++s) {
      double e = 0.0;
      for (std::size_t i = 0; i < kQubitCount; ++i) {
        if (!(static_cast<std::size_t>(s) & bit_mask(kAllQubits[i]))) continue;
        for (std::size_t j = i + 1; j < kQubitCount; ++j) {
          if (static_cast<std::size_t>(s) & bit_mask(kAllQubits[j])) e += 2.0 * kPi * zz_mhz[i][j] * 1e-3;
        }
      }
      h_diag_(s) = e;
    }

    decay_ = CMatrix::Zero(kDim, kDim);
    for (Index c = 0; c < kDim; ++c) {
      for (Index r = 0; r < kDim; ++r) {
        double re = 0.0;
        for (std::size_t q = 0; q < kQubitCount; ++q) {
          const std::size_t m = bit_mask(kAllQubits[q]);
          const bool br = static_cast<std::size_t>(r) & m;
          const bool bc = static_cast<std::size_t>(c) & m;
          re -= 0.5 * rates_[q].relaxation * (static_cast<double>(br) + static_cast<double>(bc));
          if (br != bc) re -= 2.0 * rates_[q].dephasing;
        }
        decay_(r, c) = Complex(re, -(h_diag_(r) - h_diag_(c)));
      }
    }
    for (std::size_t q = 0; q < kQubitCount; ++q) {
      if (rates_[q].relaxation > 0.0) jumps_.push_back({bit_mask(kAllQubits[q]), rates_[q].relaxation});
    }
    trivial_ = jumps_.empty() && decay_.cwiseAbs().maxCoeff() == 0.0;
  }

  const std::array<QubitRates, kQubitCount>& rates() const noexcept { return rates_; }
  bool is_trivial() const noexcept { return trivial_; }

  /// Diagonal residual-ZZ Hamiltonian in rad/ns.
  Operator h_zz() const { return Operator(h_diag_.cast<Complex>().asDiagonal().toDenseMatrix()); }

  /// Embedded collapse operators; zero-rate entries are omitted.
  std::vector<CollapseOp> collapse_operators() const {
    std::vector<CollapseOp> out;
    for (std::size_t q = 0; q < kQubitCount; ++q) {
      if (rates_[q].relaxation > 0.0) {
        out.push_back({std::sqrt(rates_[q].relaxation) * embed(single_qubit_gate(GateKind::SigmaMinus), {kAllQubits[q]})});
      }
    }
    for (std::size_t q = 0; q < kQubitCount; ++q) {
      if (rates_[q].dephasing > 0.0) {
        out.push_back({std::sqrt(rates_[q].dephasing) * embed(single_qubit_gate(GateKind::Z), {kAllQubits[q]})});
      }
    }
    return out;
  }

  /// out = L(rho).
  void apply(const CMatrix& rho, CMatrix& out) const {
    out.resize(kDim, kDim);
    out.array() = decay_.array() * rho.array();
    for (const Jump& jump : jumps_) {
      const Index m = static_cast<Index>(jump.mask);
      for (Index c = 0; c < kDim; ++c) {
        if (c & m) continue;
        const Complex* src = rho.col(c | m).data();
        Complex* dst = out.col(c).data();
        for (Index r = 0; r < kDim; ++r) {
          if (!(r & m)) dst[r] += jump.rate * src[r | m];
        }
      }
    }
  }

 private:
  struct Jump {
    std::size_t mask;
    double rate;
  };

  std::array<QubitRates, kQubitCount> rates_;
  Eigen::VectorXd h_diag_;
  CMatrix decay_;
  std::vector<Jump> jumps_;
  bool trivial_ = true;
};

/// Collapse rates from the device, plus measurement-induced dephasing for
/// every qubit in `reading` when the config enables it.
inline IdleGenerator make_idle_generator(const DeviceConfig& config, std::span<const QubitId> reading = {}) {
  std::array<QubitRates, kQubitCount> rates{};
  for (QubitId q : kAllQubits) {
    const QubitParams& p = config.qubit(q);
    auto& r = rates[static_cast<std::size_t>(position(q))];
    r.relaxation = relaxation_rate_per_ns(p);
    r.dephasing = dephasing_rate_per_ns(p);
    if (r.dephasing < 0.0) throw ConfigError("negative dephasing rate for " + std::string(to_string(q)));
    if (config.options.meas_dephasing) {
      // sigma_z rate Gamma/2 makes coherences decay at Gamma.
      for (QubitId j : reading) {
        const double gamma_per_us = (*config.options.meas_dephasing)[static_cast<std::size_t>(position(q))]
                                                                    [static_cast<std::size_t>(position(j))];
        r.dephasing += 0.5 * gamma_per_us * 1e-3;
      }
    }
  }
  return IdleGenerator(rates, config.zz.alpha);
}

/// The same generator written with dense operators: -i[H, rho] + dissipators.
inline CMatrix lindblad_rhs_dense(const CMatrix& rho, const Operator& h, std::span<const CollapseOp> collapse) {
  const Complex i{0.0, 1.0};
  CMatrix out = -i * (h.matrix() * rho - rho * h.matrix());
  for (const CollapseOp& c : collapse) {
    const CMatrix& op = c.op.matrix();
    const CMatrix cdc = op.adjoint() * op;
    out += op * rho * op.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

/// Fixed-step classic RK4 over `duration_ns`; the last step is shortened to
/// land exactly on the duration. Trace drift up to 1e-8 is renormalized away,
/// anything larger is an error.
inline DensityMatrix evolve_idle(DensityMatrix rho, const IdleGenerator& gen, double duration_ns, double dt_ns) {
  if (!(duration_ns >= 0.0) || !std::isfinite(duration_ns)) throw std::invalid_argument("evolve_idle: bad duration");
  if (!(dt_ns > 0.0) || !std::isfinite(dt_ns)) throw std::invalid_argument("evolve_idle: dt must be > 0");
  if (gen.is_trivial() || duration_ns == 0.0) return rho;
  if (rho.dim() != kDim) throw std::invalid_argument("evolve_idle expects a 7-qubit state");

  const Complex trace_before = rho.trace();
  CMatrix& y = rho.mutable_matrix();
  CMatrix k1(kDim, kDim), k2(kDim, kDim), k3(kDim, kDim), k4(kDim, kDim), tmp(kDim, kDim);
  double elapsed = 0.0;
  while (duration_ns - elapsed > 1e-12 * std::max(1.0, duration_ns)) {
    const double h = std::min(dt_ns, duration_ns - elapsed);
    gen.apply(y, k1);
    tmp = y + (0.5 * h) * k1;
    gen.apply(tmp, k2);
    tmp = y + (0.5 * h) * k2;
    gen.apply(tmp, k3);
    tmp = y + h * k3;
    gen.apply(tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    elapsed += h;
  }
  if (!y.allFinite()) throw NumericError("evolve_idle produced non-finite entries");
  const double drift = std::abs(rho.trace() - trace_before);
  if (drift > 1e-8) {
    std::ostringstream os;
    os << "integrator step too coarse (trace drift " << drift << ")";
    throw NumericError(os.str());
  }
  if (drift > 1e-12) y *= trace_before.real() / rho.trace().real();
  return rho;
}

/// Left-multiplies every column of `m` by the embedded gate.
inline void apply_gate_to_columns(CMatrix& m, const Gate& g) {
  const Operator op = g.matrix();
  if (!op.is_unitary(1e-12)) throw NumericError("non-unitary gate " + format_gate(g));
  const CMatrix& u = op.matrix();
  const Index k = op.dim();
  std::vector<Index> masks;
  Index all = 0;
  for (QubitId q : g.targets) {
    masks.push_back(static_cast<Index>(bit_mask(q, m.rows() == kDim ? Register::Full : Register::Data)));
    all |= masks.back();
  }
  // offsets[s]: index offset of sub-state s, first target most significant.
  std::vector<Index> offsets(static_cast<std::size_t>(k), 0);
  for (Index s = 0; s < k; ++s) {
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if (s & (Index{1} << (masks.size() - 1 - t))) offsets[static_cast<std::size_t>(s)] |= masks[t];
    }
  }
  std::vector<Complex> in(static_cast<std::size_t>(k));
  for (Index c = 0; c < m.cols(); ++c) {
    Complex* col = m.col(c).data();
    for (Index base = 0; base < m.rows(); ++base) {
      if (base & all) continue;
      for (Index s = 0; s < k; ++s) in[static_cast<std::size_t>(s)] = col[base | offsets[static_cast<std::size_t>(s)]];
      for (Index r = 0; r < k; ++r) {
        Complex acc = 0.0;
        for (Index s = 0; s < k; ++s) acc += u(r, s) * in[static_cast<std::size_t>(s)];
        col[base | offsets[static_cast<std::size_t>(r)]] = acc;
      }
    }
  }
}

/// rho -> U rho U^dag with U the product of the burst's gates in listed order.
inline DensityMatrix apply_unitary_segment(const DensityMatrix& rho, const UnitarySegment& seg) {
  if (seg.gates.empty()) return rho;
  const Complex before = rho.trace();
  CMatrix a = rho.matrix();
  for (const Gate& g : seg.gates) apply_gate_to_columns(a, g);
  // (U rho) U^dag = (U (U rho)^dag)^dag
  CMatrix b = a.adjoint();
  for (const Gate& g : seg.gates) apply_gate_to_columns(b, g);
  DensityMatrix out(b.adjoint());
  if (std::abs(out.trace() - before) > 1e-12) throw NumericError("unitary burst changed the trace");
  return out;
}

}  // namespace surface7

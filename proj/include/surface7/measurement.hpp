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

// Ancilla readout as a minimal-disturbance POVM built from assignment
// probabilities:
//
//   M0 = sqrt(P(0|0)) |0><0| + sqrt(P(0|1)) |1><1|
//   M1 = sqrt(P(1|0)) |0><0| + sqrt(P(1|1)) |1><1|

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "surface7/errors.hpp"
#include "surface7/qop.hpp"

namespace surface7 {

inline constexpr double kBranchPruneThreshold = 1e-14;

struct Povm {
  Operator m0;
  Operator m1;

  static Povm from_assignment(double p00, double p11) {
    if (!(p00 >= 0.0 && p00 <= 1.0 && p11 >= 0.0 && p11 <= 1.0)) {
      throw ConfigError("assignment probabilities must lie in [0, 1]");
    }
    CMatrix m0 = CMatrix::Zero(2, 2);
    CMatrix m1 = CMatrix::Zero(2, 2);
    m0(0, 0) = std::sqrt(p00);
    m0(1, 1) = std::sqrt(1.0 - p11);
    m1(0, 0) = std::sqrt(1.0 - p00);
    m1(1, 1) = std::sqrt(p11);
    return {Operator(std::move(m0)), Operator(std::move(m1))};
  }

  static Povm ideal() { return from_assignment(1.0, 1.0); }

  /// max-abs of M0^dag M0 + M1^dag M1 - I.
  double completeness_error() const {
    const CMatrix sum = m0.matrix().adjoint() * m0.matrix() + m1.matrix().adjoint() * m1.matrix();
    return (sum - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
  }

  /// Diagonal of M_outcome: weight on |0> and on |1>.
  std::array<double, 2> diagonal(int outcome) const {
    const CMatrix& m = outcome == 0 ? m0.matrix() : m1.matrix();
    return {m(0, 0).real(), m(1, 1).real()};
  }
};

struct MeasurementBranch {
  std::string bits;  // one character per measured qubit, in measurement order
  double prob = 0.0;
  DensityMatrix state;
};

struct MeasurementBranches {
  std::vector<MeasurementBranch> entries;

  double total_probability() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.prob;
    return s;
  }
  const MeasurementBranch* find(std::string_view bits) const {
    for (const auto& e : entries) {
      if (e.bits == bits) return &e;
    }
    return nullptr;
  }
};

/// M rho M^dag for a POVM element diagonal on `q`; unnormalized.
inline CMatrix apply_povm_element(const CMatrix& rho, QubitId q, const Povm& povm, int outcome) {
  const auto w = povm.diagonal(outcome);
  const std::size_t mask = bit_mask(q, rho.rows() == kDim ? Register::Full : Register::Data);
  CMatrix out(rho.rows(), rho.cols());
  for (Index c = 0; c < rho.cols(); ++c) {
    const double wc = w[(static_cast<std::size_t>(c) & mask) ? 1 : 0];
    for (Index r = 0; r < rho.rows(); ++r) {
      out(r, c) = w[(static_cast<std::size_t>(r) & mask) ? 1 : 0] * wc * rho(r, c);
    }
  }
  return out;
}

/// Both outcomes of a single-qubit POVM. Branches below 1e-14 are dropped.
inline MeasurementBranches measure_one(const DensityMatrix& rho, QubitId q, const Povm& povm) {
  if (povm.completeness_error() > 1e-12) throw NumericError("POVM is not complete");
  MeasurementBranches out;
  double total = 0.0;
  for (int outcome : {0, 1}) {
    CMatrix post = apply_povm_element(rho.matrix(), q, povm, outcome);
    const double p = post.trace().real();
    total += p;
    if (p < kBranchPruneThreshold) continue;
    post /= p;
    out.entries.push_back({std::string(1, static_cast<char>('0' + outcome)), p, DensityMatrix(std::move(post))});
  }
  const double norm = rho.trace().real();
  if (std::abs(total - norm) > 1e-9) throw NumericError("measurement probabilities do not sum to 1");
  return out;
}

/// Sequential single-qubit POVMs on distinct qubits; bits follow `qubits`.
inline MeasurementBranches measure_multi(const DensityMatrix& rho, std::span<const QubitId> qubits,
                                         std::span<const Povm> povms) {
  if (qubits.size() != povms.size()) throw std::invalid_argument("measure_multi: one POVM per qubit required");
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    for (std::size_t j = i + 1; j < qubits.size(); ++j) {
      if (qubits[i] == qubits[j]) throw std::invalid_argument("measure_multi: qubits must be distinct");
    }
  }
  MeasurementBranches current;
  current.entries.push_back({"", 1.0, rho});
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    MeasurementBranches next;
    for (const auto& branch : current.entries) {
      for (auto& sub : measure_one(branch.state, qubits[k], povms[k]).entries) {
        const double p = branch.prob * sub.prob;
        if (p < kBranchPruneThreshold) continue;
        next.entries.push_back({branch.bits + sub.bits, p, std::move(sub.state)});
      }
    }
    current = std::move(next);
  }
  if (std::abs(current.total_probability() - 1.0) > 1e-9 * rho.trace().real()) {
    throw NumericError("measurement probabilities do not sum to 1");
  }
  return current;
}

}  // namespace surface7

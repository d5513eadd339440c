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

// Operator algebra on the seven-qubit register of the distance-2 surface code.
//
// Tensor order is fixed as [D1, D2, D3, D4, A1, A2, A3]; position 0 is the
// most significant bit of a computational-basis index. The four data qubits
// therefore occupy the high nibble, which lets data-only operators live in a
// 16-dimensional register with the same positions.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "surface7/errors.hpp"

namespace surface7 {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr int kQubitCount = 7;
inline constexpr int kDataQubitCount = 4;
inline constexpr Index kDim = Index{1} << kQubitCount;
inline constexpr Index kDataDim = Index{1} << kDataQubitCount;
inline constexpr double kPi = 3.14159265358979323846;

enum class QubitId : std::uint8_t { D1, D2, D3, D4, A1, A2, A3 };

inline constexpr std::array<QubitId, 7> kAllQubits{QubitId::D1, QubitId::D2, QubitId::D3, QubitId::D4,
                                                   QubitId::A1, QubitId::A2, QubitId::A3};
inline constexpr std::array<QubitId, 4> kDataQubits{QubitId::D1, QubitId::D2, QubitId::D3, QubitId::D4};
inline constexpr std::array<QubitId, 3> kAncillaQubits{QubitId::A1, QubitId::A2, QubitId::A3};

constexpr int position(QubitId q) noexcept { return static_cast<int>(q); }
constexpr bool is_data(QubitId q) noexcept { return position(q) < kDataQubitCount; }

inline std::string_view to_string(QubitId q) {
  static constexpr std::array<std::string_view, 7> kNames{"D1", "D2", "D3", "D4", "A1", "A2", "A3"};
  return kNames[static_cast<std::size_t>(position(q))];
}

inline std::optional<QubitId> qubit_from_string(std::string_view name) {
  for (QubitId q : kAllQubits) {
    if (to_string(q) == name) return q;
  }
  return std::nullopt;
}

/// Which Hilbert space an operator is embedded into.
enum class Register { Full, Data };

constexpr int register_size(Register reg) noexcept {
  return reg == Register::Full ? kQubitCount : kDataQubitCount;
}

/// Bit of `q` inside a computational-basis index of `reg`.
inline std::size_t bit_mask(QubitId q, Register reg = Register::Full) {
  const int n = register_size(reg);
  if (position(q) >= n) throw std::invalid_argument("ancilla qubit has no position in the data register");
  return std::size_t{1} << (n - 1 - position(q));
}

// ---------------------------------------------------------------------------
// Operator

class Operator {
 public:
  explicit Operator(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2 || (m_.rows() & (m_.rows() - 1)) != 0) {
      throw std::invalid_argument("operator dimension must be a power of two >= 2");
    }
    qubits_ = 0;
    while ((Index{1} << qubits_) < m_.rows()) ++qubits_;
  }

  static Operator identity(int qubit_count) {
    const Index d = Index{1} << qubit_count;
    return Operator(CMatrix::Identity(d, d));
  }

  const CMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  int qubit_count() const noexcept { return qubits_; }

  Operator adjoint() const { return Operator(m_.adjoint()); }

  double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }

  double unitarity_error() const {
    return (m_.adjoint() * m_ - CMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  }
  bool is_unitary(double tol = 1e-12) const { return unitarity_error() <= tol; }

  friend Operator operator*(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
    return Operator(a.m_ * b.m_);
  }
  friend Operator operator+(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
    return Operator(a.m_ + b.m_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
    return Operator(a.m_ - b.m_);
  }
  friend Operator operator*(Complex s, const Operator& a) { return Operator(s * a.m_); }

 private:
  CMatrix m_;
  int qubits_ = 0;
};

/// Max-abs entrywise distance.
inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_abs_diff(const Operator& a, const Operator& b) { return max_abs_diff(a.matrix(), b.matrix()); }

// ---------------------------------------------------------------------------
// DensityMatrix

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2 || (m_.rows() & (m_.rows() - 1)) != 0) {
      throw std::invalid_argument("density matrix dimension must be a power of two >= 2");
    }
  }

  static DensityMatrix from_pure(const CVector& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("cannot build a density matrix from a zero vector");
    const CVector v = psi / norm;
    return DensityMatrix(v * v.adjoint());
  }

  static DensityMatrix basis_state(Index index, Index dim = kDim) {
    CMatrix m = CMatrix::Zero(dim, dim);
    m(index, index) = 1.0;
    return DensityMatrix(std::move(m));
  }

  static DensityMatrix maximally_mixed(Index dim = kDim) {
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  const CMatrix& matrix() const noexcept { return m_; }
  CMatrix& mutable_matrix() noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

  Complex trace() const { return m_.trace(); }
  double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    const CMatrix h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  /// Population of `q` in |1>, for a full-register state.
  double excited_population(QubitId q) const {
    const std::size_t mask = bit_mask(q, dim() == kDim ? Register::Full : Register::Data);
    double p = 0.0;
    for (Index i = 0; i < dim(); ++i) {
      if (static_cast<std::size_t>(i) & mask) p += m_(i, i).real();
    }
    return p;
  }

  /// Throws NumericError if Hermiticity, trace, or positivity is violated.
  void check(double hermitian_tol = 1e-10, double trace_tol = 1e-8, double eigen_tol = 1e-8) const {
    if (!m_.allFinite()) throw NumericError("density matrix has non-finite entries");
    if (hermiticity_error() > hermitian_tol) throw NumericError("density matrix is not Hermitian");
    if (std::abs(trace() - 1.0) > trace_tol) throw NumericError("density matrix trace drifted from 1");
    if (min_eigenvalue() < -eigen_tol) throw NumericError("density matrix has a negative eigenvalue");
  }

 private:
  CMatrix m_;
};

// ---------------------------------------------------------------------------
// Gates

enum class GateKind { I, X, Y, Z, SigmaMinus, Proj0, Proj1, Ry, Rz, CZ };

inline std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::I: return "I";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::SigmaMinus: return "sigma_minus";
    case GateKind::Proj0: return "proj0";
    case GateKind::Proj1: return "proj1";
    case GateKind::Ry: return "Ry";
    case GateKind::Rz: return "Rz";
    case GateKind::CZ: return "CZ";
  }
  return "?";
}

inline GateKind parse_gate_kind(std::string_view name) {
  for (GateKind k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::SigmaMinus, GateKind::Proj0,
                     GateKind::Proj1, GateKind::Ry, GateKind::Rz, GateKind::CZ}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown gate kind '" + std::string(name) + "'");
}

/// Standard 2x2 matrix. Ry(t) = exp(-i t Y / 2), Rz(t) = exp(-i t Z / 2).
inline Operator single_qubit_gate(GateKind kind, double angle = 0.0) {
  if (!std::isfinite(angle)) throw ConfigError("gate angle must be finite");
  const Complex i{0.0, 1.0};
  CMatrix m(2, 2);
  switch (kind) {
    case GateKind::I: m << 1, 0, 0, 1; break;
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::Y: m << 0, -i, i, 0; break;
    case GateKind::Z: m << 1, 0, 0, -1; break;
    case GateKind::SigmaMinus: m << 0, 1, 0, 0; break;
    case GateKind::Proj0: m << 1, 0, 0, 0; break;
    case GateKind::Proj1: m << 0, 0, 0, 1; break;
    case GateKind::Ry: {
      const double c = std::cos(angle / 2.0);
      const double s = std::sin(angle / 2.0);
      m << c, -s, s, c;
      break;
    }
    case GateKind::Rz: m << std::exp(-i * (angle / 2.0)), 0, 0, std::exp(i * (angle / 2.0)); break;
    case GateKind::CZ: throw ConfigError("CZ is a two-qubit gate");
  }
  return Operator(std::move(m));
}

inline Operator cz_gate() {
  CMatrix m = CMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return Operator(std::move(m));
}

/// Acts as `op` on `targets` (first target = most significant factor of `op`)
/// and as the identity on every other qubit of `reg`.
inline Operator embed(const Operator& op, std::span<const QubitId> targets, Register reg = Register::Full) {
  if (static_cast<int>(targets.size()) != op.qubit_count()) {
    throw std::invalid_argument("embed: operator acts on " + std::to_string(op.qubit_count()) + " qubits but " +
                                std::to_string(targets.size()) + " targets were given");
  }
  std::size_t target_mask = 0;
  std::vector<std::size_t> masks;
  masks.reserve(targets.size());
  for (QubitId q : targets) {
    const std::size_t m = bit_mask(q, reg);
    if (target_mask & m) throw std::invalid_argument("embed: duplicate target " + std::string(to_string(q)));
    target_mask |= m;
    masks.push_back(m);
  }
  const Index dim = Index{1} << register_size(reg);
  const auto sub_index = [&](std::size_t full) {
    std::size_t s = 0;
    for (std::size_t m : masks) s = (s << 1) | ((full & m) ? 1u : 0u);
    return static_cast<Index>(s);
  };
  CMatrix out = CMatrix::Zero(dim, dim);
  const CMatrix& small = op.matrix();
  for (Index c = 0; c < dim; ++c) {
    const std::size_t cu = static_cast<std::size_t>(c);
    const Index sc = sub_index(cu);
    for (Index r = 0; r < dim; ++r) {
      const std::size_t ru = static_cast<std::size_t>(r);
      if ((ru & ~target_mask) != (cu & ~target_mask)) continue;
      out(r, c) = small(sub_index(ru), sc);
    }
  }
  return Operator(std::move(out));
}

inline Operator embed(const Operator& op, std::initializer_list<QubitId> targets, Register reg = Register::Full) {
  return embed(op, std::span<const QubitId>(targets.begin(), targets.size()), reg);
}

/// Product of the same single-qubit Pauli on every listed qubit.
inline Operator pauli_string(GateKind pauli, std::span<const QubitId> qubits, Register reg = Register::Full) {
  Operator out = Operator::identity(register_size(reg));
  const Operator p = single_qubit_gate(pauli);
  for (QubitId q : qubits) out = out * embed(p, {q}, reg);
  return out;
}

inline Operator pauli_string(GateKind pauli, std::initializer_list<QubitId> qubits, Register reg = Register::Full) {
  return pauli_string(pauli, std::span<const QubitId>(qubits.begin(), qubits.size()), reg);
}

// ---------------------------------------------------------------------------
// Code structure

struct Stabilizers {
  Operator s_x;   // X_D1 X_D2 X_D3 X_D4, read out by A2
  Operator s_z1;  // Z_D1 Z_D3, read out by A1
  Operator s_z2;  // Z_D2 Z_D4, read out by A3
};

inline Stabilizers stabilizer_set(Register reg = Register::Full) {
  using enum QubitId;
  return {pauli_string(GateKind::X, {D1, D2, D3, D4}, reg), pauli_string(GateKind::Z, {D1, D3}, reg),
          pauli_string(GateKind::Z, {D2, D4}, reg)};
}

/// Both published variants of each logical Pauli. They agree on the code space.
struct LogicalOperators {
  Operator z_l_a;  // Z_D1 Z_D2
  Operator z_l_b;  // Z_D3 Z_D4
  Operator x_l_a;  // X_D1 X_D3
  Operator x_l_b;  // X_D2 X_D4
};

inline LogicalOperators logical_operators(Register reg = Register::Full) {
  using enum QubitId;
  return {pauli_string(GateKind::Z, {D1, D2}, reg), pauli_string(GateKind::Z, {D3, D4}, reg),
          pauli_string(GateKind::X, {D1, D3}, reg), pauli_string(GateKind::X, {D2, D4}, reg)};
}

/// (|0000> + |1111>)/sqrt2 on the data register.
inline CVector logical_zero() {
  CVector v = CVector::Zero(kDataDim);
  v(0b0000) = v(0b1111) = 1.0 / std::sqrt(2.0);
  return v;
}

/// (|0101> + |1010>)/sqrt2 on the data register.
inline CVector logical_one() {
  CVector v = CVector::Zero(kDataDim);
  v(0b0101) = v(0b1010) = 1.0 / std::sqrt(2.0);
  return v;
}

/// Normalized alpha|0_L> + beta|1_L> on the data register.
inline CVector logical_state(Complex alpha, Complex beta) {
  CVector v = alpha * logical_zero() + beta * logical_one();
  const double n = v.norm();
  if (!(n > 0.0)) throw std::invalid_argument("logical_state: zero amplitudes");
  return v / n;
}

/// Projector onto the code space on the data register: prod_s (I + S_s)/2.
inline Operator code_projector() {
  const Stabilizers s = stabilizer_set(Register::Data);
  const Operator id = Operator::identity(kDataQubitCount);
  const Complex half{0.5, 0.0};
  return (half * (id + s.s_x)) * (half * (id + s.s_z1)) * (half * (id + s.s_z2));
}

// ---------------------------------------------------------------------------
// Expectations and fidelities

/// Tr(rho op) for Hermitian `op`.
inline double expectation(const DensityMatrix& rho, const Operator& op) {
  if (rho.dim() != op.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  if (!op.is_hermitian(1e-12)) throw std::invalid_argument("expectation: operator is not Hermitian");
  const Complex v = (rho.matrix() * op.matrix()).trace();
  if (std::abs(v.imag()) > 1e-9) throw NumericError("expectation has a non-negligible imaginary part");
  return v.real();
}

/// <psi| rho |psi> for a normalized pure target.
inline double fidelity(const DensityMatrix& rho, const CVector& target) {
  if (rho.dim() != target.size()) throw std::invalid_argument("fidelity: dimension mismatch");
  return (target.adjoint() * rho.matrix() * target)(0, 0).real();
}

// ---------------------------------------------------------------------------
// Register surgery. Full index = data_index * 8 + ancilla_index.

inline DensityMatrix trace_out_ancillas(const DensityMatrix& full) {
  if (full.dim() != kDim) throw std::invalid_argument("trace_out_ancillas expects a 7-qubit state");
  constexpr Index kAnc = kDim / kDataDim;
  CMatrix out = CMatrix::Zero(kDataDim, kDataDim);
  for (Index b = 0; b < kDataDim; ++b) {
    for (Index a = 0; a < kDataDim; ++a) {
      Complex s = 0.0;
      for (Index k = 0; k < kAnc; ++k) s += full.matrix()(a * kAnc + k, b * kAnc + k);
      out(a, b) = s;
    }
  }
  return DensityMatrix(std::move(out));
}

/// rho_data (x) |000><000| on the ancillas.
inline DensityMatrix attach_ground_ancillas(const DensityMatrix& data) {
  if (data.dim() != kDataDim) throw std::invalid_argument("attach_ground_ancillas expects a 4-qubit state");
  constexpr Index kAnc = kDim / kDataDim;
  CMatrix out = CMatrix::Zero(kDim, kDim);
  for (Index b = 0; b < kDataDim; ++b) {
    for (Index a = 0; a < kDataDim; ++a) out(a * kAnc, b * kAnc) = data.matrix()(a, b);
  }
  return DensityMatrix(std::move(out));
}

/// Embeds a data-register vector next to ancillas in |000>.
inline CVector with_ground_ancillas(const CVector& data) {
  if (data.size() != kDataDim) throw std::invalid_argument("with_ground_ancillas expects a 16-vector");
  CVector out = CVector::Zero(kDim);
  for (Index a = 0; a < kDataDim; ++a) out(a * (kDim / kDataDim)) = data(a);
  return out;
}

}  // namespace surface7

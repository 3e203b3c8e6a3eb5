// state_vector.hpp
// Exact state-vector quantum mechanics for small registers of labeled
// qubits: Bell/GHZ construction, local unitaries, tensor composition and
// projective measurement in the Z, X and Bell bases.
//
// Index convention, used everywhere: qubit 0 is the most significant bit
// of the computational-basis index. For a 2-qubit register |q0 q1>, the
// basis order is |00>, |01>, |10>, |11>.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsdc/rng.hpp"

namespace qsdc {

using Amplitude = std::complex<double>;

inline constexpr double kStateTol = 1e-12;
inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

/// Normalized complex amplitude vector over a register of labeled qubits.
/// Immutable in spirit: operations return new values, measurement returns
/// the collapsed state with the measured qubit pinned (no index remapping).
class StateVector {
 public:
  /// Register of `num_qubits` qubits in the computational basis state
  /// with index `basis` (defaults to |00...0>).
  explicit StateVector(int num_qubits, std::size_t basis = 0)
      : num_qubits_(num_qubits), amps_(std::size_t{1} << check_size(num_qubits)) {
    if (basis >= amps_.size()) {
      throw std::out_of_range("StateVector: basis index out of range");
    }
    amps_[basis] = Amplitude{1.0, 0.0};
  }

  StateVector(int num_qubits, std::vector<Amplitude> amplitudes)
      : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (amps_.size() != (std::size_t{1} << check_size(num_qubits))) {
      throw std::invalid_argument("StateVector: amplitude count is not 2^n");
    }
    for (const auto& a : amps_) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw std::invalid_argument("StateVector: non-finite amplitude");
      }
    }
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }
  Amplitude& operator[](std::size_t i) { return amps_[i]; }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }

  /// Basis-index mask selecting qubit `q` (qubit 0 = most significant bit).
  std::size_t qubit_mask(int q) const {
    if (q < 0 || q >= num_qubits_) {
      throw std::out_of_range("StateVector: qubit index out of range");
    }
    return std::size_t{1} << (num_qubits_ - 1 - q);
  }

  int bit_at(std::size_t basis, int q) const {
    return (basis & qubit_mask(q)) ? 1 : 0;
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  bool is_normalized(double tol = kStateTol) const {
    return std::abs(norm_sq() - 1.0) <= tol;
  }

 private:
  static int check_size(int num_qubits) {
    if (num_qubits < 1 || num_qubits > 30) {
      throw std::invalid_argument("StateVector: unsupported register size");
    }
    return num_qubits;
  }

  int num_qubits_;
  std::vector<Amplitude> amps_;
};

/// 2x2 complex matrix acting on one qubit; row-major entries.
struct LocalUnitary {
  std::array<Amplitude, 4> entries;  // { u00, u01, u10, u11 }

  bool is_unitary(double tol = kStateTol) const {
    const auto& u = entries;
    // columns orthonormal
    const double c0 = std::norm(u[0]) + std::norm(u[2]);
    const double c1 = std::norm(u[1]) + std::norm(u[3]);
    const Amplitude cross = std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3];
    return std::abs(c0 - 1.0) <= tol && std::abs(c1 - 1.0) <= tol &&
           std::abs(cross) <= tol;
  }

  static LocalUnitary identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
  static LocalUnitary pauli_z() { return {{1.0, 0.0, 0.0, -1.0}}; }
  static LocalUnitary pauli_x() { return {{0.0, 1.0, 1.0, 0.0}}; }
  static LocalUnitary hadamard() {
    return {{kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2}};
  }

  /// The four dense-coding operations, indexed by the 2-bit symbol:
  /// 0 -> I, 1 -> sigma_z, 2 -> sigma_x, 3 -> the real bit flip
  /// |1><0| - |0><1| (sigma_x composed with sigma_z, a -i sigma_y rotation).
  static LocalUnitary dense_coding_op(int symbol) {
    switch (symbol) {
      case 0: return identity();
      case 1: return pauli_z();
      case 2: return pauli_x();
      case 3: return {{0.0, -1.0, 1.0, 0.0}};
      default:
        throw std::out_of_range("dense_coding_op: symbol must be in 0..3");
    }
  }
};

/// The four maximally entangled two-qubit states.
enum class BellKind { PsiMinus = 0, PsiPlus = 1, PhiMinus = 2, PhiPlus = 3 };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PsiMinus, BellKind::PsiPlus, BellKind::PhiMinus,
    BellKind::PhiPlus};

inline std::string to_string(BellKind k) {
  switch (k) {
    case BellKind::PsiMinus: return "psi-";
    case BellKind::PsiPlus: return "psi+";
    case BellKind::PhiMinus: return "phi-";
    case BellKind::PhiPlus: return "phi+";
  }
  return "?";
}

/// Amplitudes of the named Bell state over basis (|00>, |01>, |10>, |11>).
inline std::array<Amplitude, 4> bell_amplitudes(BellKind kind) {
  switch (kind) {
    case BellKind::PsiMinus: return {0.0, kInvSqrt2, -kInvSqrt2, 0.0};
    case BellKind::PsiPlus: return {0.0, kInvSqrt2, kInvSqrt2, 0.0};
    case BellKind::PhiMinus: return {kInvSqrt2, 0.0, 0.0, -kInvSqrt2};
    case BellKind::PhiPlus: return {kInvSqrt2, 0.0, 0.0, kInvSqrt2};
  }
  throw std::invalid_argument("bell_amplitudes: bad kind");
}

inline StateVector make_bell(BellKind kind) {
  const auto a = bell_amplitudes(kind);
  return StateVector(2, std::vector<Amplitude>(a.begin(), a.end()));
}

/// (|0000> + |1111>) / sqrt(2).
inline StateVector make_ghz4() {
  std::vector<Amplitude> amps(16, Amplitude{});
  amps[0] = kInvSqrt2;
  amps[15] = kInvSqrt2;
  return StateVector(4, std::move(amps));
}

/// Kronecker product; qubits of `a` become the leading (most significant)
/// qubits of the result.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<Amplitude> out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) {
      out[i * b.dim() + j] = a[i] * b[j];
    }
  }
  return StateVector(a.num_qubits() + b.num_qubits(), std::move(out));
}

/// (I x ... x u x ... x I) |state> with `u` acting on `qubit`.
inline StateVector apply_local(const StateVector& state, int qubit,
                               const LocalUnitary& u) {
  const std::size_t mask = state.qubit_mask(qubit);
  StateVector out = state;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & mask) continue;
    const Amplitude a0 = state[i];
    const Amplitude a1 = state[i | mask];
    out[i] = u.entries[0] * a0 + u.entries[1] * a1;
    out[i | mask] = u.entries[2] * a0 + u.entries[3] * a1;
  }
  return out;
}

/// 4x4 complex matrix on an ordered qubit pair, row-major over the joint
/// basis |q_hi q_lo> = |00>, |01>, |10>, |11>.
using TwoQubitUnitary = std::array<Amplitude, 16>;

inline bool is_unitary(const TwoQubitUnitary& u, double tol = kStateTol) {
  for (int c1 = 0; c1 < 4; ++c1) {
    for (int c2 = 0; c2 < 4; ++c2) {
      Amplitude dot{};
      for (int r = 0; r < 4; ++r) dot += std::conj(u[r * 4 + c1]) * u[r * 4 + c2];
      const Amplitude want = (c1 == c2) ? Amplitude{1.0} : Amplitude{};
      if (std::abs(dot - want) > tol) return false;
    }
  }
  return true;
}

/// Applies a two-qubit unitary to (q_hi, q_lo); q_hi selects the high bit
/// of the 4x4 row index.
inline StateVector apply_two_qubit(const StateVector& state, int q_hi,
                                   int q_lo, const TwoQubitUnitary& u) {
  if (q_hi == q_lo) {
    throw std::invalid_argument("apply_two_qubit: qubits must differ");
  }
  const std::size_t mh = state.qubit_mask(q_hi);
  const std::size_t ml = state.qubit_mask(q_lo);
  StateVector out = state;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & (mh | ml)) continue;
    const std::array<std::size_t, 4> idx = {i, i | ml, i | mh, i | mh | ml};
    std::array<Amplitude, 4> in{};
    for (int r = 0; r < 4; ++r) in[r] = state[idx[r]];
    for (int r = 0; r < 4; ++r) {
      Amplitude acc{};
      for (int c = 0; c < 4; ++c) acc += u[r * 4 + c] * in[c];
      out[idx[r]] = acc;
    }
  }
  return out;
}

inline Amplitude inner_product(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("inner_product: register sizes differ");
  }
  Amplitude dot{};
  for (std::size_t i = 0; i < a.dim(); ++i) dot += std::conj(a[i]) * b[i];
  return dot;
}

/// |<a|b>|^2.
inline double fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

/// State equality up to a global phase; both sides must be normalized.
inline bool equal_up_to_phase(const StateVector& a, const StateVector& b,
                              double tol = kStateTol) {
  return std::abs(std::abs(inner_product(a, b)) - 1.0) <= tol;
}

namespace detail {

inline void require_normalized(const StateVector& s, const char* who) {
  if (!s.is_normalized(1e-9)) {
    throw std::runtime_error(std::string(who) + ": state is not normalized");
  }
}

}  // namespace detail

/// Z-basis measurement of one qubit. Samples the outcome with Born
/// probability and returns (bit, renormalized collapsed state). Measuring
/// the same qubit again returns the same bit with probability 1.
inline std::pair<int, StateVector> measure_z(const StateVector& state,
                                             int qubit, Rng& rng) {
  detail::require_normalized(state, "measure_z");
  const std::size_t mask = state.qubit_mask(qubit);
  double p1 = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & mask) p1 += std::norm(state[i]);
  }
  const int outcome = rng.uniform01() < p1 ? 1 : 0;
  const double p = outcome ? p1 : 1.0 - p1;
  if (p <= 0.0) {
    throw std::runtime_error("measure_z: norm underflow in collapse");
  }
  const double scale = 1.0 / std::sqrt(p);
  StateVector out = state;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const bool one = (i & mask) != 0;
    out[i] = (one == (outcome == 1)) ? state[i] * scale : Amplitude{};
  }
  return {outcome, std::move(out)};
}

/// X-basis measurement: rotate with Hadamard, measure Z, rotate back.
/// Bit 0 maps to |+>, bit 1 to |->.
inline std::pair<int, StateVector> measure_x(const StateVector& state,
                                             int qubit, Rng& rng) {
  auto [bit, collapsed] =
      measure_z(apply_local(state, qubit, LocalUnitary::hadamard()), qubit, rng);
  return {bit, apply_local(collapsed, qubit, LocalUnitary::hadamard())};
}

/// Born probabilities of the four Bell outcomes on the ordered pair
/// (q1, q2). They sum to 1 for any normalized state.
inline std::array<double, 4> bell_outcome_probabilities(
    const StateVector& state, int q1, int q2) {
  if (q1 == q2) {
    throw std::invalid_argument("bell_outcome_probabilities: qubits must differ");
  }
  const std::size_t m1 = state.qubit_mask(q1);
  const std::size_t m2 = state.qubit_mask(q2);
  std::array<double, 4> probs{};
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & (m1 | m2)) continue;
    const std::array<Amplitude, 4> in = {state[i], state[i | m2],
                                         state[i | m1], state[i | m1 | m2]};
    for (BellKind kind : kAllBellKinds) {
      const auto basis = bell_amplitudes(kind);
      Amplitude overlap{};
      for (int t = 0; t < 4; ++t) overlap += std::conj(basis[t]) * in[t];
      probs[static_cast<int>(kind)] += std::norm(overlap);
    }
  }
  return probs;
}

/// Projective Bell-basis measurement of the pair (q1, q2); returns the
/// sampled kind and the collapsed state, pair left in that Bell state.
inline std::pair<BellKind, StateVector> measure_bell_pair(
    const StateVector& state, int q1, int q2, Rng& rng) {
  detail::require_normalized(state, "measure_bell_pair");
  const auto probs = bell_outcome_probabilities(state, q1, q2);

  const double u = rng.uniform01();
  int pick = 3;
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += probs[k];
    if (u < acc) {
      pick = k;
      break;
    }
  }
  while (probs[pick] <= 0.0) pick = (pick + 3) % 4;  // skip zero-probability tail
  const BellKind kind = static_cast<BellKind>(pick);

  const auto basis = bell_amplitudes(kind);
  const std::size_t m1 = state.qubit_mask(q1);
  const std::size_t m2 = state.qubit_mask(q2);
  const double scale = 1.0 / std::sqrt(probs[pick]);
  StateVector out = state;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & (m1 | m2)) continue;
    const std::array<std::size_t, 4> idx = {i, i | m2, i | m1, i | m1 | m2};
    Amplitude overlap{};
    for (int t = 0; t < 4; ++t) overlap += std::conj(basis[t]) * state[idx[t]];
    overlap *= scale;
    for (int t = 0; t < 4; ++t) out[idx[t]] = basis[t] * overlap;
  }
  return {kind, std::move(out)};
}

}  // namespace qsdc

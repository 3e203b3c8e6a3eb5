// attack.hpp
// The eavesdropper's per-qubit attack: an entangling unitary E acting on
// one travel qubit plus a fresh one-qubit ancilla,
//
//   E |0>|anc> = alpha |0>|x0> + beta |1>|x1>
//   E |1>|anc> = m     |0>|y0> + n    |1>|y1>
//
// with |alpha|^2 + |beta|^2 = |m|^2 + |n|^2 = 1 and the two image vectors
// orthogonal. The initial ancilla state |anc> is |0>.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "qsdc/state_vector.hpp"

namespace qsdc {

inline constexpr double kAttackTol = 1e-10;

/// Attack amplitudes plus the four post-attack ancilla states. The derived
/// intensities a = |alpha|^2, b = |beta|^2, s = |m|^2, t = |n|^2 are the
/// only quantities entering the closed-form detection rates.
struct AttackParams {
  Amplitude alpha{1.0};
  Amplitude beta{0.0};
  Amplitude m{0.0};
  Amplitude n{1.0};
  StateVector ancilla_x0{1, std::size_t{0}};
  StateVector ancilla_x1{1, std::size_t{0}};
  StateVector ancilla_y0{1, std::size_t{0}};
  StateVector ancilla_y1{1, std::size_t{0}};

  double a() const { return std::norm(alpha); }
  double b() const { return std::norm(beta); }
  double s() const { return std::norm(m); }
  double t() const { return std::norm(n); }

  /// E = identity on qubit and ancilla; never detected, never informative.
  static AttackParams identity() { return AttackParams{}; }

  /// Ancilla records |x0> = |x1> = |0>, |y0> = |y1> = |1>: the orthogonality
  /// constraint vanishes for every amplitude choice, so this family realizes
  /// any intensity pair (a, t). The orthogonal records copy the qubit's
  /// Z-basis value into the ancilla, which fully decoheres X-basis
  /// correlations regardless of the amplitudes.
  static AttackParams entangling(Amplitude alpha, Amplitude beta, Amplitude m,
                                 Amplitude n) {
    AttackParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.m = m;
    p.n = n;
    p.ancilla_y0 = StateVector(1, std::size_t{1});
    p.ancilla_y1 = StateVector(1, std::size_t{1});
    return p;
  }

  /// Entangling attack from the intensities a = |alpha|^2, t = |n|^2 with
  /// real nonnegative amplitudes.
  static AttackParams from_intensities(double a, double t) {
    if (a < 0.0 || a > 1.0 || t < 0.0 || t > 1.0) {
      throw std::domain_error("from_intensities: intensities must be in [0,1]");
    }
    return entangling(std::sqrt(a), std::sqrt(1.0 - a), std::sqrt(1.0 - t),
                      std::sqrt(t));
  }

  /// Plain rotation of the travel qubit, ancilla untouched: all four ancilla
  /// states stay |0> and (alpha, beta, m, n) = (c, s, -s, c). Disturbs Z- and
  /// X-basis checks equally, with detection probability beta_sq in either
  /// basis; beta_sq = 0 gives the exact identity.
  static AttackParams basis_symmetric(double beta_sq) {
    if (beta_sq < 0.0 || beta_sq > 1.0) {
      throw std::domain_error("basis_symmetric: beta_sq must be in [0,1]");
    }
    const double s = std::sqrt(beta_sq);
    const double c = std::sqrt(1.0 - beta_sq);
    AttackParams p;
    p.alpha = c;
    p.beta = s;
    p.m = -s;
    p.n = c;
    return p;
  }
};

namespace detail {

/// Image of |q>|0> under E as a 4-vector over |q e>, q the high bit.
inline std::array<Amplitude, 4> attack_image(const AttackParams& p, int q) {
  std::array<Amplitude, 4> v{};
  if (q == 0) {
    for (int e = 0; e < 2; ++e) {
      v[e] = p.alpha * p.ancilla_x0[e];
      v[2 + e] = p.beta * p.ancilla_x1[e];
    }
  } else {
    for (int e = 0; e < 2; ++e) {
      v[e] = p.m * p.ancilla_y0[e];
      v[2 + e] = p.n * p.ancilla_y1[e];
    }
  }
  return v;
}

}  // namespace detail

/// True iff the parameters define a unitary joint map: normalized ancilla
/// states, |alpha|^2+|beta|^2 = |m|^2+|n|^2 = 1, and orthogonal images
/// conj(alpha) m <x0|y0> + conj(beta) n <x1|y1> = 0, all within 1e-10.
inline bool validate_attack(const AttackParams& p) {
  for (const StateVector* anc :
       {&p.ancilla_x0, &p.ancilla_x1, &p.ancilla_y0, &p.ancilla_y1}) {
    if (anc->num_qubits() != 1 || !anc->is_normalized(kAttackTol)) return false;
  }
  for (Amplitude c : {p.alpha, p.beta, p.m, p.n}) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  if (std::abs(p.a() + p.b() - 1.0) > kAttackTol) return false;
  if (std::abs(p.s() + p.t() - 1.0) > kAttackTol) return false;
  const auto v0 = detail::attack_image(p, 0);
  const auto v1 = detail::attack_image(p, 1);
  Amplitude cross{};
  for (int i = 0; i < 4; ++i) cross += std::conj(v0[i]) * v1[i];
  return std::abs(cross) <= kAttackTol;
}

/// The full 4x4 unitary on (qubit, ancilla). Only the |q 0> columns are
/// fixed by the attack map; the |q 1> columns are completed to an
/// orthonormal basis (the initial ancilla is always |0>, so the completion
/// never acts on protocol states).
inline TwoQubitUnitary attack_unitary(const AttackParams& p) {
  if (!validate_attack(p)) {
    throw std::invalid_argument("attack_unitary: parameters are not unitary");
  }
  std::array<std::array<Amplitude, 4>, 4> cols{};
  cols[0] = detail::attack_image(p, 0);  // image of |0 0>
  cols[2] = detail::attack_image(p, 1);  // image of |1 0>

  auto fill_free_column = [&cols](int target, std::array<int, 4> done) {
    for (int seed = 0; seed < 4; ++seed) {
      std::array<Amplitude, 4> v{};
      v[seed] = 1.0;
      for (int d : done) {
        if (d < 0) continue;
        Amplitude proj{};
        for (int i = 0; i < 4; ++i) proj += std::conj(cols[d][i]) * v[i];
        for (int i = 0; i < 4; ++i) v[i] -= proj * cols[d][i];
      }
      double nrm = 0.0;
      for (const auto& c : v) nrm += std::norm(c);
      if (nrm > 0.25) {
        const double inv = 1.0 / std::sqrt(nrm);
        for (auto& c : v) c *= inv;
        cols[target] = v;
        return;
      }
    }
    throw std::logic_error("attack_unitary: basis completion failed");
  };
  fill_free_column(1, {0, 2, -1, -1});
  fill_free_column(3, {0, 2, 1, -1});

  TwoQubitUnitary u{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) u[r * 4 + c] = cols[c][r];
  }
  return u;
}

/// Attacks one qubit: appends a fresh ancilla in |0> as the last qubit of
/// the register and applies E to (qubit, ancilla). Norm preserving;
/// existing qubit indices stay valid.
inline StateVector attack_qubit(const StateVector& state, int qubit,
                                const AttackParams& p) {
  if (qubit < 0 || qubit >= state.num_qubits()) {
    throw std::out_of_range("attack_qubit: qubit index out of range");
  }
  const StateVector joint = tensor(state, StateVector(1, std::size_t{0}));
  return apply_two_qubit(joint, qubit, state.num_qubits(), attack_unitary(p));
}

/// Attacks particles 2, 3, 4 of a 4-particle GHZ register (indices 1..3)
/// with three fresh ancillas, leaving particle 1 untouched. The output has
/// 7 qubits ordered (p1, p2, p3, p4, anc2, anc3, anc4).
inline StateVector attack_ghz_travel(const StateVector& ghz,
                                     const AttackParams& p) {
  if (ghz.num_qubits() != 4) {
    throw std::invalid_argument("attack_ghz_travel: expected a 4-qubit register");
  }
  StateVector out = attack_qubit(ghz, 1, p);
  out = attack_qubit(out, 2, p);
  return attack_qubit(out, 3, p);
}

}  // namespace qsdc

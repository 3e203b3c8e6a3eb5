#include "qsdc/attack.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "qsdc/protocol.hpp"

namespace qsdc {
namespace {

constexpr double kTol = 1e-12;

// Independent oracle: direct symbolic expansion of (I x E x E x E) on the
// 4-particle GHZ state, written against the definition of E rather than
// against apply_two_qubit. Basis order |p1 b2 b3 b4 e2 e3 e4>.
std::vector<Amplitude> expand_ghz_attack(const AttackParams& p) {
  std::vector<Amplitude> amps(128, Amplitude{});
  for (int source = 0; source < 2; ++source) {
    for (int b2 = 0; b2 < 2; ++b2) {
      for (int b3 = 0; b3 < 2; ++b3) {
        for (int b4 = 0; b4 < 2; ++b4) {
          Amplitude coeff = kInvSqrt2;
          std::array<const StateVector*, 3> anc{};
          const int bits[3] = {b2, b3, b4};
          for (int j = 0; j < 3; ++j) {
            if (source == 0) {
              coeff *= bits[j] == 0 ? p.alpha : p.beta;
              anc[j] = bits[j] == 0 ? &p.ancilla_x0 : &p.ancilla_x1;
            } else {
              coeff *= bits[j] == 0 ? p.m : p.n;
              anc[j] = bits[j] == 0 ? &p.ancilla_y0 : &p.ancilla_y1;
            }
          }
          for (int e2 = 0; e2 < 2; ++e2) {
            for (int e3 = 0; e3 < 2; ++e3) {
              for (int e4 = 0; e4 < 2; ++e4) {
                const std::size_t index =
                    (static_cast<std::size_t>(source) << 6) |
                    (static_cast<std::size_t>(b2) << 5) |
                    (static_cast<std::size_t>(b3) << 4) |
                    (static_cast<std::size_t>(b4) << 3) |
                    (static_cast<std::size_t>(e2) << 2) |
                    (static_cast<std::size_t>(e3) << 1) |
                    static_cast<std::size_t>(e4);
                amps[index] += coeff * (*anc[0])[static_cast<std::size_t>(e2)] *
                               (*anc[1])[static_cast<std::size_t>(e3)] *
                               (*anc[2])[static_cast<std::size_t>(e4)];
              }
            }
          }
        }
      }
    }
  }
  return amps;
}

AttackParams random_entangling(Rng& rng) {
  const double a = rng.uniform01();
  const double t = rng.uniform01();
  const double pa = 2.0 * 3.141592653589793 * rng.uniform01();
  const double pb = 2.0 * 3.141592653589793 * rng.uniform01();
  const double pm = 2.0 * 3.141592653589793 * rng.uniform01();
  const double pn = 2.0 * 3.141592653589793 * rng.uniform01();
  return AttackParams::entangling(
      std::polar(std::sqrt(a), pa), std::polar(std::sqrt(1.0 - a), pb),
      std::polar(std::sqrt(1.0 - t), pm), std::polar(std::sqrt(t), pn));
}

TEST(AttackTest, ValidateAcceptsIdentity) {
  EXPECT_TRUE(validate_attack(AttackParams::identity()));
}

TEST(AttackTest, ValidateRejectsCoincidentImages) {
  AttackParams p;  // x0 = y0 = |0>
  p.alpha = 1.0;
  p.beta = 0.0;
  p.m = 1.0;
  p.n = 0.0;
  EXPECT_FALSE(validate_attack(p));
}

TEST(AttackTest, ValidateAcceptsEntanglingFamily) {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    EXPECT_TRUE(validate_attack(random_entangling(rng)));
  }
}

TEST(AttackTest, ValidateAcceptsBasisSymmetricFamily) {
  for (double b : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0}) {
    EXPECT_TRUE(validate_attack(AttackParams::basis_symmetric(b)));
  }
}

TEST(AttackTest, ValidateRejectsUnnormalizedAmplitudes) {
  auto p = AttackParams::entangling(0.9, 0.9, 0.0, 1.0);
  EXPECT_FALSE(validate_attack(p));
}

TEST(AttackTest, AttackUnitaryIsUnitary) {
  Rng rng(32);
  for (int rep = 0; rep < 50; ++rep) {
    EXPECT_TRUE(is_unitary(attack_unitary(random_entangling(rng)), 1e-12));
  }
  EXPECT_TRUE(is_unitary(attack_unitary(AttackParams::basis_symmetric(0.3)), 1e-12));
}

TEST(AttackTest, AttackUnitaryRejectsInvalidParams) {
  AttackParams p;
  p.alpha = 1.0;
  p.m = 1.0;
  p.n = 0.0;
  EXPECT_THROW(attack_unitary(p), std::invalid_argument);
}

TEST(AttackTest, IdentityAttackActsTrivially) {
  Rng rng(33);
  std::vector<Amplitude> amps(4);
  double norm = 0.0;
  for (auto& a : amps) {
    a = {rng.uniform01() - 0.5, rng.uniform01() - 0.5};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  const StateVector state(2, amps);

  const auto attacked = attack_qubit(state, 1, AttackParams::identity());
  const auto expected = tensor(state, StateVector(1));
  ASSERT_EQ(attacked.dim(), expected.dim());
  for (std::size_t i = 0; i < attacked.dim(); ++i) {
    EXPECT_NEAR(std::abs(attacked[i] - expected[i]), 0.0, kTol);
  }
}

TEST(AttackTest, FlipProbabilitiesMatchIntensities) {
  const auto p = AttackParams::from_intensities(0.7, 0.4);
  // attacked |0>: the travel qubit reads 1 with probability b = 1 - a
  const auto on_zero = attack_qubit(StateVector(1, std::size_t{0}), 0, p);
  double flip0 = 0.0;
  for (std::size_t i = 0; i < on_zero.dim(); ++i) {
    if (on_zero.bit_at(i, 0)) flip0 += std::norm(on_zero[i]);
  }
  EXPECT_NEAR(flip0, p.b(), kTol);
  // attacked |1>: reads 0 with probability s = 1 - t
  const auto on_one = attack_qubit(StateVector(1, std::size_t{1}), 0, p);
  double flip1 = 0.0;
  for (std::size_t i = 0; i < on_one.dim(); ++i) {
    if (!on_one.bit_at(i, 0)) flip1 += std::norm(on_one[i]);
  }
  EXPECT_NEAR(flip1, p.s(), kTol);
}

TEST(AttackTest, FlipStatisticsMatchSampledFrequency) {
  const auto p = AttackParams::from_intensities(0.75, 0.6);
  Rng rng(34);
  const int trials = 100000;
  int ones = 0;
  const auto attacked = attack_qubit(StateVector(1, std::size_t{0}), 0, p);
  for (int i = 0; i < trials; ++i) {
    ones += measure_z(attacked, 0, rng).first;
  }
  const double expect = p.b();
  const double sigma = std::sqrt(expect * (1.0 - expect) / trials);
  EXPECT_NEAR(static_cast<double>(ones) / trials, expect, 3.0 * sigma);
}

TEST(AttackTest, AttackPreservesNorm) {
  Rng rng(35);
  for (int rep = 0; rep < 30; ++rep) {
    const auto p = random_entangling(rng);
    auto state = make_ghz4();
    EXPECT_NEAR(attack_ghz_travel(state, p).norm_sq(), 1.0, kTol);
  }
}

TEST(AttackTest, GhzTravelMatchesSymbolicExpansion) {
  Rng rng(36);
  std::vector<AttackParams> cases;
  cases.push_back(AttackParams::identity());
  cases.push_back(AttackParams::basis_symmetric(0.3));
  cases.push_back(AttackParams::from_intensities(0.5, 0.5));
  for (int rep = 0; rep < 20; ++rep) cases.push_back(random_entangling(rng));
  // non-default ancilla records: |x0> = |x1> = |+>, |y0> = |y1> = |->
  {
    AttackParams p = AttackParams::entangling(std::sqrt(0.6), std::sqrt(0.4),
                                              std::sqrt(0.7), std::sqrt(0.3));
    const StateVector plus(1, std::vector<Amplitude>{kInvSqrt2, kInvSqrt2});
    const StateVector minus(1, std::vector<Amplitude>{kInvSqrt2, -kInvSqrt2});
    p.ancilla_x0 = plus;
    p.ancilla_x1 = plus;
    p.ancilla_y0 = minus;
    p.ancilla_y1 = minus;
    ASSERT_TRUE(validate_attack(p));
    cases.push_back(p);
  }

  for (const auto& p : cases) {
    const auto attacked = attack_ghz_travel(make_ghz4(), p);
    ASSERT_EQ(attacked.num_qubits(), 7);
    const auto expected = expand_ghz_attack(p);
    for (std::size_t i = 0; i < 128; ++i) {
      ASSERT_NEAR(std::abs(attacked[i] - expected[i]), 0.0, kTol)
          << "amplitude " << i;
    }
  }
}

TEST(AttackTest, GhzTravelRejectsWrongRegisterSize) {
  EXPECT_THROW(attack_ghz_travel(make_bell(BellKind::PhiPlus),
                                 AttackParams::identity()),
               std::invalid_argument);
}

TEST(AttackTest, SurvivalRateMatchesClosedForm) {
  // empirical no-detection rate equals (a^3 + t^3)/2 within 3 sigma
  for (auto [a, t] : std::vector<std::pair<double, double>>{
           {0.5, 0.5}, {0.8, 0.3}, {1.0, 0.25}}) {
    const long trials = 40000;
    const auto est = estimate_detection_rate(
        Protocol::Fpp, AttackParams::from_intensities(a, t), trials, 77);
    const double survive = 1.0 - est.rate;
    const double expect = 0.5 * (a * a * a + t * t * t);
    const double sigma = std::sqrt(expect * (1.0 - expect) / trials);
    EXPECT_NEAR(survive, expect, 3.0 * sigma) << "a=" << a << " t=" << t;
  }
}

TEST(AttackTest, FullBitFlipAlwaysDetectedOnZeroBranch) {
  // alpha = 0 flips every |0>; conditional on source bit 0 the three decoy
  // particles all read 1
  const auto p = AttackParams::from_intensities(0.0, 0.7);
  Rng rng(37);
  int zero_branches = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto [source, state] = measure_z(make_ghz4(), 0, rng);
    for (int q = 1; q <= 3; ++q) state = attack_qubit(state, q, p);
    if (source != 0) continue;
    ++zero_branches;
    for (int q = 1; q <= 3; ++q) {
      auto [bit, collapsed] = measure_z(state, q, rng);
      state = std::move(collapsed);
      EXPECT_EQ(bit, 1);
    }
  }
  EXPECT_GT(zero_branches, 10);
}

TEST(AttackTest, IntensityAccessors) {
  const auto p = AttackParams::from_intensities(0.64, 0.36);
  EXPECT_NEAR(p.a(), 0.64, kTol);
  EXPECT_NEAR(p.b(), 0.36, kTol);
  EXPECT_NEAR(p.t(), 0.36, kTol);
  EXPECT_NEAR(p.s(), 0.64, kTol);
  EXPECT_NEAR(p.a() + p.b(), 1.0, kTol);
  EXPECT_NEAR(p.s() + p.t(), 1.0, kTol);
}

}  // namespace
}  // namespace qsdc

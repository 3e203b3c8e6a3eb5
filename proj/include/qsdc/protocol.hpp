// protocol.hpp
// Executable state machines for the two direct-communication protocols.
//
// DPP: Alice prepares psi- pairs, sends the first-particle block, both
// sides verify anticorrelation on a random photon subset in random Z/X
// bases, then Alice dense-codes the second-particle block (with hidden
// sampling pairs) and Bob recovers symbols by Bell measurement.
//
// FPP: Bob prepares phi+ pairs and GHZ decoy groups, measures decoy
// particle 1 up front, hides particles 2..4 of each group in the travel
// block; Alice checks every decoy triple against Bob's announced bit,
// dense-codes the travel block, hides her own decoy groups, and Bob checks
// and Bell-measures.
//
// Each EPR pair and each decoy group lives in its own register; an
// eavesdropper grows a register by one ancilla qubit per attacked particle.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qsdc/analysis.hpp"
#include "qsdc/attack.hpp"
#include "qsdc/rng.hpp"
#include "qsdc/state_vector.hpp"

namespace qsdc {

using BitString = std::vector<std::uint8_t>;

struct ProtocolConfig {
  int n_pairs = 1;            // message-carrying EPR pairs (N)
  double control_prob = 0.1;  // fraction c of channel uses spent on checks
  std::optional<AttackParams> attack;
  bool eve_on_first_transmission = true;
  bool eve_on_second_transmission = false;
  std::uint64_t seed = 0;
  BitString message_bits;   // even length, at most 2 * n_pairs
  int abort_threshold = 0;  // detections tolerated before aborting

  void validate() const {
    if (n_pairs < 1) throw std::invalid_argument("ProtocolConfig: n_pairs < 1");
    if (!(control_prob >= 0.0 && control_prob < 1.0)) {
      throw std::invalid_argument("ProtocolConfig: control_prob outside [0,1)");
    }
    if (message_bits.size() % 2 != 0) {
      throw std::invalid_argument("ProtocolConfig: message length must be even");
    }
    if (message_bits.size() > 2 * static_cast<std::size_t>(n_pairs)) {
      throw std::invalid_argument("ProtocolConfig: message exceeds capacity");
    }
    for (auto b : message_bits) {
      if (b > 1) throw std::invalid_argument("ProtocolConfig: bits must be 0/1");
    }
    if (abort_threshold < 0) {
      throw std::invalid_argument("ProtocolConfig: abort_threshold < 0");
    }
    if (attack && !validate_attack(*attack)) {
      throw std::invalid_argument("ProtocolConfig: invalid attack parameters");
    }
  }
};

struct RunReport {
  long decoys_checked = 0;
  long detections = 0;
  double empirical_detection_rate = 0.0;
  double analytic_detection_rate = 0.0;
  bool aborted = false;
  BitString recovered_bits;
  long bit_error_count = 0;
  // per-stage breakdown of the totals above
  long first_check_count = 0;
  long first_check_detections = 0;
  long second_check_count = 0;
  long second_check_detections = 0;
};

/// Number of check units accompanying n message pairs at control
/// probability c: round(c n / (1-c)), at least 1 whenever c > 0. Checks
/// are then a fraction c of all channel uses.
inline int control_check_count(double control_prob, int n_pairs) {
  if (control_prob <= 0.0) return 0;
  const double raw = control_prob * n_pairs / (1.0 - control_prob);
  return std::max(1, static_cast<int>(std::llround(raw)));
}

/// Handle to one qubit of one register. This is all an eavesdropper ever
/// sees of a transmission: no decoy/message tag, no insertion bookkeeping.
struct QubitRef {
  int reg = -1;
  int qubit = 0;
};

enum class SeqTag : std::uint8_t { Message, Decoy };

/// One slot of a sender-private transmission sequence.
struct SequenceEntry {
  QubitRef q;
  SeqTag tag = SeqTag::Message;
};

/// Owns the quantum registers of one protocol run.
class RegisterPool {
 public:
  int add(StateVector state) {
    regs_.push_back(std::move(state));
    return static_cast<int>(regs_.size()) - 1;
  }

  StateVector& at(int id) { return regs_.at(static_cast<std::size_t>(id)); }
  const StateVector& at(int id) const {
    return regs_.at(static_cast<std::size_t>(id));
  }

  void apply(QubitRef r, const LocalUnitary& u) {
    at(r.reg) = apply_local(at(r.reg), r.qubit, u);
  }

  void attack(QubitRef r, const AttackParams& p) {
    at(r.reg) = attack_qubit(at(r.reg), r.qubit, p);
  }

  int measure_z(QubitRef r, Rng& rng) {
    auto [bit, collapsed] = qsdc::measure_z(at(r.reg), r.qubit, rng);
    at(r.reg) = std::move(collapsed);
    return bit;
  }

  int measure_x(QubitRef r, Rng& rng) {
    auto [bit, collapsed] = qsdc::measure_x(at(r.reg), r.qubit, rng);
    at(r.reg) = std::move(collapsed);
    return bit;
  }

  BellKind measure_bell(int reg, int q1, int q2, Rng& rng) {
    auto [kind, collapsed] = measure_bell_pair(at(reg), q1, q2, rng);
    at(reg) = std::move(collapsed);
    return kind;
  }

 private:
  std::vector<StateVector> regs_;
};

/// Channel-side adversary. Receives exactly the wire view of a
/// transmission: qubit handles in channel order and nothing else.
class Eavesdropper {
 public:
  virtual ~Eavesdropper() = default;
  virtual void intercept(RegisterPool& pool,
                         std::span<const QubitRef> wire) = 0;
};

/// Applies one fixed entangling attack to every transmitted particle,
/// independently, with a fresh ancilla per particle.
class CollectiveAttack final : public Eavesdropper {
 public:
  explicit CollectiveAttack(AttackParams params) : params_(std::move(params)) {}

  void intercept(RegisterPool& pool, std::span<const QubitRef> wire) override {
    for (const QubitRef& q : wire) pool.attack(q, params_);
  }

 private:
  AttackParams params_;
};

/// Interleaves decoy qubits into the message block at seeded-random
/// positions; the relative order of each input is preserved.
inline std::vector<SequenceEntry> insert_at_random_positions(
    std::span<const QubitRef> message, std::span<const QubitRef> decoys,
    Rng& rng) {
  std::vector<SeqTag> slots;
  slots.reserve(message.size() + decoys.size());
  slots.insert(slots.end(), message.size(), SeqTag::Message);
  slots.insert(slots.end(), decoys.size(), SeqTag::Decoy);
  rng.shuffle(slots);

  std::vector<SequenceEntry> seq;
  seq.reserve(slots.size());
  std::size_t mi = 0;
  std::size_t di = 0;
  for (SeqTag tag : slots) {
    seq.push_back({tag == SeqTag::Message ? message[mi++] : decoys[di++], tag});
  }
  return seq;
}

/// Strips sender-private tags: what actually travels over the channel.
inline std::vector<QubitRef> wire_view(std::span<const SequenceEntry> seq) {
  std::vector<QubitRef> wire;
  wire.reserve(seq.size());
  for (const auto& e : seq) wire.push_back(e.q);
  return wire;
}

// Dense-coding tables: symbol k applied to the sender's particle turns the
// initial Bell state into the k-th entry.
inline constexpr std::array<BellKind, 4> kDppSymbolStates = {
    BellKind::PsiMinus, BellKind::PsiPlus, BellKind::PhiMinus,
    BellKind::PhiPlus};
inline constexpr std::array<BellKind, 4> kFppSymbolStates = {
    BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus,
    BellKind::PsiMinus};

inline int decode_symbol(const std::array<BellKind, 4>& table, BellKind kind) {
  for (int k = 0; k < 4; ++k) {
    if (table[k] == kind) return k;
  }
  throw std::logic_error("decode_symbol: kind not in table");
}

namespace detail {

// 2-bit symbol carried by pair `pair_index`; pairs beyond the message get
// the identity symbol 0.
inline int symbol_at(const BitString& message, int pair_index) {
  const std::size_t hi = 2 * static_cast<std::size_t>(pair_index);
  if (hi + 1 >= message.size()) return 0;
  return message[hi] * 2 + message[hi + 1];
}

inline void finalize(RunReport& rep, bool aborted) {
  rep.aborted = aborted;
  rep.decoys_checked = rep.first_check_count + rep.second_check_count;
  rep.detections = rep.first_check_detections + rep.second_check_detections;
  rep.empirical_detection_rate =
      static_cast<double>(rep.detections) /
      static_cast<double>(std::max<long>(rep.decoys_checked, 1));
  if (aborted) {
    rep.recovered_bits.clear();
    rep.bit_error_count = 0;
  }
}

inline long hamming_distance(const BitString& a, const BitString& b) {
  long errors = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) errors += a[i] != b[i];
  return errors + static_cast<long>(std::max(a.size(), b.size()) - n);
}

}  // namespace detail

/// Runs FPP with explicit (possibly null) adversaries on the two
/// transmissions. Aborts are reported, not thrown.
inline RunReport run_fpp(const ProtocolConfig& cfg, Eavesdropper* first_eve,
                         Eavesdropper* second_eve) {
  cfg.validate();
  Rng rng(cfg.seed);
  RegisterPool pool;
  RunReport rep;
  rep.analytic_detection_rate =
      cfg.attack ? analysis::detect_prob_fpp(cfg.attack->a(), cfg.attack->t())
                 : 0.0;

  const int n = cfg.n_pairs;
  const int group_count = control_check_count(cfg.control_prob, n);

  // Bob's pairs: qubit 0 travels (sequence A), qubit 1 stays home (B).
  std::vector<int> pair_reg(n);
  for (int i = 0; i < n; ++i) pair_reg[i] = pool.add(make_bell(BellKind::PhiPlus));

  struct DecoyGroup {
    int reg;
    int source_bit;  // the inserter's particle-1 measurement
  };
  auto make_decoy_groups = [&pool, &rng](int count) {
    std::vector<DecoyGroup> groups;
    groups.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
      auto [bit, collapsed] = measure_z(make_ghz4(), 0, rng);
      groups.push_back({pool.add(std::move(collapsed)), bit});
    }
    return groups;
  };
  auto decoy_refs = [](const std::vector<DecoyGroup>& groups) {
    std::vector<QubitRef> refs;
    refs.reserve(groups.size() * 3);
    for (const auto& g : groups) {
      for (int particle = 1; particle <= 3; ++particle) {
        refs.push_back({g.reg, particle});
      }
    }
    return refs;
  };
  // A decoy group fails the check if any of its three particles disagrees
  // with the inserter's particle-1 bit.
  auto check_decoys = [&pool, &rng](const std::vector<DecoyGroup>& groups) {
    long detections = 0;
    for (const auto& g : groups) {
      bool hit = false;
      for (int particle = 1; particle <= 3; ++particle) {
        hit |= pool.measure_z({g.reg, particle}, rng) != g.source_bit;
      }
      detections += hit;
    }
    return detections;
  };

  std::vector<QubitRef> travel(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) travel[i] = {pair_reg[i], 0};

  // S2/S3: hide Bob's decoys in the travel block and transmit.
  auto bob_groups = make_decoy_groups(group_count);
  const auto bob_decoy_refs = decoy_refs(bob_groups);
  const auto seq_d = insert_at_random_positions(travel, bob_decoy_refs, rng);
  if (first_eve) {
    const auto wire = wire_view(seq_d);
    first_eve->intercept(pool, wire);
  }

  // S4: first eavesdropping check.
  rep.first_check_count = group_count;
  rep.first_check_detections = check_decoys(bob_groups);
  if (rep.first_check_detections > cfg.abort_threshold) {
    detail::finalize(rep, true);
    return rep;
  }

  // S5: dense-code the travel qubits, hide Alice's decoys, send back.
  for (int i = 0; i < n; ++i) {
    const int symbol = detail::symbol_at(cfg.message_bits, i);
    if (symbol != 0) {
      pool.apply({pair_reg[i], 0}, LocalUnitary::dense_coding_op(symbol));
    }
  }
  auto alice_groups = make_decoy_groups(group_count);
  const auto alice_decoy_refs = decoy_refs(alice_groups);
  const auto seq_d2 = insert_at_random_positions(travel, alice_decoy_refs, rng);
  if (second_eve) {
    const auto wire = wire_view(seq_d2);
    second_eve->intercept(pool, wire);
  }

  // S6: second check, then Bell measurement recovers 2 bits per pair.
  rep.second_check_count = group_count;
  rep.second_check_detections = check_decoys(alice_groups);
  if (rep.second_check_detections > cfg.abort_threshold) {
    detail::finalize(rep, true);
    return rep;
  }

  BitString bits;
  bits.reserve(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const BellKind kind = pool.measure_bell(pair_reg[i], 0, 1, rng);
    const int symbol = decode_symbol(kFppSymbolStates, kind);
    bits.push_back(static_cast<std::uint8_t>((symbol >> 1) & 1));
    bits.push_back(static_cast<std::uint8_t>(symbol & 1));
  }
  bits.resize(cfg.message_bits.size());
  rep.recovered_bits = std::move(bits);
  rep.bit_error_count =
      detail::hamming_distance(rep.recovered_bits, cfg.message_bits);
  detail::finalize(rep, false);
  return rep;
}

/// Runs DPP with explicit (possibly null) adversaries.
inline RunReport run_dpp(const ProtocolConfig& cfg, Eavesdropper* first_eve,
                         Eavesdropper* second_eve) {
  cfg.validate();
  Rng rng(cfg.seed);
  RegisterPool pool;
  RunReport rep;
  rep.analytic_detection_rate =
      cfg.attack ? analysis::detect_prob_dpp(cfg.attack->b()) : 0.0;

  const int n = cfg.n_pairs;
  const int check_count = control_check_count(cfg.control_prob, n);
  const int sampling_count = control_check_count(cfg.control_prob, n);
  const int total = n + check_count + sampling_count;

  // qubit 0 = first particle (sequence S1, transmitted first),
  // qubit 1 = second particle (S2, Alice keeps it until S3).
  std::vector<int> pair_reg(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    pair_reg[static_cast<std::size_t>(i)] = pool.add(make_bell(BellKind::PsiMinus));
  }

  // S2: transmit the S1 block.
  if (first_eve) {
    std::vector<QubitRef> wire(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) wire[static_cast<std::size_t>(i)] = {pair_reg[i], 0};
    first_eve->intercept(pool, wire);
  }

  // First check: Bob samples photons and a Z/X basis per photon; a psi-
  // pair must anticorrelate in either basis, equal bits mean detection.
  const auto check_positions =
      rng.choose(static_cast<std::size_t>(total), static_cast<std::size_t>(check_count));
  std::vector<char> consumed(static_cast<std::size_t>(total), 0);
  long first_detections = 0;
  for (std::size_t pos : check_positions) {
    consumed[pos] = 1;
    const int reg = pair_reg[pos];
    const bool x_basis = rng.bit() != 0;
    const int bob_bit = x_basis ? pool.measure_x({reg, 0}, rng)
                                : pool.measure_z({reg, 0}, rng);
    const int alice_bit = x_basis ? pool.measure_x({reg, 1}, rng)
                                  : pool.measure_z({reg, 1}, rng);
    first_detections += bob_bit == alice_bit;
  }
  rep.first_check_count = check_count;
  rep.first_check_detections = first_detections;
  if (first_detections > cfg.abort_threshold) {
    detail::finalize(rep, true);
    return rep;
  }

  // S3: Alice hides sampling pairs among the survivors and dense-codes the
  // message onto the rest, then transmits the S2 block.
  std::vector<int> remaining;
  remaining.reserve(static_cast<std::size_t>(total - check_count));
  for (int i = 0; i < total; ++i) {
    if (!consumed[static_cast<std::size_t>(i)]) remaining.push_back(i);
  }
  const auto sampling_slots =
      rng.choose(remaining.size(), static_cast<std::size_t>(sampling_count));
  std::vector<int> sampling_symbol(static_cast<std::size_t>(total), -1);
  for (std::size_t slot : sampling_slots) {
    const int pos = remaining[slot];
    const int symbol = static_cast<int>(rng.below(4));
    sampling_symbol[static_cast<std::size_t>(pos)] = symbol;
    if (symbol != 0) {
      pool.apply({pair_reg[pos], 1}, LocalUnitary::dense_coding_op(symbol));
    }
  }
  int message_index = 0;
  for (int pos : remaining) {
    if (sampling_symbol[static_cast<std::size_t>(pos)] >= 0) continue;
    const int symbol = detail::symbol_at(cfg.message_bits, message_index++);
    if (symbol != 0) {
      pool.apply({pair_reg[pos], 1}, LocalUnitary::dense_coding_op(symbol));
    }
  }
  if (second_eve) {
    std::vector<QubitRef> wire;
    wire.reserve(remaining.size());
    for (int pos : remaining) wire.push_back({pair_reg[pos], 1});
    second_eve->intercept(pool, wire);
  }

  // S4: Bell measurement; sampling pairs estimate the error rate, message
  // pairs decode to 2 bits each.
  long second_detections = 0;
  BitString bits;
  bits.reserve(2 * static_cast<std::size_t>(n));
  for (int pos : remaining) {
    const BellKind kind = pool.measure_bell(pair_reg[pos], 0, 1, rng);
    const int expected = sampling_symbol[static_cast<std::size_t>(pos)];
    if (expected >= 0) {
      second_detections += kind != kDppSymbolStates[static_cast<std::size_t>(expected)];
    } else {
      const int symbol = decode_symbol(kDppSymbolStates, kind);
      bits.push_back(static_cast<std::uint8_t>((symbol >> 1) & 1));
      bits.push_back(static_cast<std::uint8_t>(symbol & 1));
    }
  }
  rep.second_check_count = sampling_count;
  rep.second_check_detections = second_detections;
  if (second_detections > cfg.abort_threshold) {
    detail::finalize(rep, true);
    return rep;
  }

  bits.resize(cfg.message_bits.size());
  rep.recovered_bits = std::move(bits);
  rep.bit_error_count =
      detail::hamming_distance(rep.recovered_bits, cfg.message_bits);
  detail::finalize(rep, false);
  return rep;
}

namespace detail {

inline RunReport run_with_config_eves(const ProtocolConfig& cfg, Protocol which) {
  std::optional<CollectiveAttack> first;
  std::optional<CollectiveAttack> second;
  if (cfg.attack) {
    if (cfg.eve_on_first_transmission) first.emplace(*cfg.attack);
    if (cfg.eve_on_second_transmission) second.emplace(*cfg.attack);
  }
  Eavesdropper* e1 = first ? &*first : nullptr;
  Eavesdropper* e2 = second ? &*second : nullptr;
  return which == Protocol::Fpp ? run_fpp(cfg, e1, e2) : run_dpp(cfg, e1, e2);
}

}  // namespace detail

inline RunReport run_fpp(const ProtocolConfig& cfg) {
  return detail::run_with_config_eves(cfg, Protocol::Fpp);
}

inline RunReport run_dpp(const ProtocolConfig& cfg) {
  return detail::run_with_config_eves(cfg, Protocol::Dpp);
}

inline RunReport run_protocol(Protocol which, const ProtocolConfig& cfg) {
  return which == Protocol::Fpp ? run_fpp(cfg) : run_dpp(cfg);
}

struct RateEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
  long detections = 0;
  long trials = 0;
};

/// Monte Carlo estimate of the per-check detection rate: `trials`
/// independent single-check experiments (one decoy group for FPP, one
/// checked pair with a random basis for DPP). Each trial runs on its own
/// derived stream, so the result is independent of evaluation order.
inline RateEstimate estimate_detection_rate(Protocol protocol,
                                            const AttackParams& attack,
                                            long trials, std::uint64_t seed) {
  if (trials < 1) {
    throw std::invalid_argument("estimate_detection_rate: trials < 1");
  }
  if (!validate_attack(attack)) {
    throw std::invalid_argument("estimate_detection_rate: invalid attack");
  }
  long detections = 0;
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    if (protocol == Protocol::Fpp) {
      auto [source_bit, state] = measure_z(make_ghz4(), 0, rng);
      for (int q = 1; q <= 3; ++q) state = attack_qubit(state, q, attack);
      bool hit = false;
      for (int q = 1; q <= 3; ++q) {
        auto [bit, collapsed] = measure_z(state, q, rng);
        state = std::move(collapsed);
        hit |= bit != source_bit;
      }
      detections += hit;
    } else {
      StateVector state = attack_qubit(make_bell(BellKind::PsiMinus), 0, attack);
      const bool x_basis = rng.bit() != 0;
      auto measure = [&](int qubit) {
        auto [bit, collapsed] = x_basis ? measure_x(state, qubit, rng)
                                        : measure_z(state, qubit, rng);
        state = std::move(collapsed);
        return bit;
      };
      const int travel_bit = measure(0);
      const int home_bit = measure(1);
      detections += travel_bit == home_bit;
    }
  }
  RateEstimate est;
  est.trials = trials;
  est.detections = detections;
  est.rate = static_cast<double>(detections) / static_cast<double>(trials);
  est.standard_error =
      std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(trials));
  return est;
}

struct BasisRates {
  RateEstimate z;
  RateEstimate x;
};

/// DPP detection rate resolved by measurement basis, `trials` checks per
/// basis. The closed form |beta|^2 presumes an attack that disturbs both
/// bases equally; an entangling attack with orthogonal ancilla records has
/// x.rate = 1/2 regardless of the amplitudes, so the two rates are reported
/// separately instead of assumed equal.
inline BasisRates estimate_dpp_detection_by_basis(const AttackParams& attack,
                                                  long trials,
                                                  std::uint64_t seed) {
  if (trials < 1) {
    throw std::invalid_argument("estimate_dpp_detection_by_basis: trials < 1");
  }
  if (!validate_attack(attack)) {
    throw std::invalid_argument("estimate_dpp_detection_by_basis: invalid attack");
  }
  BasisRates rates;
  for (int basis = 0; basis < 2; ++basis) {
    long detections = 0;
    for (long trial = 0; trial < trials; ++trial) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(2 * trial + basis)));
      StateVector state = attack_qubit(make_bell(BellKind::PsiMinus), 0, attack);
      auto measure = [&](int qubit) {
        auto [bit, collapsed] = basis ? measure_x(state, qubit, rng)
                                      : measure_z(state, qubit, rng);
        state = std::move(collapsed);
        return bit;
      };
      const int travel_bit = measure(0);
      const int home_bit = measure(1);
      detections += travel_bit == home_bit;
    }
    RateEstimate est;
    est.trials = trials;
    est.detections = detections;
    est.rate = static_cast<double>(detections) / static_cast<double>(trials);
    est.standard_error =
        std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(trials));
    (basis ? rates.x : rates.z) = est;
  }
  return rates;
}

}  // namespace qsdc

// rng.hpp
// Deterministic random streams. The engine (std::mt19937_64) is fully
// specified by the standard; the uniform/shuffle helpers below are written
// against its raw 64-bit output so that seeded runs reproduce bit for bit
// across standard-library implementations.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qsdc {

/// Derives an independent stream seed from (base seed, stream index).
/// splitmix64 finalizer over seed XOR (index+1) * golden-ratio increment.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed ^ ((index + 1) * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Caller-owned random stream. Not thread-safe; give each thread its own
/// instance seeded via mix_seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Fair coin flip, 0 or 1.
  int bit() { return static_cast<int>(engine_() >> 63); }

  /// Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    if (n == 1) return 0;
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= min) return x % n;
    }
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

  /// k distinct indices drawn uniformly from [0, n), returned in ascending
  /// order (partial Fisher-Yates over the index range).
  std::vector<std::size_t> choose(std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("Rng::choose: k exceeds n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(idx[i], idx[i + static_cast<std::size_t>(below(n - i))]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qsdc

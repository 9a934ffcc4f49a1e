#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pll {

/// Deterministic RNG wrapper. The engine is std::mt19937_64; all variate
/// transforms (uniform, normal, bernoulli) are implemented here so a given
/// seed produces the same stream on every run of the same build. Independent
/// streams are derived from (master seed, purpose tag, index) via
/// `derive_seed`; the derivation is SplitMix64 over the master seed combined
/// with an FNV-1a hash of the tag and the stream index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                   std::uint64_t index = 0);

  static Rng stream(std::uint64_t master, std::string_view tag,
                    std::uint64_t index = 0) {
    return Rng(derive_seed(master, tag, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0,1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two engine draws.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), n >= 1. Rejection-free modulo is avoided by
  /// drawing 53-bit doubles; fine at the ranges used here (n << 2^53).
  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(uniform() * static_cast<double>(n));
  }

  /// Fisher-Yates permutation of {0,...,n-1}.
  std::vector<int> permutation(int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(below(i + 1));
      std::swap(idx[i], idx[j]);
    }
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pll

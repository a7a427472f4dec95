#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace hoi {

/// FNV-1a over bytes. Used to derive stable stream ids from strings so that
/// seeding never depends on std::hash, which varies across implementations.
std::uint64_t fnv1a64(std::string_view s);

/// Splitmix64-style combine of a base seed and a stream id.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Deterministic random source. mt19937_64 is fully specified by the
/// standard; the transforms below are hand-rolled because the
/// std::*_distribution adapters are implementation-defined and would break
/// cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0,1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0,n). Rejection sampling, so no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal via Box-Muller; the paired variate is cached.
  double normal();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices from [0,n) via partial Fisher-Yates.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hoi

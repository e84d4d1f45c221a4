#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace solon {

/// SplitMix64: tiny, portable, and fully deterministic across platforms.
/// All randomness in the library flows through keyed substreams of this
/// generator so that results are reproducible bit-for-bit regardless of
/// thread count or standard-library implementation.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform01_open_low() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

namespace detail {
inline std::uint64_t avalanche(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t mix_key(std::uint64_t h, std::uint64_t v) {
  return detail::avalanche(h * 0x9E3779B97F4A7C15ull + v + 0x632BE59BD9B4E019ull);
}

/// Stream tags keep the independent randomness sources (probes, batches,
/// adversary selection, attack noise, dataset synthesis) from colliding.
namespace stream {
inline constexpr std::uint64_t kProbe = 0x70726F6265ull;
inline constexpr std::uint64_t kBatch = 0x6261746368ull;
inline constexpr std::uint64_t kAdversaries = 0x616476ull;
inline constexpr std::uint64_t kAttackNoise = 0x6E6F697365ull;
inline constexpr std::uint64_t kDataset = 0x64617461ull;
}  // namespace stream

/// Derive an independent generator for (master, tag, a, b).
inline SplitMix64 substream(std::uint64_t master, std::uint64_t tag,
                            std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t k = mix_key(master, tag);
  k = mix_key(k, a);
  k = mix_key(k, b);
  return SplitMix64{k};
}

/// Box-Muller standard normal sampler over a SplitMix64 stream.
struct NormalSampler {
  SplitMix64 gen;
  bool has_cached = false;
  double cached = 0.0;

  explicit NormalSampler(SplitMix64 g) : gen(g) {}

  double next() {
    if (has_cached) {
      has_cached = false;
      return cached;
    }
    const double u1 = gen.uniform01_open_low();
    const double u2 = gen.uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached = radius * std::sin(angle);
    has_cached = true;
    return radius * std::cos(angle);
  }
};

/// k distinct values from {0, ..., n-1}, sorted; partial Fisher-Yates.
inline std::vector<int> sample_distinct(SplitMix64& gen, int n, int k) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(gen.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace solon

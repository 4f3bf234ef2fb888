#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ccsim {

/// SplitMix64 output function.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Labeled stream kinds. Every random draw in the project comes from a stream
/// derived as derive(seed, kind, a, b, c); this keeps placements, demands and
/// pull-downs independent of each other and of iteration order.
///
/// Stream layout:
///   OldPlacement  (user, file)          subset draw per cache slot
///   NewPlacement  (user, file, group)   one packet pick per group
///   Demand        ()                    demand vector generation
///   PullDown      (file, packet)        g-subset draw in the pull-down phase
///   Trial         (index)               per-trial master seeds
///   Group         (index)               per-group sub-experiments
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t kind, std::uint64_t a = 0,
                            std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ kind);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

namespace stream {
inline constexpr std::uint64_t old_placement = 1;
inline constexpr std::uint64_t new_placement = 2;
inline constexpr std::uint64_t demand = 3;
inline constexpr std::uint64_t pull_down = 4;
inline constexpr std::uint64_t trial = 5;
inline constexpr std::uint64_t group = 6;
}  // namespace stream

/// Tiny deterministic generator over a SplitMix64 sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased uniform draw from [0, n). Lemire multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline Rng make_stream(std::uint64_t seed, std::uint64_t kind, std::uint64_t a = 0,
                       std::uint64_t b = 0, std::uint64_t c = 0) {
  return Rng(derive(seed, kind, a, b, c));
}

/// k distinct values from [0, n), ascending. Partial Fisher-Yates.
inline std::vector<int> sample_without_replacement(Rng& rng, int k, int n) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace ccsim

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ccsim {

/// C(n, k) with overflow guard; throws std::overflow_error past long long.
inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step
    long long numer = n - k + i;
    if (result > std::numeric_limits<long long>::max() / numer)
      throw std::overflow_error("binomial coefficient overflow");
    result = result * numer / i;
  }
  return result;
}

/// Colexicographic rank of a strictly increasing k-subset of [0, n):
/// rank(S) = sum_i C(S[i], i+1). Stable cheap bijection used to index the
/// packets of the deterministic placement scheme.
inline long long colex_rank(const std::vector<int>& subset) {
  long long r = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) r += binomial(subset[i], static_cast<int>(i) + 1);
  return r;
}

/// Inverse of colex_rank for k-subsets of [0, n).
inline std::vector<int> colex_unrank(long long rank, int k, int n) {
  std::vector<int> subset(k);
  for (int i = k; i >= 1; --i) {
    int v = i - 1;
    while (v + 1 < n && binomial(v + 1, i) <= rank) ++v;
    subset[i - 1] = v;
    rank -= binomial(v, i);
  }
  return subset;
}

/// Advance a strictly increasing k-subset of [0, n) in colex order.
/// Returns false after the last subset.
inline bool next_subset_colex(std::vector<int>& subset, int n) {
  int k = static_cast<int>(subset.size());
  for (int i = 0; i < k; ++i) {
    int limit = (i + 1 < k) ? subset[i + 1] : n;
    if (subset[i] + 1 < limit) {
      ++subset[i];
      for (int j = 0; j < i; ++j) subset[j] = j;
      return true;
    }
  }
  return false;
}

inline std::vector<int> first_subset(int k) {
  std::vector<int> s(k);
  for (int i = 0; i < k; ++i) s[i] = i;
  return s;
}

}  // namespace ccsim

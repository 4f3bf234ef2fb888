#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ccsim {

/// Monte Carlo summary in file-transmission units.
struct RateStats {
  long long trials{0};
  double mean{0};
  double stddev{0};  // sample standard deviation
  double min{0};
  double max{0};
  double p50{0};
  double p95{0};
  double p99{0};
  double tail_eps{0};
  double tail_prob{0};  // fraction of trials with |R - mean| >= eps*mean

  double stderr_mean() const { return trials > 0 ? stddev / std::sqrt(static_cast<double>(trials)) : 0.0; }
};

/// Nearest-rank quantile on a sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  auto n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

inline double tail_probability(const std::vector<double>& values, double center, double eps) {
  if (values.empty()) return 0.0;
  long long hits = 0;
  for (double v : values)
    if (std::abs(v - center) >= eps * std::abs(center)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

inline RateStats summarize(const std::vector<double>& values, double tail_eps = 0.1) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  RateStats s;
  s.trials = static_cast<long long>(values.size());
  s.tail_eps = tail_eps;

  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());

  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.p50 = quantile_sorted(sorted, 0.50);
  s.p95 = quantile_sorted(sorted, 0.95);
  s.p99 = quantile_sorted(sorted, 0.99);
  s.tail_prob = tail_probability(values, s.mean, tail_eps);
  return s;
}

}  // namespace ccsim

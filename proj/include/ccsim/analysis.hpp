#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccsim/combinatorics.hpp"
#include "ccsim/system.hpp"

namespace ccsim {

/// Baseline with only local cache hits: K*(1 - M/N).
inline double uncoded_rate(int K, int N, double M) {
  if (K < 1 || N < 1 || M < 0 || M > N) throw std::domain_error("uncoded_rate: bad parameters");
  return K * (1.0 - M / N);
}

/// Limiting peak rate of random placement with clique-cover delivery:
///   K*(1 - M/N) / (K*M/N) * (1 - (1 - M/N)^K).
inline double peak_rate_asymptotic(int K, int N, double M) {
  if (K < 1 || N < 1 || M > N) throw std::domain_error("peak_rate_asymptotic: bad parameters");
  if (M <= 0)
    throw std::domain_error("peak_rate_asymptotic undefined at M = 0; use uncoded_rate");
  double p = M / N;
  return K * (1.0 - p) / (K * p) * (1.0 - std::pow(1.0 - p, K));
}

/// Same limit with M/N replaced by 1/ceil(N/M), matching the grouped
/// placement's marginal.
inline double peak_rate_asymptotic_grouped(int K, int N, double M) {
  if (M <= 0)
    throw std::domain_error("peak_rate_asymptotic undefined at M = 0; use uncoded_rate");
  SystemParams params{K, N, M, 1, 0};
  double p = 1.0 / params.group_size();
  return K * (1.0 - p) / (K * p) * (1.0 - std::pow(1.0 - p, K));
}

/// Probability that a packet of one stage-S list exists under the flat
/// placement: mu'(s) = (M/N)^(s-1) * (1 - M/N)^(K-s+1), s = |S|.
inline double mu_old(int s, int K, int N, double M) {
  if (s < 1 || s > K) throw std::domain_error("mu_old: s must lie in [1, K]");
  if (M < 0 || M > N) throw std::domain_error("mu_old: bad cache size");
  double p = M / N;
  return std::pow(p, s - 1) * std::pow(1.0 - p, K - s + 1);
}

/// Grouped-placement analogue, per packet group:
/// mu(s) = ceil(N/M) * (1/ceil(N/M))^(s-1) * (1 - 1/ceil(N/M))^(K-s+1).
inline double mu_new(int s, int K, int N, double M) {
  if (s < 1 || s > K) throw std::domain_error("mu_new: s must lie in [1, K]");
  if (M <= 0) throw std::domain_error("mu_new: requires M >= 1");
  SystemParams params{K, N, M, 1, 0};
  double c = params.group_size();
  return c * std::pow(1.0 / c, s - 1) * std::pow(1.0 - 1.0 / c, K - s + 1);
}

namespace detail {

/// E[max of s iid Binomial(trials, p)] = sum_y (1 - CDF(y)^s), evaluated with
/// tail sums so the near-one CDF region keeps precision.
inline double expected_max_binomial(int s, int trials, double p) {
  if (p <= 0) return 0.0;
  if (p >= 1) return trials;
  if (s == 1) return trials * p;
  // log pmf by upward recurrence; survival Q(y) accumulated from the top.
  std::vector<double> pmf(trials + 1);
  double log_pmf = trials * std::log1p(-p);
  double log_odds = std::log(p) - std::log1p(-p);
  for (int y = 0; y <= trials; ++y) {
    pmf[y] = std::exp(log_pmf);
    if (y < trials)
      log_pmf += std::log(static_cast<double>(trials - y) / (y + 1)) + log_odds;
  }
  double expectation = 0.0;
  double survival = 0.0;  // Q(y) = P(X > y), built from y = trials-1 downward
  std::vector<double> q(trials);
  for (int y = trials - 1; y >= 0; --y) {
    survival += pmf[y + 1];
    q[y] = survival;
  }
  for (int y = 0; y < trials; ++y) {
    double tail = q[y];
    if (tail <= 0) continue;
    // 1 - (1 - Q)^s without cancellation
    expectation += -std::expm1(s * std::log1p(-std::min(tail, 1.0)));
  }
  return expectation;
}

}  // namespace detail

/// Expected normalized transmissions of the clique-cover delivery under the
/// grouped placement with distinct demands, exactly:
///   sum_s C(K,s) * E[max of s iid Bi(F', mu(s))] / (F' * ceil(N/M)).
/// The s = 1 stages contribute K*mu(1)/ceil(N/M) directly (a max over one
/// list is just its mean, and mu(1) may exceed 1 there).
inline double expected_rate_semianalytic(int K, int N, double M, int packet_groups) {
  if (K < 1 || K > 30)
    throw std::domain_error("expected_rate_semianalytic supports 1 <= K <= 30");
  if (packet_groups < 1) throw std::domain_error("need at least one packet group");
  if (M <= 0) throw std::domain_error("requires M >= 1");
  SystemParams params{K, N, M, 1, 0};
  const double c = params.group_size();

  double total = K * mu_new(1, K, N, M) / c;
  for (int s = 2; s <= K; ++s) {
    double mu = mu_new(s, K, N, M);
    double emax = detail::expected_max_binomial(s, packet_groups, mu);
    total += static_cast<double>(binomial(K, s)) * emax / (packet_groups * c);
  }
  return total;
}

/// Tail bound for the grouped placement:
///   Pr(|R - E| >= eps*E) <= 2*exp(-2*eps^2*E^2*F / (K*(N/M)^2)).
/// Values >= 1 are possible and carry no information; callers should check
/// the vacuous flag of BoundReport.
inline double concentration_bound_new(double eps, double expected_rate, long long F, int K, int N,
                                      double M) {
  if (M <= 0) throw std::domain_error("concentration_bound_new: requires M > 0");
  double ratio = static_cast<double>(N) / M;
  double exponent = -2.0 * eps * eps * expected_rate * expected_rate * static_cast<double>(F) /
                    (K * ratio * ratio);
  return 2.0 * std::exp(exponent);
}

/// Tail bound for the flat placement:
///   Pr(|R - E| >= eps*E) <= 2*exp(-2*eps^2*E^2*F / (K*(K+1)^2)).
inline double concentration_bound_old(double eps, double expected_rate, long long F, int K) {
  double exponent = -2.0 * eps * eps * expected_rate * expected_rate * static_cast<double>(F) /
                    (K * static_cast<double>(K + 1) * (K + 1));
  return 2.0 * std::exp(exponent);
}

enum class PlacementKind { Old, New };

struct RateFloorThreshold {
  double floor;        // K*(1 - M/N)/2
  double f_threshold;  // largest F for which the floor is guaranteed
};

/// Finite-length pessimism: below the returned packet count, the expected
/// rate stays at or above half the uncoded rate.
/// New placement: F <= (c/(2K))*(1 - 1/c)*exp(2t(1 - t/K)(1 - 1/K)) with
/// c = ceil(N/M), t = K/c; flat placement uses N/M in place of c and t = KM/N.
inline RateFloorThreshold rate_floor_and_threshold(PlacementKind kind, int K, int N, double M) {
  if (N <= K) throw std::domain_error("rate floor analysis requires N > K");
  if (M <= 0) throw std::domain_error("rate floor analysis requires M > 0");
  double floor = 0.5 * K * (1.0 - M / N);
  double c, t;
  if (kind == PlacementKind::New) {
    SystemParams params{K, N, M, 1, 0};
    c = params.group_size();
    t = K / c;
  } else {
    c = static_cast<double>(N) / M;
    t = K * M / N;
  }
  double log_factor = 2.0 * t * (1.0 - t / K) * (1.0 - 1.0 / K);
  double threshold = c / (2.0 * K) * (1.0 - 1.0 / c) * std::exp(log_factor);
  return {floor, threshold};
}

/// Minimum packets per file any clique-cover delivery needs, over symmetric
/// independent placements, before a mean rate of K(1-M/N)/((4/3)g) is even
/// possible: F >= (g/(2et)) * (N/M)^(g-2), t = KM/N. Requires g > 2.
inline double filesize_lowerbound_cliquecover(int g, int K, int N, double M) {
  if (g <= 2) throw std::domain_error("clique-cover lower bound needs g > 2");
  if (M <= 0) throw std::domain_error("clique-cover lower bound requires M > 0");
  double t = K * M / N;
  double ratio = static_cast<double>(N) / M;
  return g / (2.0 * std::exp(1.0) * t) * std::pow(ratio, g - 2);
}

/// Balls-into-bins maximum load: m = r*n*ln(n) balls into n bins stay below
/// r*ln(n)*(1 + 2*sqrt(2)/r) per bin with probability >= 1 - 1/n^2.
inline double balls_in_bins_max_bound(double m, long long n) {
  if (n < 1 || m < 0) throw std::domain_error("balls_in_bins_max_bound: bad parameters");
  if (n == 1) return m;
  double log_n = std::log(static_cast<double>(n));
  double r = m / (n * log_n);
  return r * log_n * (1.0 + 2.0 * std::sqrt(2.0) / r);
}

/// Whether (g+1)*K^2*ceil(N/M) < exp(4K/(9*ceil(N/M))) holds; the grouped
/// modified-delivery rate guarantee assumes it. Compared in log space.
inline bool modified_delivery_condition(int K, int N, double M, int g) {
  SystemParams params{K, N, M, 1, 0};
  double c = params.group_size();
  double lhs = std::log(static_cast<double>(g) + 1.0) + 2.0 * std::log(static_cast<double>(K)) +
               std::log(c);
  double rhs = 4.0 * K / (9.0 * c);
  return lhs < rhs;
}

/// Packet-group count the modified-delivery analysis works with:
/// c_const * C(K', g) * (log C(K', g))^2, rounded up.
inline double modified_delivery_packet_groups(int K_group, int g, double c_const) {
  double choose = static_cast<double>(binomial(K_group, g));
  double lg = std::log(choose);
  return std::ceil(c_const * choose * lg * lg);
}

/// Bundle of every closed form evaluated at one parameter point.
struct BoundReport {
  int K{0};
  int N{0};
  double M{0};
  long long F{0};
  std::optional<int> F_prime;
  std::optional<int> g;
  std::optional<double> eps;

  double uncoded{0};
  std::optional<double> peak_asymptotic;          // absent at M = 0
  std::optional<double> peak_asymptotic_grouped;  // absent at M = 0
  std::optional<double> expected_rate;            // semi-analytic when computable
  std::string expected_rate_source;
  std::optional<double> bound_new;
  std::optional<double> bound_old;
  bool bound_new_vacuous{false};
  bool bound_old_vacuous{false};
  std::optional<double> rate_floor;
  std::optional<double> f_threshold_new;
  std::optional<double> f_threshold_old;
  std::optional<double> filesize_lowerbound;
  std::optional<bool> modified_condition;
  std::optional<double> recommended_packet_groups;
};

inline BoundReport make_bound_report(int K, int N, double M, long long F,
                                     std::optional<int> F_prime, std::optional<int> g,
                                     std::optional<double> eps,
                                     std::optional<double> expected_rate_override,
                                     double sizing_c = 1.0) {
  BoundReport r;
  r.K = K;
  r.N = N;
  r.M = M;
  r.F = F;
  r.F_prime = F_prime;
  r.g = g;
  r.eps = eps;

  r.uncoded = uncoded_rate(K, N, M);
  if (M > 0) {
    r.peak_asymptotic = peak_rate_asymptotic(K, N, M);
    r.peak_asymptotic_grouped = peak_rate_asymptotic_grouped(K, N, M);
  }
  if (expected_rate_override) {
    r.expected_rate = *expected_rate_override;
    r.expected_rate_source = "supplied";
  } else if (F_prime && M > 0 && K <= 30) {
    r.expected_rate = expected_rate_semianalytic(K, N, M, *F_prime);
    r.expected_rate_source = "semi_analytic";
  } else if (M > 0) {
    r.expected_rate = peak_rate_asymptotic_grouped(K, N, M);
    r.expected_rate_source = "asymptotic";
  }
  if (eps && r.expected_rate && M > 0) {
    r.bound_new = concentration_bound_new(*eps, *r.expected_rate, F, K, N, M);
    r.bound_new_vacuous = *r.bound_new >= 1.0;
    r.bound_old = concentration_bound_old(*eps, *r.expected_rate, F, K);
    r.bound_old_vacuous = *r.bound_old >= 1.0;
  }
  if (N > K && M > 0) {
    auto ft_new = rate_floor_and_threshold(PlacementKind::New, K, N, M);
    auto ft_old = rate_floor_and_threshold(PlacementKind::Old, K, N, M);
    r.rate_floor = ft_new.floor;
    r.f_threshold_new = ft_new.f_threshold;
    r.f_threshold_old = ft_old.f_threshold;
  }
  if (g && *g > 2 && M > 0) r.filesize_lowerbound = filesize_lowerbound_cliquecover(*g, K, N, M);
  if (g && *g >= 1 && M > 0) {
    r.modified_condition = modified_delivery_condition(K, N, M, *g);
    SystemParams params{K, N, M, 1, 0};
    int K_group = *g * params.group_size();
    if (K_group <= 60)
      r.recommended_packet_groups = modified_delivery_packet_groups(K_group, *g, sizing_c);
  }
  return r;
}

}  // namespace ccsim

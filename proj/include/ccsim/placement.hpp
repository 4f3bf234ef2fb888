#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccsim/cache.hpp"
#include "ccsim/combinatorics.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/system.hpp"

namespace ccsim {

enum class PlacementScheme { OldRandom, NewRandom, DeterministicGrouped };

inline const char* to_string(PlacementScheme s) {
  switch (s) {
    case PlacementScheme::OldRandom: return "old_random";
    case PlacementScheme::NewRandom: return "new_random";
    case PlacementScheme::DeterministicGrouped: return "deterministic_grouped";
  }
  return "?";
}

struct PlacementSpec {
  PlacementScheme scheme{PlacementScheme::NewRandom};
  int gain{0};            // deterministic scheme only
  std::uint64_t seed{0};  // random schemes only
};

/// Contiguous user groups: user u belongs to group u / group_size.
struct UserGrouping {
  int num_users{0};
  int group_size{0};

  int groups() const { return group_size > 0 ? num_users / group_size : 0; }
  int group_of(int user) const { return user / group_size; }
  int base_of(int group) const { return group * group_size; }

  void validate() const {
    if (group_size < 1 || num_users < 1 || num_users % group_size != 0)
      throw InstanceError("group size must divide the user count");
  }
};

/// Independent uniform caching: for every (user, file), an M*F/N-subset of
/// the file's packets chosen without replacement. Requires the quota to be an
/// integer.
inline CacheConfiguration place_old(const SystemParams& params, std::uint64_t seed) {
  params.validate();
  const int K = params.num_users;
  const int N = params.num_files;
  const int F = params.packets_per_file;
  double quota_real = params.cache_files * F / N;
  long long quota = std::llround(quota_real);
  if (std::abs(quota_real - static_cast<double>(quota)) > 1e-9)
    throw InstanceError("M*F/N = " + std::to_string(quota_real) +
                        " is not an integer; adjust F so each cache slot is whole packets");

  auto config = CacheConfiguration::empty(params, to_string(PlacementScheme::OldRandom));
  if (quota == 0) return config;  // M = 0 baseline: empty caches
  for (int u = 0; u < K; ++u) {
    for (int n = 0; n < N; ++n) {
      Rng rng = make_stream(seed, stream::old_placement, static_cast<std::uint64_t>(u),
                            static_cast<std::uint64_t>(n));
      for (int f : sample_without_replacement(rng, static_cast<int>(quota), F))
        config.users({n, f}).set(u);
    }
  }
  return config;
}

/// Grouped uniform caching: each file is F' groups of ceil(N/M) packets and
/// every (user, file, group) caches exactly one packet of the group, chosen
/// uniformly and independently.
inline CacheConfiguration place_new(const SystemParams& params, std::uint64_t seed) {
  params.validate();
  if (!params.grouped())
    throw InstanceError("new placement requires the grouped layout (set F')");
  const int K = params.num_users;
  const int N = params.num_files;
  const int group_size = params.group_size();
  const int groups = params.groups_per_file;

  auto config = CacheConfiguration::empty(params, to_string(PlacementScheme::NewRandom));
  for (int u = 0; u < K; ++u) {
    for (int n = 0; n < N; ++n) {
      for (int g = 0; g < groups; ++g) {
        Rng rng = make_stream(seed, stream::new_placement, static_cast<std::uint64_t>(u),
                              static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(g));
        int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(group_size)));
        config.users({n, g * group_size + pick}).set(u);
      }
    }
  }
  return config;
}

/// Deterministic grouped caching. Users split into contiguous groups of
/// K' = g*ceil(N/M); every file has F = C(K', g) packets indexed by the
/// g-subsets of a group's users in colex order, and each group stores packet
/// r at its rank-r subset. Per user that is g*N/K' files-equivalent, within
/// the cache budget.
inline std::pair<CacheConfiguration, UserGrouping> place_deterministic_grouped(
    const SystemParams& params, int gain) {
  params.validate();
  if (gain < 1) throw InstanceError("deterministic placement needs gain g >= 1");
  const int K = params.num_users;
  const int N = params.num_files;
  const int group_size_files = params.group_size();  // ceil(N/M)
  const int K_group = gain * group_size_files;
  if (K % K_group != 0)
    throw InstanceError("K' = g*ceil(N/M) = " + std::to_string(K_group) + " must divide K");
  long long packets = binomial(K_group, gain);
  if (packets != params.packets_per_file)
    throw InstanceError("deterministic scheme needs F = C(K', g) = " + std::to_string(packets));
  if (gain * N > K_group * params.cache_files + 1e-9)
    throw InstanceError("memory infeasible: g*N/K' exceeds M");

  UserGrouping grouping{K, K_group};
  auto config =
      CacheConfiguration::empty(params, to_string(PlacementScheme::DeterministicGrouped));
  for (int grp = 0; grp < grouping.groups(); ++grp) {
    int base = grouping.base_of(grp);
    auto subset = first_subset(gain);
    long long rank = 0;
    do {
      for (int n = 0; n < N; ++n) {
        UserSet& s = config.users({n, static_cast<int>(rank)});
        for (int local : subset) s.set(base + local);
      }
      ++rank;
    } while (next_subset_colex(subset, K_group));
  }
  return {std::move(config), grouping};
}

}  // namespace ccsim

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccsim/cache.hpp"
#include "ccsim/combinatorics.hpp"
#include "ccsim/placement.hpp"
#include "ccsim/plan.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/side_info.hpp"
#include "ccsim/system.hpp"

namespace ccsim {

enum class DeliveryScheme { OldEnum, Greedy, Modified, Deterministic, Optimal };

inline const char* to_string(DeliveryScheme s) {
  switch (s) {
    case DeliveryScheme::OldEnum: return "old_enum";
    case DeliveryScheme::Greedy: return "greedy";
    case DeliveryScheme::Modified: return "modified";
    case DeliveryScheme::Deterministic: return "deterministic";
    case DeliveryScheme::Optimal: return "optimal";
  }
  return "?";
}

struct DeliverySpec {
  DeliveryScheme scheme{DeliveryScheme::Greedy};
  int gain{0};            // pull-down level, modified only
  std::uint64_t seed{0};  // modified's randomized pull-down
};

namespace detail {

/// Packets of each user's requested file, indexed by exact storage set.
/// Self-cached packets are left out; they are never delivery candidates.
struct StorageIndex {
  // per user: storage set -> ascending packet indices + cursor
  struct Queue {
    std::vector<int> packets;
    std::size_t head{0};
  };
  std::vector<std::unordered_map<UserSet, Queue, UserSetHash>> by_user;

  StorageIndex(const CacheConfiguration& config, const Demand& demand) {
    const int K = config.params.num_users;
    const int F = config.params.packets_per_file;
    by_user.resize(K);
    for (int k = 0; k < K; ++k) {
      int file = demand.files[k];
      for (int f = 0; f < F; ++f) {
        const UserSet& s = config.users({file, f});
        if (s.test(k)) continue;
        by_user[k][s].packets.push_back(f);
      }
    }
  }

  /// Lowest not-yet-covered packet of user k stored exactly at `at`, or -1.
  int pop_uncovered(int k, const UserSet& at, const std::vector<char>& covered, int F) {
    auto it = by_user[k].find(at);
    if (it == by_user[k].end()) return -1;
    Queue& q = it->second;
    while (q.head < q.packets.size()) {
      int f = q.packets[q.head];
      if (!covered[static_cast<std::size_t>(k) * F + f]) {
        ++q.head;
        return f;
      }
      ++q.head;
    }
    return -1;
  }

  const std::vector<int>* list(int k, const UserSet& at) const {
    auto it = by_user[k].find(at);
    return it == by_user[k].end() ? nullptr : &it->second.packets;
  }
};

}  // namespace detail

/// Greedy clique cover. Scans still-needed (user, packet) pairs in canonical
/// order (users ascending, packets ascending); for the pair (k, f) with
/// storage set S it collects, from every other user j in S, the lowest
/// uncovered packet stored exactly at S + {k} - {j}, emits the XOR clique and
/// marks all members covered. Polynomial in K*F.
inline TransmissionPlan deliver_greedy(const CacheConfiguration& config, const Demand& demand) {
  config.params.validate();
  demand.validate(config.params);
  const int K = config.params.num_users;
  const int F = config.params.packets_per_file;

  detail::StorageIndex index(config, demand);
  std::vector<char> covered(static_cast<std::size_t>(K) * F, 0);

  TransmissionPlan plan;
  plan.packets_per_file = F;
  for (int k = 0; k < K; ++k) {
    int file = demand.files[k];
    for (int f = 0; f < F; ++f) {
      const UserSet& holders = config.users({file, f});
      if (holders.test(k)) continue;  // self-cached, never enters the graph
      std::size_t pair_index = static_cast<std::size_t>(k) * F + f;
      if (covered[pair_index]) continue;
      covered[pair_index] = 1;

      Clique clique;
      clique.push_back({PacketId{file, f}, UserSet::single(k)});
      UserSet with_k = holders.with(k);
      // Only users already caching (file, f) can join: mutual decodability
      // needs the seed packet in every member's cache.
      for (int j = holders.next(0); j >= 0; j = holders.next(j + 1)) {
        UserSet target = with_k.without(j);
        int fj = index.pop_uncovered(j, target, covered, F);
        if (fj < 0) continue;
        covered[static_cast<std::size_t>(j) * F + fj] = 1;
        clique.push_back({PacketId{demand.files[j], fj}, UserSet::single(j)});
      }
      plan.cliques.push_back(std::move(clique));
    }
  }
  return plan;
}

/// Subset-enumeration delivery. For every nonempty S of users, V_{k,S-k} is
/// the list of packets of user k's file stored exactly at S - {k}; the stage
/// emits max_k |V_{k,S-k}| XOR transmissions, zipping the lists by ascending
/// packet index. Exponential in K; refuses K > 20 (the greedy scheme counts
/// identically and has no such cap).
inline TransmissionPlan deliver_old(const CacheConfiguration& config, const Demand& demand) {
  config.params.validate();
  demand.validate(config.params);
  const int K = config.params.num_users;
  const int F = config.params.packets_per_file;
  if (K > 20)
    throw CapabilityError("subset enumeration is limited to K <= 20; use the greedy scheme, "
                          "which produces the same transmission count");

  detail::StorageIndex index(config, demand);
  TransmissionPlan plan;
  plan.packets_per_file = F;
  std::vector<const std::vector<int>*> lists(K);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << K); ++mask) {
    UserSet stage = UserSet::from_low_mask(mask);
    std::size_t longest = 0;
    for (int k = stage.next(0); k >= 0; k = stage.next(k + 1)) {
      lists[k] = index.list(k, stage.without(k));
      if (lists[k] && lists[k]->size() > longest) longest = lists[k]->size();
    }
    for (std::size_t i = 0; i < longest; ++i) {
      Clique clique;
      for (int k = stage.next(0); k >= 0; k = stage.next(k + 1)) {
        if (lists[k] && i < lists[k]->size())
          clique.push_back({PacketId{demand.files[k], (*lists[k])[i]}, UserSet::single(k)});
      }
      plan.cliques.push_back(std::move(clique));
    }
  }
  return plan;
}

/// Virtual cache configuration produced by the pull-down phase: every
/// demanded packet stored at more than `level` caches is re-assigned to a
/// uniform random level-subset of its holders. Real caches are untouched.
struct PullDownView {
  CacheConfiguration config;
  int level{0};
};

inline PullDownView pull_down(const CacheConfiguration& config, const Demand& demand, int level,
                              std::uint64_t seed) {
  config.params.validate();
  demand.validate(config.params);
  if (level < 1) throw InstanceError("pull-down level must be >= 1");
  PullDownView view{config, level};
  view.config.origin = config.origin + "+pull_down";
  const int F = config.params.packets_per_file;

  std::vector<char> seen(config.params.num_files, 0);
  for (int d : demand.files) {
    if (seen[d]) continue;  // duplicate demands alter a file once
    seen[d] = 1;
    for (int f = 0; f < F; ++f) {
      UserSet& holders = view.config.users({d, f});
      int size = holders.count();
      if (size <= level) continue;
      std::vector<int> members;
      members.reserve(size);
      for (int u = holders.next(0); u >= 0; u = holders.next(u + 1)) members.push_back(u);
      Rng rng = make_stream(seed, stream::pull_down, static_cast<std::uint64_t>(d),
                            static_cast<std::uint64_t>(f));
      UserSet kept;
      for (int idx : sample_without_replacement(rng, level, size)) kept.set(members[idx]);
      holders = kept;
    }
  }
  return view;
}

/// Pull-down phase followed by the greedy cover on the virtual configuration.
/// The virtual step only forgets side information, so the resulting plan
/// stays decodable against the original caches.
inline TransmissionPlan deliver_modified(const CacheConfiguration& config, const Demand& demand,
                                         int level, std::uint64_t seed) {
  PullDownView view = pull_down(config, demand, level, seed);
  return deliver_greedy(view.config, demand);
}

/// Delivery for the deterministic grouped placement: per group, one clique
/// for every (g+1)-subset T of the group's users, XORing for each k in T the
/// packet of file d_k indexed by T - {k}. Exactly (K/K')*C(K', g+1)
/// transmissions.
inline TransmissionPlan deliver_deterministic(const CacheConfiguration& config,
                                              const Demand& demand, const UserGrouping& grouping,
                                              int gain) {
  config.params.validate();
  demand.validate(config.params);
  grouping.validate();
  const int N = config.params.num_files;
  const int F = config.params.packets_per_file;
  const int K_group = grouping.group_size;
  if (grouping.num_users != config.params.num_users)
    throw InstanceError("grouping does not match the configuration's user count");
  if (gain < 1 || gain >= K_group || binomial(K_group, gain) != F)
    throw InstanceError("deterministic delivery needs F = C(K', g) with 1 <= g < K'");
  // The configuration must actually be the grouped deterministic placement.
  for (int grp = 0; grp < grouping.groups(); ++grp) {
    int base = grouping.base_of(grp);
    UserSet group_mask;
    for (int i = 0; i < K_group; ++i) group_mask.set(base + i);
    auto subset = first_subset(gain);
    long long rank = 0;
    do {
      UserSet expected;
      for (int local : subset) expected.set(base + local);
      for (int n = 0; n < N; ++n) {
        if ((config.users({n, static_cast<int>(rank)}) & group_mask) != expected)
          throw InstanceError("configuration was not produced by the matching deterministic "
                              "placement");
      }
      ++rank;
    } while (next_subset_colex(subset, K_group));
  }

  TransmissionPlan plan;
  plan.packets_per_file = F;
  std::vector<int> others(gain);
  for (int grp = 0; grp < grouping.groups(); ++grp) {
    int base = grouping.base_of(grp);
    auto team = first_subset(gain + 1);  // local indices of the (g+1)-subset
    do {
      Clique clique;
      for (int pos = 0; pos <= gain; ++pos) {
        int local = team[pos];
        int out = 0;
        for (int q = 0; q <= gain; ++q)
          if (q != pos) others[out++] = team[q];
        int user = base + local;
        clique.push_back({PacketId{demand.files[user], static_cast<int>(colex_rank(others))},
                          UserSet::single(user)});
      }
      plan.cliques.push_back(std::move(clique));
    } while (next_subset_colex(team, K_group));
  }
  return plan;
}

/// Exact minimum clique cover of the side-information view, by memoized
/// subset DP over the needed nodes. NP-hard in general; capped at 20 nodes
/// and intended as a test oracle, not a delivery scheme for real sizes.
inline TransmissionPlan deliver_optimal(const CacheConfiguration& config, const Demand& demand) {
  SideInfoView view = build_side_info_view(config, demand);
  const auto& nodes = view.needed();
  const int n = static_cast<int>(nodes.size());
  if (n > 20)
    throw CapabilityError("optimal clique cover is limited to 20 needed nodes, got " +
                          std::to_string(n));

  TransmissionPlan plan;
  plan.packets_per_file = config.params.packets_per_file;
  if (n == 0) return plan;

  std::vector<std::uint32_t> compat(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool ok = nodes[i].packet == nodes[j].packet ||
                (view.has_edge(nodes[i], nodes[j]) && view.has_edge(nodes[j], nodes[i]));
      if (ok) {
        compat[i] |= std::uint32_t{1} << j;
        compat[j] |= std::uint32_t{1} << i;
      }
    }
  }

  const std::uint32_t full = n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
  std::vector<int> best(full + 1, -1);
  std::vector<std::uint32_t> pick(full + 1, 0);
  best[0] = 0;

  // dp(mask) = 1 + min over cliques c containing mask's lowest node of
  // dp(mask \ c); cliques enumerated by ordered extension.
  auto dp = [&](auto&& self, std::uint32_t mask) -> int {
    if (best[mask] >= 0) return best[mask];
    int low = __builtin_ctz(mask);
    int best_count = n + 1;
    std::uint32_t best_clique = 0;
    auto extend = [&](auto&& ext, std::uint32_t clique, std::uint32_t cand) -> void {
      int sub = 1 + self(self, mask & ~clique);
      if (sub < best_count) {
        best_count = sub;
        best_clique = clique;
      }
      while (cand) {
        int u = __builtin_ctz(cand);
        cand &= cand - 1;
        ext(ext, clique | (std::uint32_t{1} << u), cand & compat[u]);
      }
    };
    extend(extend, std::uint32_t{1} << low, mask & compat[low]);
    best[mask] = best_count;
    pick[mask] = best_clique;
    return best_count;
  };
  dp(dp, full);

  for (std::uint32_t mask = full; mask;) {
    std::uint32_t clique_mask = pick[mask];
    Clique clique;
    for (std::uint32_t rest = clique_mask; rest;) {
      int i = __builtin_ctz(rest);
      rest &= rest - 1;
      bool merged = false;
      for (auto& entry : clique)
        if (entry.packet == nodes[i].packet) {
          entry.users.set(nodes[i].user);
          merged = true;
          break;
        }
      if (!merged) clique.push_back({nodes[i].packet, UserSet::single(nodes[i].user)});
    }
    plan.cliques.push_back(std::move(clique));
    mask &= ~clique_mask;
  }
  return plan;
}

}  // namespace ccsim

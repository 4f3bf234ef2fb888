#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccsim/cache.hpp"
#include "ccsim/rational.hpp"
#include "ccsim/side_info.hpp"
#include "ccsim/system.hpp"

namespace ccsim {

/// One XOR component: a packet together with the users meant to decode it
/// from this transmission. Packets are unique within a clique.
struct PlanEntry {
  PacketId packet;
  UserSet users;
};

using Clique = std::vector<PlanEntry>;

/// Ordered list of XOR cliques. Every clique costs one packet-sized
/// broadcast, so the normalized rate is cliques/F, kept exact.
struct TransmissionPlan {
  int packets_per_file{1};
  std::vector<Clique> cliques;

  long long transmissions() const { return static_cast<long long>(cliques.size()); }
  Rational rate() const { return Rational(transmissions(), packets_per_file); }
};

struct DecodeReport {
  bool ok{true};
  std::string first_failure;

  explicit operator bool() const { return ok; }
};

namespace detail {
inline std::string describe(int user, PacketId p) {
  return "user " + std::to_string(user + 1) + ", packet (" + std::to_string(p.file + 1) + "," +
         std::to_string(p.packet + 1) + ")";
}
}  // namespace detail

/// Structural decode check. For every (user, packet) pair the demand still
/// needs, the plan must contain exactly one clique delivering that packet to
/// that user, and the user must hold every other packet of the clique in its
/// cache. Runs against the real cache configuration, so plans built from a
/// virtual (pulled-down) configuration are checked against what users truly
/// store.
inline DecodeReport verify_decodable(const TransmissionPlan& plan,
                                     const CacheConfiguration& config, const Demand& demand) {
  DecodeReport report;
  auto fail = [&](std::string why) {
    if (report.ok) {
      report.ok = false;
      report.first_failure = std::move(why);
    }
  };

  const int K = config.params.num_users;
  const int F = config.params.packets_per_file;
  auto pair_key = [&](int user, PacketId p) {
    return (static_cast<std::uint64_t>(user) * config.params.num_files + p.file) * F + p.packet;
  };

  std::unordered_map<std::uint64_t, int> cover_count;
  for (const auto& clique : plan.cliques) {
    for (std::size_t i = 0; i < clique.size(); ++i) {
      for (std::size_t j = i + 1; j < clique.size(); ++j)
        if (clique[i].packet == clique[j].packet) {
          fail("clique repeats packet " + detail::describe(0, clique[i].packet));
          return report;
        }
    }
    for (const auto& entry : clique) {
      for (int u = entry.users.next(0); u >= 0; u = entry.users.next(u + 1)) {
        ++cover_count[pair_key(u, entry.packet)];
        // Decoding: user u XORs out every other packet from its own cache.
        for (const auto& other : clique) {
          if (other.packet == entry.packet) continue;
          if (!config.cached_by(u, other.packet)) {
            fail(detail::describe(u, entry.packet) + " cannot decode: misses " +
                 detail::describe(u, other.packet));
            return report;
          }
        }
      }
    }
  }

  for (int k = 0; k < K; ++k) {
    int file = demand.files[k];
    for (int f = 0; f < F; ++f) {
      PacketId p{file, f};
      if (config.cached_by(k, p)) continue;
      auto it = cover_count.find(pair_key(k, p));
      int covers = it == cover_count.end() ? 0 : it->second;
      if (covers == 0) {
        fail("coverage incomplete: " + detail::describe(k, p) + " never delivered");
        return report;
      }
      if (covers > 1) {
        fail("double cover: " + detail::describe(k, p) + " delivered " + std::to_string(covers) +
             " times");
        return report;
      }
    }
  }
  return report;
}

}  // namespace ccsim

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ccsim/system.hpp"
#include "ccsim/user_set.hpp"

namespace ccsim {

/// Cache state after a placement phase: for every packet, the set of user
/// caches holding it. Immutable once a placement scheme has produced it.
struct CacheConfiguration {
  SystemParams params;
  std::string origin;           // producing scheme tag
  std::vector<UserSet> store;   // index = file * F + packet

  static CacheConfiguration empty(const SystemParams& p, std::string origin_tag) {
    p.validate();
    CacheConfiguration c;
    c.params = p;
    c.origin = std::move(origin_tag);
    c.store.assign(p.packet_count(), UserSet{});
    return c;
  }

  std::size_t index(PacketId id) const {
    return static_cast<std::size_t>(id.file) * params.packets_per_file + id.packet;
  }

  const UserSet& users(PacketId id) const { return store[index(id)]; }
  UserSet& users(PacketId id) { return store[index(id)]; }

  bool cached_by(int user, PacketId id) const { return users(id).test(user); }

  /// Packets of one file held by one user.
  int cached_count(int user, int file) const {
    int c = 0;
    for (int f = 0; f < params.packets_per_file; ++f)
      if (cached_by(user, {file, f})) ++c;
    return c;
  }

  /// Total packets held by one user across the library.
  long long cached_total(int user) const {
    long long c = 0;
    for (int n = 0; n < params.num_files; ++n) c += cached_count(user, n);
    return c;
  }
};

}  // namespace ccsim

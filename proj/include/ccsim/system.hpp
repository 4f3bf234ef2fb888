#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccsim/user_set.hpp"

namespace ccsim {

/// A malformed or unsupported problem instance.
struct InstanceError : std::runtime_error {
  explicit InstanceError(const std::string& what) : std::runtime_error(what) {}
};

/// A structurally valid request that exceeds a deliberate capability limit
/// (e.g. exponential-time schemes past their size cap).
struct CapabilityError : std::runtime_error {
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem instance: K users, library of N files, per-user cache of M files,
/// each file split into F packets. groups_per_file > 0 selects the grouped
/// packet layout where F = group_size() * groups_per_file and group g
/// occupies packet indices [g*group_size(), (g+1)*group_size()).
struct SystemParams {
  int num_users{1};        // K
  int num_files{1};        // N
  double cache_files{0};   // M, in units of files
  int packets_per_file{1}; // F
  int groups_per_file{0};  // F', 0 when the flat layout is used

  bool grouped() const { return groups_per_file > 0; }

  /// ceil(N/M); requires M > 0.
  int group_size() const {
    if (cache_files <= 0) throw InstanceError("group size undefined for M = 0");
    double q = static_cast<double>(num_files) / cache_files;
    return static_cast<int>(std::ceil(q - 1e-9));
  }

  double target_gain_old() const {
    return num_users * cache_files / static_cast<double>(num_files);
  }

  double target_gain_new() const {
    return static_cast<double>(num_users) / static_cast<double>(group_size());
  }

  std::size_t packet_count() const {
    return static_cast<std::size_t>(num_files) * static_cast<std::size_t>(packets_per_file);
  }

  void validate() const {
    if (num_users < 1) throw InstanceError("need at least one user");
    if (num_users > UserSet::max_users)
      throw InstanceError("more than " + std::to_string(UserSet::max_users) + " users unsupported");
    if (num_files < 1) throw InstanceError("need at least one file");
    if (cache_files < 0 || cache_files > num_files)
      throw InstanceError("cache size must lie in [0, N]");
    if (packets_per_file < 1) throw InstanceError("need at least one packet per file");
    if (grouped()) {
      if (cache_files <= 0) throw InstanceError("grouped layout requires M >= 1");
      if (packets_per_file != group_size() * groups_per_file)
        throw InstanceError("grouped layout requires F = ceil(N/M) * F'");
    }
  }
};

/// Packet f of file n; both indices 0-based internally (1-based in JSON/CSV).
struct PacketId {
  int file{0};
  int packet{0};

  bool operator==(const PacketId& o) const { return file == o.file && packet == o.packet; }
  bool operator!=(const PacketId& o) const { return !(*this == o); }
  bool operator<(const PacketId& o) const {
    return file != o.file ? file < o.file : packet < o.packet;
  }
};

enum class DemandMode { Distinct, Arbitrary };

/// One requested file per user.
struct Demand {
  std::vector<int> files;  // files[k] = file requested by user k, 0-based
  DemandMode mode{DemandMode::Arbitrary};

  int size() const { return static_cast<int>(files.size()); }

  void validate(const SystemParams& params) const {
    if (size() != params.num_users) throw InstanceError("demand length must equal K");
    for (int d : files)
      if (d < 0 || d >= params.num_files) throw InstanceError("demanded file out of range");
    if (mode == DemandMode::Distinct) {
      if (params.num_files < params.num_users)
        throw InstanceError("distinct demands require N >= K");
      std::vector<bool> seen(params.num_files, false);
      for (int d : files) {
        if (seen[d]) throw InstanceError("distinct demand vector has a repeat");
        seen[d] = true;
      }
    }
  }
};

}  // namespace ccsim

#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "ccsim/cache.hpp"
#include "ccsim/system.hpp"

namespace ccsim {

/// A node of the side-information graph: user k still needs packet f of its
/// requested file. Duplicate demands give distinct nodes sharing a PacketId.
struct SideInfoNode {
  int user{0};
  PacketId packet;

  bool operator==(const SideInfoNode& o) const { return user == o.user && packet == o.packet; }
};

/// View of the directed side-information graph induced by a cache
/// configuration and a demand vector. Nodes whose packet sits in the
/// requester's own cache are excluded. Edges are evaluated on demand from the
/// cache state; the view holds no adjacency structure.
class SideInfoView {
 public:
  SideInfoView(const CacheConfiguration& config, const Demand& demand)
      : config_(&config), demand_(&demand) {}

  const CacheConfiguration& config() const { return *config_; }
  const Demand& demand() const { return *demand_; }
  const std::vector<SideInfoNode>& needed() const { return needed_; }

  bool contains(const SideInfoNode& node) const { return keys_.count(key(node)) != 0; }

  /// Directed edge node_from -> node_to: the packet of node_to is cached by
  /// the user requesting node_from.
  bool has_edge(const SideInfoNode& from, const SideInfoNode& to) const {
    return config_->cached_by(from.user, to.packet);
  }

  void add_node(const SideInfoNode& node) {
    needed_.push_back(node);
    keys_.insert(key(node));
  }

 private:
  std::uint64_t key(const SideInfoNode& node) const {
    return (static_cast<std::uint64_t>(node.user) * config_->params.num_files +
            node.packet.file) *
               config_->params.packets_per_file +
           node.packet.packet;
  }

  const CacheConfiguration* config_;
  const Demand* demand_;
  std::vector<SideInfoNode> needed_;
  std::unordered_set<std::uint64_t> keys_;
};

inline SideInfoView build_side_info_view(const CacheConfiguration& config, const Demand& demand) {
  config.params.validate();
  demand.validate(config.params);
  SideInfoView view(config, demand);
  const int K = config.params.num_users;
  const int F = config.params.packets_per_file;
  for (int k = 0; k < K; ++k) {
    int file = demand.files[k];
    for (int f = 0; f < F; ++f) {
      PacketId p{file, f};
      if (!config.cached_by(k, p)) view.add_node({k, p});
    }
  }
  return view;
}

/// True iff the given nodes form a clique of the view: every ordered pair of
/// entries with distinct packets has an edge (packet of one in the cache of
/// the other's requester). Pairs sharing a PacketId are exempt; one broadcast
/// serves both requesters.
inline bool is_clique(const SideInfoView& view, std::span<const SideInfoNode> nodes) {
  for (const auto& node : nodes)
    if (!view.contains(node)) throw std::invalid_argument("node not present in side-info view");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i].packet == nodes[j].packet) continue;
      if (!view.has_edge(nodes[i], nodes[j])) return false;
      if (!view.has_edge(nodes[j], nodes[i])) return false;
    }
  }
  return true;
}

}  // namespace ccsim

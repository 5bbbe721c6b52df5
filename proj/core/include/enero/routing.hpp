#pragma once

#include <string>
#include <vector>

#include "enero/topology.hpp"
#include "enero/traffic.hpp"
#include "enero/types.hpp"

namespace enero {

using LinkPath = std::vector<LinkId>;

/// All-pairs minimum-weight paths under the topology's OSPF weights.
/// Equal-cost ties are broken by the lexicographically smallest node-id
/// sequence, so every lookup is deterministic.
class PathTable {
 public:
  explicit PathTable(const Topology& t);

  const LinkPath& path(NodeId src, NodeId dst) const;
  double distance(NodeId src, NodeId dst) const;
  int num_nodes() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> dist_;       // n x n
  std::vector<LinkPath> paths_;    // n x n, empty on the diagonal
};

/// Single minimum-weight path; convenience wrapper that builds the Dijkstra
/// state for one source. Prefer PathTable in loops.
LinkPath ospf_path(const Topology& t, NodeId src, NodeId dst);

/// 2-segment SR path: concatenation of the OSPF paths src->mid and mid->dst,
/// or the direct OSPF path. Overlapping segments are kept (a link crossed by
/// both segments carries the demand twice). Throws InvalidActionError when
/// mid is the demand's src or dst.
LinkPath sr_path(const PathTable& paths, const Demand& d, Midpoint mid);

/// Per-demand midpoint assignment covering all n*(n-1) demands.
class RoutingConfig {
 public:
  RoutingConfig() = default;
  explicit RoutingConfig(int num_nodes)
      : n_(num_nodes),
        mid_(static_cast<size_t>(demand_count(num_nodes)), Midpoint::direct()) {}

  static RoutingConfig all_direct(int num_nodes) {
    return RoutingConfig(num_nodes);
  }

  int num_nodes() const { return n_; }
  int num_demands() const { return static_cast<int>(mid_.size()); }

  Midpoint midpoint(NodeId src, NodeId dst) const {
    return mid_[static_cast<size_t>(demand_index(n_, src, dst))];
  }
  Midpoint midpoint_at(int k) const { return mid_[static_cast<size_t>(k)]; }

  /// Throws InvalidActionError when mid equals src or dst.
  void set_midpoint(NodeId src, NodeId dst, Midpoint mid);

  friend bool operator==(const RoutingConfig& a, const RoutingConfig& b) {
    return a.n_ == b.n_ && a.mid_ == b.mid_;
  }

 private:
  int n_ = 0;
  std::vector<Midpoint> mid_;
};

/// Serialization: `src,dst,midpoint` records ordered by (src, dst), with
/// midpoint -1 meaning DIRECT.
std::string routing_config_to_text(const RoutingConfig& cfg);
RoutingConfig parse_routing_config(const std::string& text);
RoutingConfig load_routing_config_file(const std::string& path);
void save_routing_config_file(const RoutingConfig& cfg, const std::string& path);

/// Per-link accumulated load with a capacity snapshot, so utilization is
/// self-contained. Utilization may exceed 1 on oversubscribed links.
class LinkState {
 public:
  LinkState() = default;
  explicit LinkState(const Topology& t);

  int num_links() const { return static_cast<int>(load_.size()); }
  double load(LinkId id) const { return load_[static_cast<size_t>(id)]; }
  double capacity(LinkId id) const { return capacity_[static_cast<size_t>(id)]; }
  double utilization(LinkId id) const {
    return load_[static_cast<size_t>(id)] / capacity_[static_cast<size_t>(id)];
  }

  void add_load(LinkId id, double bandwidth) {
    load_[static_cast<size_t>(id)] += bandwidth;
  }
  void set_load(LinkId id, double value) { load_[static_cast<size_t>(id)] = value; }

 private:
  std::vector<double> load_;
  std::vector<double> capacity_;
};

/// Load of every demand's SR path superposed on the links.
LinkState apply_routing(const Topology& t, const PathTable& paths,
                        const TrafficMatrix& tm, const RoutingConfig& cfg);
LinkState apply_routing(const Topology& t, const TrafficMatrix& tm,
                        const RoutingConfig& cfg);

double max_utilization(const LinkState& ls);

/// Re-places one demand: subtracts its bandwidth along old_path and adds it
/// along new_path. O(path length). The input must already reflect the demand
/// routed on old_path.
LinkState incremental_move(const LinkState& ls, const Demand& d,
                           const LinkPath& old_path, const LinkPath& new_path);

/// In-place variant for single-owner states.
void move_in_place(LinkState& ls, double bandwidth, const LinkPath& old_path,
                   const LinkPath& new_path);

/// Max utilization after a hypothetical move; the state is restored exactly
/// (bit-for-bit) before returning.
double peek_move_max_utilization(LinkState& ls, double bandwidth,
                                 const LinkPath& old_path,
                                 const LinkPath& new_path);

}  // namespace enero

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "enero/types.hpp"

namespace enero {

struct Node {
  NodeId id = 0;
  std::string label;
};

/// One directed link. Every link has a reverse twin: the parser and all
/// mutations keep the graph symmetric in (u,v)/(v,u) pairs.
struct Link {
  NodeId tail = 0;
  NodeId head = 0;
  double capacity = 0.0;
  double ospf_weight = 1.0;
};

struct TopologyLimits {
  int max_nodes = 30;
  int max_undirected_edges = 100;
};

/// Immutable directed-link graph with capacities and OSPF weights. Safe to
/// share read-only across threads; mutating operations return new values.
class Topology {
 public:
  Topology() = default;  // empty placeholder; real instances come from builders

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_links() const { return static_cast<int>(links_.size()); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_[static_cast<size_t>(id)]; }

  /// Directed link (u,v), or nullopt.
  std::optional<LinkId> find_link(NodeId u, NodeId v) const;
  /// Directed link (u,v); throws NotFoundError when absent.
  LinkId link_between(NodeId u, NodeId v) const;

  const std::vector<LinkId>& out_links(NodeId u) const {
    return out_links_[static_cast<size_t>(u)];
  }
  const std::vector<LinkId>& in_links(NodeId u) const {
    return in_links_[static_cast<size_t>(u)];
  }

  double max_capacity() const { return max_capacity_; }

  /// Unique undirected node pairs (u < v), one per link pair.
  std::vector<std::pair<NodeId, NodeId>> undirected_edges() const;

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 private:
  friend class TopologyBuilder;

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::map<std::pair<NodeId, NodeId>, LinkId> link_index_;
  std::vector<std::vector<LinkId>> out_links_;
  std::vector<std::vector<LinkId>> in_links_;
  double max_capacity_ = 0.0;
  std::string name_;
};

/// Accumulates nodes and undirected edges, then validates and freezes a
/// Topology. Parallel edges between the same pair are aggregated by summing
/// capacities; the smallest weight of the bundle is kept.
class TopologyBuilder {
 public:
  void set_num_nodes(int n);
  void set_node_label(NodeId id, std::string label);
  /// Adds links (u,v) and (v,u), both with `capacity` and `weight`.
  void add_edge(NodeId u, NodeId v, double capacity, double weight = 1.0);

  /// Validates (positive capacities/weights, connectivity, size limits)
  /// and builds. Throws ValidationError / ConnectivityError.
  Topology build(const TopologyLimits& limits = TopologyLimits{}) const;

 private:
  int num_nodes_ = 0;
  std::map<NodeId, std::string> labels_;
  struct Edge {
    NodeId u, v;
    double capacity, weight;
  };
  std::vector<Edge> edges_;
};

enum class WeightMode {
  kFromFile,         // optional 4th column, default 1.0
  kUnit,             // force 1.0
  kInverseCapacity,  // 1 / capacity
};

struct TopologyParseOptions {
  WeightMode weight_mode = WeightMode::kFromFile;
  TopologyLimits limits;
};

/// Parses the plain-text topology format:
///   NODES <N>
///   [<id> <label>]       optional node lines
///   EDGES <M>
///   <u> <v> <capacity> [weight]   (M lines, each expands to two links)
/// '#' starts a comment. Throws ParseError / ValidationError.
Topology parse_topology(const std::string& text,
                        const TopologyParseOptions& options = {});

std::string topology_to_text(const Topology& t);

Topology load_topology_file(const std::string& path,
                            const TopologyParseOptions& options = {});
void save_topology_file(const Topology& t, const std::string& path);

/// Returns a copy without links (u,v) and (v,u). Throws NotFoundError when
/// either direction is absent, ConnectivityError when the removal would
/// disconnect the graph.
Topology remove_link_pair(const Topology& t, NodeId u, NodeId v);

/// True when every node can reach every other following directed links.
bool strongly_connected(const Topology& t);

}  // namespace enero

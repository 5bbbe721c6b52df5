#pragma once

#include <vector>

#include "enero/routing.hpp"
#include "enero/topology.hpp"
#include "enero/traffic.hpp"
#include "enero/types.hpp"

// Independent brute-force oracles. Everything here recomputes from first
// principles (path enumeration, exhaustive search) and must stay decoupled
// from the implementation paths it checks.
namespace enero::testing {

/// Every simple path src -> dst as a node sequence, by DFS enumeration.
std::vector<std::vector<NodeId>> all_simple_paths(const Topology& t, NodeId src,
                                                  NodeId dst);

double path_weight(const Topology& t, const std::vector<NodeId>& nodes);

LinkPath nodes_to_links(const Topology& t, const std::vector<NodeId>& nodes);

/// Minimum-weight path by exhaustive enumeration with the lexicographic
/// tie-break (smallest node sequence).
std::vector<NodeId> brute_force_shortest_path(const Topology& t, NodeId src,
                                              NodeId dst);

/// Normalized undirected edge betweenness by enumerating all shortest paths
/// per pair (BFS distances + path counting over enumerated simple paths).
std::vector<double> brute_force_edge_betweenness(const Topology& t);

/// Link loads by independent per-demand superposition of given paths.
std::vector<double> accumulate_loads(const Topology& t, const TrafficMatrix& tm,
                                     const std::vector<LinkPath>& demand_paths);

/// Exhaustive optimum over all per-demand midpoint assignments. Only viable
/// for tiny instances (options^demands configurations).
struct BruteForceOptimum {
  double maxu = 0.0;
  RoutingConfig config;
};
BruteForceOptimum brute_force_optimum(const Topology& t, const PathTable& paths,
                                      const TrafficMatrix& tm);

/// Widest-bottleneck path value by enumerating all simple paths.
double brute_force_widest_bottleneck(const Topology& t, const LinkState& ls,
                                     NodeId src, NodeId dst);

}  // namespace enero::testing

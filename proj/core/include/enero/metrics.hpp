#pragma once

#include "enero/topology.hpp"

namespace enero {

struct StatTriple {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct TopologyMetrics {
  StatTriple node_degree;
  StatTriple edge_betweenness;
};

/// Node degree on the undirected simple graph, and normalized undirected
/// shortest-path edge betweenness with unit edge lengths (fraction of
/// all-pairs shortest paths crossing each undirected edge).
TopologyMetrics compute_metrics(const Topology& t);

/// Per-undirected-edge betweenness, indexed like Topology::undirected_edges().
std::vector<double> edge_betweenness(const Topology& t);

}  // namespace enero

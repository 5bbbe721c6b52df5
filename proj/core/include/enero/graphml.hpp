#pragma once

#include <string>

#include "enero/topology.hpp"

namespace enero {

struct GraphMLOptions {
  /// GraphML key attr.name holding the edge capacity.
  std::string capacity_attr = "capacity";
  /// Used when an edge carries no capacity datum.
  double default_capacity = 1.0;
  WeightMode weight_mode = WeightMode::kUnit;
  TopologyLimits limits;
};

/// Imports a GraphML document. Node elements are mapped to dense ids in
/// document order; every edge becomes a bidirectional link pair.
Topology parse_graphml(const std::string& xml, const GraphMLOptions& options = {});

Topology load_graphml_file(const std::string& path,
                           const GraphMLOptions& options = {});

}  // namespace enero

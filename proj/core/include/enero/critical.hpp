#pragma once

#include <cstdint>
#include <vector>

#include "enero/routing.hpp"
#include "enero/traffic.hpp"

namespace enero {

/// The demands the optimizer is allowed to touch, in decreasing bandwidth
/// order.
struct CriticalSet {
  std::vector<Demand> demands;
};

struct CriticalOptions {
  double fraction = 0.15;
  int top_links = 5;
};

/// Picks round(fraction * n*(n-1)) demands among those whose current path
/// crosses the `top_links` most utilized links, largest bandwidth first.
/// When those links don't yield enough candidates the link set widens down
/// the utilization order until the quota is met.
CriticalSet select_critical(const Topology& t, const PathTable& paths,
                            const TrafficMatrix& tm, const RoutingConfig& cfg,
                            const CriticalOptions& options = {});

/// TM scale that lands the mean OSPF max utilization near `target_maxu`,
/// estimated over `samples` seeded unit-scale TMs.
double calibrate_scale(const Topology& t, double target_maxu,
                       std::uint64_t seed, int samples = 5);

}  // namespace enero

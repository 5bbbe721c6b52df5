#pragma once

#include <string>
#include <vector>

#include "enero/critical.hpp"
#include "enero/routing.hpp"

namespace enero {

struct Move {
  Demand demand;
  Midpoint new_midpoint;
  double resulting_maxu = 0.0;
};

/// Limits for the anytime search. Negative means unlimited; with both limits
/// unlimited the search runs to a local optimum.
struct SearchBudget {
  double wall_seconds = -1.0;
  long max_iterations = -1;
};

struct IterationTraceRow {
  int iteration = 0;
  Demand demand;
  Midpoint midpoint;
  double max_utilization = 0.0;
  double elapsed_ms = 0.0;
};

struct HillClimbResult {
  RoutingConfig config;
  double maxu = 0.0;
  int iterations = 0;
  bool local_optimum = false;  // stopped because no move improves
  std::vector<IterationTraceRow> trace;
};

struct HillClimbOptions {
  /// Recompute the critical set after every applied move (default: frozen).
  bool reselect_critical = false;
  CriticalOptions critical;
};

/// Greedy best-improvement hill climbing over (critical demand, midpoint)
/// moves, evaluated incrementally. Applies the single best strictly
/// improving move per iteration and stops at a local optimum or when the
/// budget runs out; the result is valid whenever it stops.
HillClimbResult hill_climb(const Topology& t, const PathTable& paths,
                           const TrafficMatrix& tm, const RoutingConfig& start,
                           const CriticalSet& critical, const SearchBudget& budget,
                           const HillClimbOptions& options = {});

/// Iteration trace CSV: iteration, demand, midpoint, maxU, elapsed ms.
std::string iteration_trace_to_csv(const std::vector<IterationTraceRow>& trace);

/// Shortest Available Path baseline: demands in decreasing bandwidth order,
/// each placed on the path with the largest bottleneck residual capacity
/// (ties: fewest hops, then lexicographic node sequence).
struct SapResult {
  std::vector<LinkPath> paths;  // indexed by demand_index
  double maxu = 0.0;
};

SapResult sap_route(const Topology& t, const TrafficMatrix& tm);

/// One widest-bottleneck path under the given residual loads.
LinkPath widest_path(const Topology& t, const LinkState& ls, NodeId src,
                     NodeId dst);

/// Hill climbing from the all-DIRECT OSPF configuration, critical set taken
/// from that state.
struct LsBaselineResult {
  RoutingConfig config;
  double initial_maxu = 0.0;
  double maxu = 0.0;
  HillClimbResult detail;
};

LsBaselineResult ls_baseline(const Topology& t, const PathTable& paths,
                             const TrafficMatrix& tm, const SearchBudget& budget,
                             const CriticalOptions& critical = {});

}  // namespace enero

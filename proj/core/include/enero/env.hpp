#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "enero/critical.hpp"
#include "enero/routing.hpp"
#include "enero/traffic.hpp"

namespace enero {

/// Per-link feature rows describing one candidate placement:
/// (utilization, normalized capacity, on-path flag, demand load fraction).
struct ActionGraph {
  static constexpr int kNumFeatures = 4;

  int num_links = 0;
  std::vector<double> features;  // row-major, kNumFeatures per link

  double feature(LinkId link, int f) const {
    return features[static_cast<size_t>(link) * kNumFeatures + static_cast<size_t>(f)];
  }
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
  std::optional<Demand> next_demand;
};

struct StepTraceRow {
  Demand demand;
  Midpoint midpoint;
  double reward = 0.0;
  double max_utilization = 0.0;
};

struct EnvOptions {
  CriticalOptions critical;
};

/// One optimization episode over the critical demands of a TM. Starts from
/// the all-DIRECT OSPF routing, applies one midpoint decision per step, and
/// tracks the best configuration seen so the episode result never falls
/// behind the initial routing.
class Env {
 public:
  Env(const Topology& t, const TrafficMatrix& tm, const EnvOptions& options = {});

  bool done() const { return cursor_ >= critical_.demands.size(); }
  const Demand* current_demand() const {
    return done() ? nullptr : &critical_.demands[cursor_];
  }

  /// DIRECT first, then every node except the demand endpoints, ascending.
  std::vector<Midpoint> candidate_midpoints() const;

  /// Feature rows for one candidate. The current demand is lifted from its
  /// present path before marking, so the graph shows the placement itself.
  ActionGraph action_graph(Midpoint mid) const;

  std::vector<std::pair<Midpoint, ActionGraph>> candidate_actions() const;

  /// Unmarked state graph for the critic: flags and demand features zero,
  /// utilization with every demand placed.
  ActionGraph state_graph() const;

  /// Applies the midpoint to the current demand. Reward is the drop in max
  /// utilization. Throws InvalidActionError for an illegal midpoint.
  StepResult step(Midpoint mid);

  /// Best configuration visited and its recomputable max utilization.
  std::pair<RoutingConfig, double> best_result() const {
    return {best_config_, best_maxu_};
  }

  double current_max_utilization() const { return max_utilization(link_state_); }
  double initial_max_utilization() const { return initial_maxu_; }

  const Topology& topology() const { return topology_; }
  const PathTable& paths() const { return paths_; }
  const TrafficMatrix& traffic() const { return tm_; }
  const RoutingConfig& config() const { return config_; }
  const LinkState& link_state() const { return link_state_; }
  const CriticalSet& critical_set() const { return critical_; }
  size_t steps_taken() const { return cursor_; }

  const std::vector<StepTraceRow>& trace() const { return trace_; }

 private:
  Topology topology_;
  PathTable paths_;
  TrafficMatrix tm_;
  RoutingConfig config_;
  LinkState link_state_;
  CriticalSet critical_;
  size_t cursor_ = 0;
  RoutingConfig best_config_;
  double best_maxu_ = 0.0;
  double initial_maxu_ = 0.0;
  std::vector<StepTraceRow> trace_;
};

/// Episode trace CSV: demand, chosen midpoint, reward, max utilization.
std::string trace_to_csv(const std::vector<StepTraceRow>& trace);

}  // namespace enero

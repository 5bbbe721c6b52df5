#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enero/pipeline.hpp"
#include "enero/search.hpp"
#include "enero/topology.hpp"
#include "enero/traffic.hpp"

namespace enero {

// Synthetic instance generators used by the experiment suites.

/// Connected random topology: spanning tree plus extra edges, capacities
/// drawn uniformly from `capacity_choices`.
Topology gen_random_topology(int num_nodes, int extra_edges,
                             const std::vector<double>& capacity_choices,
                             std::uint64_t seed);

Topology make_ring(int num_nodes, double capacity = 10.0);
Topology make_star(int num_nodes, double capacity = 10.0);
Topology make_line(int num_nodes, double capacity = 10.0);

struct FailureVariant {
  Topology topology;
  std::vector<std::pair<NodeId, NodeId>> removed;  // canonical (u < v) pairs
};

struct FailureSuiteEntry {
  int k_failures = 0;
  std::vector<FailureVariant> variants;
};

/// `count` distinct connected variants of t with k bidirectional link
/// removals each, via seeded rejection sampling (capped at 10000 attempts
/// per variant; ExhaustionError past that).
FailureSuiteEntry gen_failures(const Topology& t, int k, int count,
                               std::uint64_t seed);

enum class Method { kOspf, kSap, kLs, kDrl, kEnero };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct ScenarioResult {
  std::string scenario;
  std::string topology;
  int k_failures = 0;
  int tm_id = 0;
  std::string method;
  double init_maxu = 0.0;
  double final_maxu = 0.0;
  double wall_ms = 0.0;
  std::string config_path;
};

std::string scenario_results_to_csv(const std::vector<ScenarioResult>& rows);

/// Per-step progress of one optimization run, for time-series plots. Phase
/// is "drl" or "ls".
struct SeriesPoint {
  int tm_id = 0;
  std::string phase;
  int step = 0;
  double maxu = 0.0;
};

struct RunnerOptions {
  Method method = Method::kEnero;
  SearchBudget ls_budget{60.0, -1};
  CriticalOptions critical;
  const PolicyParams* params = nullptr;  // required for kDrl / kEnero
  std::string scenario = "run";
  std::string out_dir;  // when set: configs and per-run traces are written
};

/// Optimizes one instance from the OSPF starting point with the chosen
/// method; fills a result row and appends trajectory points.
ScenarioResult run_instance(const Topology& t, const TrafficMatrix& tm,
                            int tm_id, int k_failures, const RunnerOptions& opt,
                            std::vector<SeriesPoint>* series = nullptr);

struct DynamicTmResult {
  std::vector<ScenarioResult> results;
  std::vector<SeriesPoint> series;
};

/// Dynamic-TM scenario: the whole TM changes `tms.size()` times and every
/// instance is re-optimized from scratch.
DynamicTmResult run_dynamic_tm(const Topology& t,
                               const std::vector<TrafficMatrix>& tms,
                               const RunnerOptions& opt);

struct SweepOptions {
  std::vector<Method> methods{Method::kOspf, Method::kSap, Method::kLs,
                              Method::kEnero};
  SearchBudget ls_budget{60.0, -1};
  CriticalOptions critical;
  const PolicyParams* params = nullptr;
  int tms_per_topology = 5;
  double target_maxu = 1.1;  // TM scale calibration target
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct SweepResult {
  std::vector<ScenarioResult> rows;
  /// final maxU divided by the LS baseline's, per (topology, tm, method).
  struct Relative {
    std::string topology;
    int tm_id;
    std::string method;
    double ratio;
  };
  std::vector<Relative> relative;
};

/// Runs every method over every topology file (*.topo, *.graphml) in the
/// dataset directory. TMs come from sibling `<name>.tm<i>` files when
/// present, otherwise they are generated with a calibrated scale.
/// Per-instance failures are isolated: the row records NaN and the sweep
/// continues.
SweepResult run_sweep(const std::string& dataset_dir, const SweepOptions& opt);

}  // namespace enero

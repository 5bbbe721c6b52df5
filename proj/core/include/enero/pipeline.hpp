#pragma once

#include <cstdint>
#include <string>

#include "enero/checkpoint.hpp"
#include "enero/ppo.hpp"
#include "enero/search.hpp"

namespace enero {

struct EneroConfig {
  std::string checkpoint_path;
  double critical_fraction = 0.15;
  int top_links = 5;
  double ls_budget_seconds = 10.0;
  long ls_max_iterations = -1;
  std::uint64_t seed = 1;
  std::string out_dir;

  /// Stage 1 normally runs one greedy episode; optionally sample several
  /// stochastic rollouts and keep the best.
  bool stochastic_stage1 = false;
  int stage1_rollouts = 4;

  CriticalOptions critical_options() const {
    return CriticalOptions{critical_fraction, top_links};
  }
};

/// Result of one two-stage optimization. The three utilizations are each
/// recomputed from their configuration, and are non-increasing in stage
/// order by construction.
struct OptimizationReport {
  double initial_maxu = 0.0;
  double post_drl_maxu = 0.0;
  double post_ls_maxu = 0.0;
  double drl_wall_ms = 0.0;
  double ls_wall_ms = 0.0;
  RoutingConfig final_config;
  RoutingConfig post_drl_config;
  bool drl_failed = false;  // stage degraded to its input
  bool ls_failed = false;
  std::vector<StepTraceRow> drl_trace;
  std::vector<IterationTraceRow> ls_trace;

  std::string to_text() const;
};

/// Stage 1: greedy evaluation episode, best configuration kept (never worse
/// than the initial OSPF routing). Stage 2: hill climbing from that
/// configuration over a freshly selected critical set. A stage failure
/// degrades the report to the last valid stage output.
OptimizationReport enero_optimize(const Topology& t, const TrafficMatrix& tm,
                                  const PolicyParams& params,
                                  const EneroConfig& cfg);

/// Loads the checkpoint first; throws CheckpointError when it is missing or
/// corrupt.
OptimizationReport enero_optimize(const Topology& t, const TrafficMatrix& tm,
                                  const EneroConfig& cfg);

/// Flat key-value config file (`key = value`, '#' comments) mirroring the
/// training hyperparameter names.
struct KeyValueConfig {
  std::vector<std::pair<std::string, std::string>> entries;

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
};

KeyValueConfig parse_key_value_config(const std::string& text);
KeyValueConfig load_key_value_config(const std::string& path);

/// Applies recognized keys onto the two config structs.
void apply_config(const KeyValueConfig& kv, TrainConfig* train, EneroConfig* enero);

}  // namespace enero

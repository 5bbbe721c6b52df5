#include "enero/env.hpp"

#include <sstream>

#include "enero/error.hpp"

namespace enero {

Env::Env(const Topology& t, const TrafficMatrix& tm, const EnvOptions& options)
    : topology_(t),
      paths_(t),
      tm_(tm),
      config_(RoutingConfig::all_direct(t.num_nodes())),
      link_state_(apply_routing(topology_, paths_, tm_, config_)),
      critical_(select_critical(topology_, paths_, tm_, config_, options.critical)),
      best_config_(config_),
      best_maxu_(max_utilization(link_state_)),
      initial_maxu_(best_maxu_) {}

std::vector<Midpoint> Env::candidate_midpoints() const {
  const Demand* d = current_demand();
  if (d == nullptr) return {};
  std::vector<Midpoint> out;
  out.reserve(static_cast<size_t>(topology_.num_nodes()) - 1);
  out.push_back(Midpoint::direct());
  for (NodeId m = 0; m < topology_.num_nodes(); ++m) {
    if (m != d->src && m != d->dst) out.push_back(Midpoint::via(m));
  }
  return out;
}

ActionGraph Env::action_graph(Midpoint mid) const {
  const Demand* d = current_demand();
  if (d == nullptr) throw InvalidActionError("episode is done");
  if (!mid.is_direct() && (mid.node() == d->src || mid.node() == d->dst ||
                           mid.node() < 0 || mid.node() >= topology_.num_nodes())) {
    throw InvalidActionError("illegal midpoint for current demand");
  }

  const int L = topology_.num_links();
  ActionGraph g;
  g.num_links = L;
  g.features.assign(static_cast<size_t>(L) * ActionGraph::kNumFeatures, 0.0);

  // Lift the current demand off its present path before scoring candidates.
  const int k = demand_index(topology_.num_nodes(), d->src, d->dst);
  std::vector<double> lifted(static_cast<size_t>(L));
  for (LinkId l = 0; l < L; ++l) lifted[static_cast<size_t>(l)] = link_state_.load(l);
  for (LinkId l : sr_path(paths_, *d, config_.midpoint_at(k))) {
    lifted[static_cast<size_t>(l)] -= d->bandwidth;
  }

  const double max_cap = topology_.max_capacity();
  for (LinkId l = 0; l < L; ++l) {
    const double cap = link_state_.capacity(l);
    g.features[static_cast<size_t>(l) * 4 + 0] = lifted[static_cast<size_t>(l)] / cap;
    g.features[static_cast<size_t>(l) * 4 + 1] = cap / max_cap;
  }
  for (LinkId l : sr_path(paths_, *d, mid)) {
    g.features[static_cast<size_t>(l) * 4 + 2] = 1.0;
    g.features[static_cast<size_t>(l) * 4 + 3] =
        d->bandwidth / link_state_.capacity(l);
  }
  return g;
}

std::vector<std::pair<Midpoint, ActionGraph>> Env::candidate_actions() const {
  std::vector<std::pair<Midpoint, ActionGraph>> out;
  for (Midpoint m : candidate_midpoints()) {
    out.emplace_back(m, action_graph(m));
  }
  return out;
}

ActionGraph Env::state_graph() const {
  const int L = topology_.num_links();
  ActionGraph g;
  g.num_links = L;
  g.features.assign(static_cast<size_t>(L) * ActionGraph::kNumFeatures, 0.0);
  const double max_cap = topology_.max_capacity();
  for (LinkId l = 0; l < L; ++l) {
    g.features[static_cast<size_t>(l) * 4 + 0] = link_state_.utilization(l);
    g.features[static_cast<size_t>(l) * 4 + 1] =
        link_state_.capacity(l) / max_cap;
  }
  return g;
}

StepResult Env::step(Midpoint mid) {
  const Demand* d = current_demand();
  if (d == nullptr) throw InvalidActionError("episode is done");
  if (!mid.is_direct() && (mid.node() == d->src || mid.node() == d->dst ||
                           mid.node() < 0 || mid.node() >= topology_.num_nodes())) {
    throw InvalidActionError("illegal midpoint for current demand");
  }

  const int k = demand_index(topology_.num_nodes(), d->src, d->dst);
  const LinkPath old_path = sr_path(paths_, *d, config_.midpoint_at(k));
  const LinkPath new_path = sr_path(paths_, *d, mid);

  const double before = max_utilization(link_state_);
  move_in_place(link_state_, d->bandwidth, old_path, new_path);
  config_.set_midpoint(d->src, d->dst, mid);
  const double after = max_utilization(link_state_);

  // The margin keeps the tracked best strictly below the initial routing
  // even after a from-scratch re-accumulation of its config.
  if (after < best_maxu_ - 1e-12 * (1.0 + best_maxu_)) {
    best_maxu_ = after;
    best_config_ = config_;
  }

  StepResult result;
  result.reward = before - after;
  trace_.push_back({*d, mid, result.reward, after});

  ++cursor_;
  result.done = done();
  if (!result.done) result.next_demand = critical_.demands[cursor_];
  return result;
}

std::string trace_to_csv(const std::vector<StepTraceRow>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "src,dst,bandwidth,midpoint,reward,max_utilization\n";
  for (const StepTraceRow& row : trace) {
    out << row.demand.src << "," << row.demand.dst << "," << row.demand.bandwidth
        << "," << row.midpoint.raw() << "," << row.reward << ","
        << row.max_utilization << "\n";
  }
  return out.str();
}

}  // namespace enero

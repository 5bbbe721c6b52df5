#include "enero/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "enero/error.hpp"

namespace enero {

namespace {
// Moves must beat the incumbent by more than accumulated float noise, so a
// recompute of the final configuration can never come out worse.
constexpr double kImproveEps = 1e-12;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}
}  // namespace

HillClimbResult hill_climb(const Topology& t, const PathTable& paths,
                           const TrafficMatrix& tm, const RoutingConfig& start,
                           const CriticalSet& critical, const SearchBudget& budget,
                           const HillClimbOptions& options) {
  if (start.num_nodes() != t.num_nodes()) {
    throw ShapeError("hill_climb: config does not cover the topology");
  }
  const auto t0 = Clock::now();

  HillClimbResult result;
  result.config = start;
  LinkState ls = apply_routing(t, paths, tm, result.config);
  result.maxu = max_utilization(ls);

  CriticalSet active = critical;
  const int n = t.num_nodes();

  auto out_of_budget = [&]() {
    if (budget.max_iterations >= 0 && result.iterations >= budget.max_iterations) {
      return true;
    }
    if (budget.wall_seconds >= 0.0 &&
        elapsed_ms(t0) >= budget.wall_seconds * 1000.0) {
      return true;
    }
    return false;
  };

  while (!out_of_budget()) {
    // Scan every (critical demand, midpoint) move; keep the strictly best.
    // Scanning demands in set order and midpoints ascending makes ties
    // resolve to the lower demand index, then the lower midpoint id.
    bool found = false;
    Move best{};
    best.resulting_maxu = std::numeric_limits<double>::infinity();
    LinkPath best_new_path;

    for (const Demand& d : active.demands) {
      if (d.bandwidth == 0.0) continue;
      const Midpoint current = result.config.midpoint(d.src, d.dst);
      const LinkPath old_path = sr_path(paths, d, current);

      auto consider = [&](Midpoint m) {
        if (m == current) return;
        const LinkPath new_path = sr_path(paths, d, m);
        const double maxu =
            peek_move_max_utilization(ls, d.bandwidth, old_path, new_path);
        if (maxu < best.resulting_maxu) {
          best = Move{d, m, maxu};
          best_new_path = new_path;
          found = true;
        }
      };

      consider(Midpoint::direct());
      for (NodeId m = 0; m < n; ++m) {
        if (m != d.src && m != d.dst) consider(Midpoint::via(m));
      }
    }

    if (!found ||
        best.resulting_maxu >= result.maxu - kImproveEps * (1.0 + result.maxu)) {
      result.local_optimum = true;
      break;
    }

    const LinkPath old_path = sr_path(
        paths, best.demand, result.config.midpoint(best.demand.src, best.demand.dst));
    move_in_place(ls, best.demand.bandwidth, old_path, best_new_path);
    result.config.set_midpoint(best.demand.src, best.demand.dst, best.new_midpoint);
    result.maxu = max_utilization(ls);
    ++result.iterations;
    result.trace.push_back({result.iterations, best.demand, best.new_midpoint,
                            result.maxu, elapsed_ms(t0)});

    if (options.reselect_critical) {
      active = select_critical(t, paths, tm, result.config, options.critical);
    }
  }

  return result;
}

std::string iteration_trace_to_csv(const std::vector<IterationTraceRow>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,src,dst,midpoint,max_utilization,elapsed_ms\n";
  for (const IterationTraceRow& row : trace) {
    out << row.iteration << "," << row.demand.src << "," << row.demand.dst << ","
        << row.midpoint.raw() << "," << row.max_utilization << ","
        << row.elapsed_ms << "\n";
  }
  return out.str();
}

LinkPath widest_path(const Topology& t, const LinkState& ls, NodeId src,
                     NodeId dst) {
  const int n = t.num_nodes();
  const double kInf = std::numeric_limits<double>::infinity();

  // Widest bottleneck from every node to dst, over reversed links. Residuals
  // are compared, never combined, so the labels are exact.
  std::vector<double> bottleneck(static_cast<size_t>(n), -kInf);
  bottleneck[static_cast<size_t>(dst)] = kInf;
  std::priority_queue<std::pair<double, NodeId>> pq;
  pq.push({kInf, dst});
  while (!pq.empty()) {
    auto [b, v] = pq.top();
    pq.pop();
    if (b < bottleneck[static_cast<size_t>(v)]) continue;
    for (LinkId lid : t.in_links(v)) {
      const Link& l = t.link(lid);
      const double residual = l.capacity - ls.load(lid);
      const double nb = std::min(b, residual);
      if (nb > bottleneck[static_cast<size_t>(l.tail)]) {
        bottleneck[static_cast<size_t>(l.tail)] = nb;
        pq.push({nb, l.tail});
      }
    }
  }
  const double target = bottleneck[static_cast<size_t>(src)];

  // Fewest hops to dst restricted to links with residual >= target.
  std::vector<int> hops(static_cast<size_t>(n), -1);
  std::queue<NodeId> q;
  hops[static_cast<size_t>(dst)] = 0;
  q.push(dst);
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    for (LinkId lid : t.in_links(v)) {
      const Link& l = t.link(lid);
      if (l.capacity - ls.load(lid) < target) continue;
      if (hops[static_cast<size_t>(l.tail)] < 0) {
        hops[static_cast<size_t>(l.tail)] = hops[static_cast<size_t>(v)] + 1;
        q.push(l.tail);
      }
    }
  }

  // Greedy lexicographic walk along hop-optimal restricted links.
  LinkPath path;
  NodeId u = src;
  while (u != dst) {
    NodeId best = -1;
    LinkId best_link = -1;
    for (LinkId lid : t.out_links(u)) {
      const Link& l = t.link(lid);
      if (l.capacity - ls.load(lid) < target) continue;
      if (hops[static_cast<size_t>(l.head)] != hops[static_cast<size_t>(u)] - 1) {
        continue;
      }
      if (best < 0 || l.head < best) {
        best = l.head;
        best_link = lid;
      }
    }
    if (best < 0) throw Error("widest-path walk stuck; labels inconsistent");
    path.push_back(best_link);
    u = best;
  }
  return path;
}

SapResult sap_route(const Topology& t, const TrafficMatrix& tm) {
  if (tm.num_nodes() != t.num_nodes()) {
    throw ShapeError("sap_route: TM does not match topology");
  }
  SapResult result;
  result.paths.resize(static_cast<size_t>(tm.num_demands()));
  LinkState ls(t);

  for (const Demand& d : order_by_bandwidth(tm)) {
    LinkPath path = widest_path(t, ls, d.src, d.dst);
    for (LinkId lid : path) ls.add_load(lid, d.bandwidth);
    result.paths[static_cast<size_t>(demand_index(t.num_nodes(), d.src, d.dst))] =
        std::move(path);
  }
  result.maxu = max_utilization(ls);
  return result;
}

LsBaselineResult ls_baseline(const Topology& t, const PathTable& paths,
                             const TrafficMatrix& tm, const SearchBudget& budget,
                             const CriticalOptions& critical) {
  LsBaselineResult result;
  RoutingConfig start = RoutingConfig::all_direct(t.num_nodes());
  result.initial_maxu = max_utilization(apply_routing(t, paths, tm, start));
  CriticalSet set = select_critical(t, paths, tm, start, critical);
  result.detail = hill_climb(t, paths, tm, start, set, budget,
                             HillClimbOptions{false, critical});
  result.config = result.detail.config;
  result.maxu = result.detail.maxu;
  return result;
}

}  // namespace enero

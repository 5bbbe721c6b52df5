#include "enero/critical.hpp"

#include <algorithm>
#include <cmath>

#include "enero/error.hpp"

namespace enero {

CriticalSet select_critical(const Topology& t, const PathTable& paths,
                            const TrafficMatrix& tm, const RoutingConfig& cfg,
                            const CriticalOptions& options) {
  if (options.fraction <= 0.0 || options.fraction > 1.0) {
    throw ValidationError("critical fraction must be in (0, 1]");
  }
  if (options.top_links < 1) throw ValidationError("top_links must be >= 1");

  const int total = tm.num_demands();
  const int quota = static_cast<int>(
      std::lround(options.fraction * static_cast<double>(total)));

  LinkState ls = apply_routing(t, paths, tm, cfg);

  // Links by decreasing utilization, ties by id for determinism.
  std::vector<LinkId> links(static_cast<size_t>(t.num_links()));
  for (int i = 0; i < t.num_links(); ++i) links[static_cast<size_t>(i)] = i;
  std::sort(links.begin(), links.end(), [&](LinkId a, LinkId b) {
    double ua = ls.utilization(a), ub = ls.utilization(b);
    if (ua != ub) return ua > ub;
    return a < b;
  });

  // Which links each demand's current path crosses.
  std::vector<std::vector<char>> crosses(
      static_cast<size_t>(total), std::vector<char>(static_cast<size_t>(t.num_links()), 0));
  for (int k = 0; k < total; ++k) {
    Demand d = tm.demand_at(k);
    for (LinkId lid : sr_path(paths, d, cfg.midpoint_at(k))) {
      crosses[static_cast<size_t>(k)][static_cast<size_t>(lid)] = 1;
    }
  }

  // Links tied with the last one inside the cut count as equally loaded and
  // join it, so a uniform state degenerates to the global bandwidth order.
  auto extend_ties = [&](int cut) {
    while (cut < t.num_links() &&
           ls.utilization(links[static_cast<size_t>(cut)]) ==
               ls.utilization(links[static_cast<size_t>(cut - 1)])) {
      ++cut;
    }
    return cut;
  };

  CriticalSet out;
  std::vector<char> taken(static_cast<size_t>(total), 0);
  int considered = std::min(options.top_links, t.num_links());
  considered = extend_ties(considered);
  while (static_cast<int>(out.demands.size()) < quota) {
    considered = std::min(considered, t.num_links());
    // Candidates crossing any of the first `considered` loaded links.
    std::vector<Demand> candidates;
    for (int k = 0; k < total; ++k) {
      if (taken[static_cast<size_t>(k)]) continue;
      for (int j = 0; j < considered; ++j) {
        if (crosses[static_cast<size_t>(k)][static_cast<size_t>(links[static_cast<size_t>(j)])]) {
          candidates.push_back(tm.demand_at(k));
          break;
        }
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Demand& a, const Demand& b) {
                if (a.bandwidth != b.bandwidth) return a.bandwidth > b.bandwidth;
                if (a.src != b.src) return a.src < b.src;
                return a.dst < b.dst;
              });
    for (const Demand& d : candidates) {
      if (static_cast<int>(out.demands.size()) >= quota) break;
      out.demands.push_back(d);
      taken[static_cast<size_t>(demand_index(tm.num_nodes(), d.src, d.dst))] = 1;
    }
    if (considered >= t.num_links()) break;  // every demand already reachable
    considered = extend_ties(considered + 1);
  }

  // Final ordering is by bandwidth across the whole set, not per wave.
  std::sort(out.demands.begin(), out.demands.end(),
            [](const Demand& a, const Demand& b) {
              if (a.bandwidth != b.bandwidth) return a.bandwidth > b.bandwidth;
              if (a.src != b.src) return a.src < b.src;
              return a.dst < b.dst;
            });
  return out;
}

double calibrate_scale(const Topology& t, double target_maxu, std::uint64_t seed,
                       int samples) {
  if (target_maxu <= 0.0) throw ValidationError("target max utilization must be positive");
  PathTable paths(t);
  RoutingConfig direct = RoutingConfig::all_direct(t.num_nodes());
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    TrafficMatrix tm = generate_tm(t, seed + static_cast<std::uint64_t>(i), 1.0);
    sum += max_utilization(apply_routing(t, paths, tm, direct));
  }
  const double mean_unit_maxu = sum / samples;
  return target_maxu / mean_unit_maxu;
}

}  // namespace enero

#include "support/oracles.hpp"

#include <algorithm>
#include <limits>

namespace enero::testing {

namespace {

void dfs_paths(const Topology& t, NodeId current, NodeId dst,
               std::vector<NodeId>& stack, std::vector<char>& visited,
               std::vector<std::vector<NodeId>>& out) {
  if (current == dst) {
    out.push_back(stack);
    return;
  }
  for (LinkId lid : t.out_links(current)) {
    NodeId next = t.link(lid).head;
    if (visited[static_cast<size_t>(next)]) continue;
    visited[static_cast<size_t>(next)] = 1;
    stack.push_back(next);
    dfs_paths(t, next, dst, stack, visited, out);
    stack.pop_back();
    visited[static_cast<size_t>(next)] = 0;
  }
}

}  // namespace

std::vector<std::vector<NodeId>> all_simple_paths(const Topology& t, NodeId src,
                                                  NodeId dst) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> stack{src};
  std::vector<char> visited(static_cast<size_t>(t.num_nodes()), 0);
  visited[static_cast<size_t>(src)] = 1;
  dfs_paths(t, src, dst, stack, visited, out);
  return out;
}

double path_weight(const Topology& t, const std::vector<NodeId>& nodes) {
  double w = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    w += t.link(*t.find_link(nodes[i], nodes[i + 1])).ospf_weight;
  }
  return w;
}

LinkPath nodes_to_links(const Topology& t, const std::vector<NodeId>& nodes) {
  LinkPath path;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    path.push_back(*t.find_link(nodes[i], nodes[i + 1]));
  }
  return path;
}

std::vector<NodeId> brute_force_shortest_path(const Topology& t, NodeId src,
                                              NodeId dst) {
  auto paths = all_simple_paths(t, src, dst);
  double best_w = std::numeric_limits<double>::infinity();
  for (const auto& p : paths) best_w = std::min(best_w, path_weight(t, p));
  std::vector<std::vector<NodeId>> shortest;
  for (const auto& p : paths) {
    if (path_weight(t, p) <= best_w + 1e-9 * (1.0 + best_w)) shortest.push_back(p);
  }
  return *std::min_element(shortest.begin(), shortest.end());
}

std::vector<double> brute_force_edge_betweenness(const Topology& t) {
  const int n = t.num_nodes();
  auto edges = t.undirected_edges();
  std::vector<double> score(edges.size(), 0.0);

  for (NodeId s = 0; s < n; ++s) {
    for (NodeId d = s + 1; d < n; ++d) {
      auto paths = all_simple_paths(t, s, d);
      size_t best_len = std::numeric_limits<size_t>::max();
      for (const auto& p : paths) best_len = std::min(best_len, p.size());
      std::vector<std::vector<NodeId>> shortest;
      for (const auto& p : paths) {
        if (p.size() == best_len) shortest.push_back(p);
      }
      for (size_t e = 0; e < edges.size(); ++e) {
        auto [u, v] = edges[e];
        int crossing = 0;
        for (const auto& p : shortest) {
          for (size_t i = 0; i + 1 < p.size(); ++i) {
            if ((p[i] == u && p[i + 1] == v) || (p[i] == v && p[i + 1] == u)) {
              ++crossing;
              break;
            }
          }
        }
        score[e] += static_cast<double>(crossing) /
                    static_cast<double>(shortest.size());
      }
    }
  }
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  for (double& v : score) v /= pairs;
  return score;
}

std::vector<double> accumulate_loads(const Topology& t, const TrafficMatrix& tm,
                                     const std::vector<LinkPath>& demand_paths) {
  std::vector<double> load(static_cast<size_t>(t.num_links()), 0.0);
  for (int k = 0; k < tm.num_demands(); ++k) {
    for (LinkId lid : demand_paths[static_cast<size_t>(k)]) {
      load[static_cast<size_t>(lid)] += tm.at_index(k);
    }
  }
  return load;
}

BruteForceOptimum brute_force_optimum(const Topology& t, const PathTable& paths,
                                      const TrafficMatrix& tm) {
  const int n = t.num_nodes();
  const int demands = tm.num_demands();

  // Per demand: DIRECT plus every legal midpoint.
  std::vector<std::vector<Midpoint>> options(static_cast<size_t>(demands));
  for (int k = 0; k < demands; ++k) {
    Demand d = tm.demand_at(k);
    options[static_cast<size_t>(k)].push_back(Midpoint::direct());
    for (NodeId m = 0; m < n; ++m) {
      if (m != d.src && m != d.dst) {
        options[static_cast<size_t>(k)].push_back(Midpoint::via(m));
      }
    }
  }

  BruteForceOptimum best;
  best.maxu = std::numeric_limits<double>::infinity();
  std::vector<size_t> choice(static_cast<size_t>(demands), 0);

  while (true) {
    RoutingConfig cfg(n);
    for (int k = 0; k < demands; ++k) {
      Demand d = tm.demand_at(k);
      cfg.set_midpoint(d.src, d.dst,
                       options[static_cast<size_t>(k)][choice[static_cast<size_t>(k)]]);
    }
    const double maxu = max_utilization(apply_routing(t, paths, tm, cfg));
    if (maxu < best.maxu) {
      best.maxu = maxu;
      best.config = cfg;
    }

    // Odometer increment.
    int pos = 0;
    while (pos < demands) {
      if (++choice[static_cast<size_t>(pos)] <
          options[static_cast<size_t>(pos)].size()) {
        break;
      }
      choice[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == demands) break;
  }
  return best;
}

double brute_force_widest_bottleneck(const Topology& t, const LinkState& ls,
                                     NodeId src, NodeId dst) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& nodes : all_simple_paths(t, src, dst)) {
    double bottleneck = std::numeric_limits<double>::infinity();
    for (LinkId lid : nodes_to_links(t, nodes)) {
      bottleneck = std::min(bottleneck, t.link(lid).capacity - ls.load(lid));
    }
    best = std::max(best, bottleneck);
  }
  return best;
}

}  // namespace enero::testing

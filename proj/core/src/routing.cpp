#include "enero/routing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "enero/error.hpp"

namespace enero {

namespace {
// Relative slack when testing whether a link lies on a minimum-weight path;
// float sums of the same path taken in different orders may differ by ulps.
constexpr double kDistEps = 1e-9;

bool on_shortest_path(double via, double direct) {
  return via <= direct + kDistEps * (1.0 + std::abs(direct));
}
}  // namespace

PathTable::PathTable(const Topology& t) : n_(t.num_nodes()) {
  const size_t n = static_cast<size_t>(n_);
  dist_.assign(n * n, std::numeric_limits<double>::infinity());
  paths_.resize(n * n);

  // Dijkstra from every source.
  for (NodeId s = 0; s < n_; ++s) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::priority_queue<std::pair<double, NodeId>,
                        std::vector<std::pair<double, NodeId>>,
                        std::greater<>> pq;
    dist[static_cast<size_t>(s)] = 0.0;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[static_cast<size_t>(u)]) continue;
      for (LinkId lid : t.out_links(u)) {
        const Link& l = t.link(lid);
        double nd = d + l.ospf_weight;
        if (nd < dist[static_cast<size_t>(l.head)]) {
          dist[static_cast<size_t>(l.head)] = nd;
          pq.push({nd, l.head});
        }
      }
    }
    for (NodeId v = 0; v < n_; ++v) {
      dist_[static_cast<size_t>(s) * n + static_cast<size_t>(v)] =
          dist[static_cast<size_t>(v)];
    }
  }

  // Lexicographically-smallest shortest path per pair: walk greedily,
  // always taking the smallest next node that stays on a shortest path.
  for (NodeId s = 0; s < n_; ++s) {
    for (NodeId d = 0; d < n_; ++d) {
      if (s == d) continue;
      LinkPath& path = paths_[static_cast<size_t>(s) * n + static_cast<size_t>(d)];
      NodeId u = s;
      while (u != d) {
        NodeId best = -1;
        LinkId best_link = -1;
        for (LinkId lid : t.out_links(u)) {
          const Link& l = t.link(lid);
          if (!on_shortest_path(l.ospf_weight + distance(l.head, d), distance(u, d))) {
            continue;
          }
          if (best < 0 || l.head < best) {
            best = l.head;
            best_link = lid;
          }
        }
        if (best < 0) throw Error("shortest-path walk stuck; graph inconsistent");
        path.push_back(best_link);
        u = best;
      }
    }
  }
}

const LinkPath& PathTable::path(NodeId src, NodeId dst) const {
  if (src == dst) throw ValidationError("path requested with src == dst");
  return paths_[static_cast<size_t>(src) * static_cast<size_t>(n_) +
                static_cast<size_t>(dst)];
}

double PathTable::distance(NodeId src, NodeId dst) const {
  return dist_[static_cast<size_t>(src) * static_cast<size_t>(n_) +
               static_cast<size_t>(dst)];
}

LinkPath ospf_path(const Topology& t, NodeId src, NodeId dst) {
  PathTable table(t);
  return table.path(src, dst);
}

LinkPath sr_path(const PathTable& paths, const Demand& d, Midpoint mid) {
  if (mid.is_direct()) return paths.path(d.src, d.dst);
  if (mid.node() == d.src || mid.node() == d.dst) {
    throw InvalidActionError("midpoint " + std::to_string(mid.node()) +
                             " equals demand endpoint");
  }
  const LinkPath& a = paths.path(d.src, mid.node());
  const LinkPath& b = paths.path(mid.node(), d.dst);
  LinkPath out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void RoutingConfig::set_midpoint(NodeId src, NodeId dst, Midpoint mid) {
  if (!mid.is_direct() && (mid.node() == src || mid.node() == dst)) {
    throw InvalidActionError("midpoint equals demand endpoint");
  }
  if (!mid.is_direct() && (mid.node() < 0 || mid.node() >= n_)) {
    throw InvalidActionError("midpoint out of range");
  }
  mid_[static_cast<size_t>(demand_index(n_, src, dst))] = mid;
}

std::string routing_config_to_text(const RoutingConfig& cfg) {
  std::ostringstream out;
  out << "src,dst,midpoint\n";
  const int n = cfg.num_nodes();
  for (int k = 0; k < cfg.num_demands(); ++k) {
    NodeId s, d;
    demand_pair(n, k, &s, &d);
    out << s << "," << d << "," << cfg.midpoint_at(k).raw() << "\n";
  }
  return out.str();
}

RoutingConfig parse_routing_config(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::array<long, 3>> rows;
  long max_node = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "src,dst,midpoint") continue;
    std::array<long, 3> row{};
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> row[0] >> c1 >> row[1] >> c2 >> row[2]) || c1 != ',' || c2 != ',') {
      throw ParseError("expected 'src,dst,midpoint'", line_no);
    }
    max_node = std::max({max_node, row[0], row[1]});
    rows.push_back(row);
  }
  const int n = static_cast<int>(max_node + 1);
  if (n < 2 || static_cast<int>(rows.size()) != demand_count(n)) {
    throw ParseError("routing config does not cover all n*(n-1) demands");
  }
  RoutingConfig cfg(n);
  for (const auto& row : rows) {
    cfg.set_midpoint(static_cast<NodeId>(row[0]), static_cast<NodeId>(row[1]),
                     Midpoint::from_raw(static_cast<std::int32_t>(row[2])));
  }
  return cfg;
}

RoutingConfig load_routing_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open routing config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_routing_config(ss.str());
}

void save_routing_config_file(const RoutingConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write routing config: " + path);
  out << routing_config_to_text(cfg);
}

LinkState::LinkState(const Topology& t) {
  load_.assign(static_cast<size_t>(t.num_links()), 0.0);
  capacity_.resize(static_cast<size_t>(t.num_links()));
  for (int i = 0; i < t.num_links(); ++i) {
    capacity_[static_cast<size_t>(i)] = t.link(i).capacity;
  }
}

LinkState apply_routing(const Topology& t, const PathTable& paths,
                        const TrafficMatrix& tm, const RoutingConfig& cfg) {
  if (tm.num_nodes() != t.num_nodes() || cfg.num_nodes() != t.num_nodes()) {
    throw ShapeError("topology, TM and config node counts differ");
  }
  LinkState ls(t);
  for (int k = 0; k < tm.num_demands(); ++k) {
    Demand d = tm.demand_at(k);
    if (d.bandwidth == 0.0) continue;
    for (LinkId lid : sr_path(paths, d, cfg.midpoint_at(k))) {
      ls.add_load(lid, d.bandwidth);
    }
  }
  return ls;
}

LinkState apply_routing(const Topology& t, const TrafficMatrix& tm,
                        const RoutingConfig& cfg) {
  PathTable paths(t);
  return apply_routing(t, paths, tm, cfg);
}

double max_utilization(const LinkState& ls) {
  double best = 0.0;
  for (int i = 0; i < ls.num_links(); ++i) {
    best = std::max(best, ls.utilization(i));
  }
  return best;
}

LinkState incremental_move(const LinkState& ls, const Demand& d,
                           const LinkPath& old_path, const LinkPath& new_path) {
  LinkState out = ls;
  move_in_place(out, d.bandwidth, old_path, new_path);
  return out;
}

void move_in_place(LinkState& ls, double bandwidth, const LinkPath& old_path,
                   const LinkPath& new_path) {
  if (bandwidth == 0.0) return;
  for (LinkId lid : old_path) ls.add_load(lid, -bandwidth);
  for (LinkId lid : new_path) ls.add_load(lid, bandwidth);
}

double peek_move_max_utilization(LinkState& ls, double bandwidth,
                                 const LinkPath& old_path,
                                 const LinkPath& new_path) {
  // Save-and-restore keeps the state bit-exact across thousands of peeks.
  std::vector<std::pair<LinkId, double>> saved;
  saved.reserve(old_path.size() + new_path.size());
  auto remember = [&](LinkId lid) {
    for (const auto& [id, _] : saved) {
      if (id == lid) return;
    }
    saved.emplace_back(lid, ls.load(lid));
  };
  for (LinkId lid : old_path) remember(lid);
  for (LinkId lid : new_path) remember(lid);

  move_in_place(ls, bandwidth, old_path, new_path);
  double result = max_utilization(ls);
  for (const auto& [id, value] : saved) ls.set_load(id, value);
  return result;
}

}  // namespace enero

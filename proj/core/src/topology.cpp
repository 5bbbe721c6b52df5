#include "enero/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>

#include "enero/error.hpp"

namespace enero {

std::optional<LinkId> Topology::find_link(NodeId u, NodeId v) const {
  auto it = link_index_.find({u, v});
  if (it == link_index_.end()) return std::nullopt;
  return it->second;
}

LinkId Topology::link_between(NodeId u, NodeId v) const {
  auto id = find_link(u, v);
  if (!id) {
    throw NotFoundError("no link between nodes " + std::to_string(u) + " and " +
                        std::to_string(v));
  }
  return *id;
}

std::vector<std::pair<NodeId, NodeId>> Topology::undirected_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const Link& l : links_) {
    if (l.tail < l.head) out.emplace_back(l.tail, l.head);
  }
  return out;
}

void TopologyBuilder::set_num_nodes(int n) { num_nodes_ = n; }

void TopologyBuilder::set_node_label(NodeId id, std::string label) {
  labels_[id] = std::move(label);
}

void TopologyBuilder::add_edge(NodeId u, NodeId v, double capacity,
                               double weight) {
  edges_.push_back({u, v, capacity, weight});
}

namespace {

bool connected_bfs(int n, const std::vector<std::vector<NodeId>>& adj) {
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId v : adj[static_cast<size_t>(u)]) {
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n;
}

}  // namespace

Topology TopologyBuilder::build(const TopologyLimits& limits) const {
  if (num_nodes_ < 2) {
    throw ValidationError("topology needs at least 2 nodes");
  }
  if (num_nodes_ > limits.max_nodes) {
    throw ValidationError("topology has " + std::to_string(num_nodes_) +
                          " nodes, limit is " + std::to_string(limits.max_nodes));
  }

  // Aggregate parallel edges: capacities sum, smallest weight wins.
  std::map<std::pair<NodeId, NodeId>, std::pair<double, double>> agg;
  for (const Edge& e : edges_) {
    if (e.u == e.v) throw ValidationError("self-loop on node " + std::to_string(e.u));
    if (e.u < 0 || e.u >= num_nodes_ || e.v < 0 || e.v >= num_nodes_) {
      throw ValidationError("edge endpoint out of range: " + std::to_string(e.u) +
                            " " + std::to_string(e.v));
    }
    if (e.capacity <= 0.0) {
      throw ValidationError("nonpositive capacity on edge " + std::to_string(e.u) +
                            "-" + std::to_string(e.v));
    }
    if (e.weight <= 0.0) {
      throw ValidationError("nonpositive weight on edge " + std::to_string(e.u) +
                            "-" + std::to_string(e.v));
    }
    auto key = std::minmax(e.u, e.v);
    auto [it, inserted] = agg.try_emplace({key.first, key.second},
                                          std::make_pair(e.capacity, e.weight));
    if (!inserted) {
      it->second.first += e.capacity;
      it->second.second = std::min(it->second.second, e.weight);
    }
  }
  if (agg.empty()) throw ValidationError("topology has no edges");
  if (static_cast<int>(agg.size()) > limits.max_undirected_edges) {
    throw ValidationError("topology has " + std::to_string(agg.size()) +
                          " edges, limit is " +
                          std::to_string(limits.max_undirected_edges));
  }

  Topology t;
  t.nodes_.resize(static_cast<size_t>(num_nodes_));
  for (int i = 0; i < num_nodes_; ++i) {
    t.nodes_[static_cast<size_t>(i)].id = i;
    auto it = labels_.find(i);
    if (it != labels_.end()) t.nodes_[static_cast<size_t>(i)].label = it->second;
  }
  t.out_links_.resize(static_cast<size_t>(num_nodes_));
  t.in_links_.resize(static_cast<size_t>(num_nodes_));

  for (const auto& [pair, cw] : agg) {
    for (auto [a, b] : {std::pair{pair.first, pair.second},
                        std::pair{pair.second, pair.first}}) {
      LinkId id = static_cast<LinkId>(t.links_.size());
      t.links_.push_back({a, b, cw.first, cw.second});
      t.link_index_[{a, b}] = id;
      t.out_links_[static_cast<size_t>(a)].push_back(id);
      t.in_links_[static_cast<size_t>(b)].push_back(id);
      t.max_capacity_ = std::max(t.max_capacity_, cw.first);
    }
  }

  std::vector<std::vector<NodeId>> adj(static_cast<size_t>(num_nodes_));
  for (const Link& l : t.links_) adj[static_cast<size_t>(l.tail)].push_back(l.head);
  if (!connected_bfs(num_nodes_, adj)) {
    throw ConnectivityError("topology is not connected");
  }
  return t;
}

bool strongly_connected(const Topology& t) {
  const int n = t.num_nodes();
  std::vector<std::vector<NodeId>> fwd(static_cast<size_t>(n)),
      rev(static_cast<size_t>(n));
  for (const Link& l : t.links()) {
    fwd[static_cast<size_t>(l.tail)].push_back(l.head);
    rev[static_cast<size_t>(l.head)].push_back(l.tail);
  }
  return connected_bfs(n, fwd) && connected_bfs(n, rev);
}

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_double(const std::string& tok, int line_no) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line_no);
  }
}

long parse_int(const std::string& tok, int line_no) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError("expected an integer, got '" + tok + "'", line_no);
  }
  return v;
}

}  // namespace

Topology parse_topology(const std::string& text,
                        const TopologyParseOptions& options) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  int n_nodes = -1;
  long n_edges = -1;
  long edges_seen = 0;
  TopologyBuilder builder;

  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream ls(strip_comment(raw));
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "NODES") {
      if (n_nodes >= 0) throw ParseError("duplicate NODES header", line_no);
      if (tok.size() != 2) throw ParseError("NODES expects a count", line_no);
      n_nodes = static_cast<int>(parse_int(tok[1], line_no));
      builder.set_num_nodes(n_nodes);
      continue;
    }
    if (tok[0] == "EDGES") {
      if (n_nodes < 0) throw ParseError("EDGES before NODES", line_no);
      if (n_edges >= 0) throw ParseError("duplicate EDGES header", line_no);
      if (tok.size() != 2) throw ParseError("EDGES expects a count", line_no);
      n_edges = parse_int(tok[1], line_no);
      continue;
    }
    if (n_nodes < 0) throw ParseError("expected NODES header", line_no);

    if (n_edges < 0) {
      // Node label line: <id> <label>
      if (tok.size() != 2) throw ParseError("expected '<id> <label>'", line_no);
      long id = parse_int(tok[0], line_no);
      if (id < 0 || id >= n_nodes) throw ParseError("node id out of range", line_no);
      builder.set_node_label(static_cast<NodeId>(id), tok[1]);
      continue;
    }

    // Edge line: <u> <v> <capacity> [weight]
    if (tok.size() != 3 && tok.size() != 4) {
      throw ParseError("expected '<u> <v> <capacity> [weight]'", line_no);
    }
    long u = parse_int(tok[0], line_no);
    long v = parse_int(tok[1], line_no);
    double cap = parse_double(tok[2], line_no);
    double w = tok.size() == 4 ? parse_double(tok[3], line_no) : 1.0;
    switch (options.weight_mode) {
      case WeightMode::kFromFile:
        break;
      case WeightMode::kUnit:
        w = 1.0;
        break;
      case WeightMode::kInverseCapacity:
        if (cap <= 0.0) throw ValidationError("nonpositive capacity");
        w = 1.0 / cap;
        break;
    }
    if (cap <= 0.0) {
      throw ValidationError("nonpositive capacity on line " +
                            std::to_string(line_no));
    }
    builder.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v), cap, w);
    ++edges_seen;
  }

  if (n_nodes < 0) throw ParseError("missing NODES header");
  if (n_edges < 0) throw ParseError("missing EDGES header");
  if (edges_seen != n_edges) {
    throw ParseError("EDGES declared " + std::to_string(n_edges) + " but " +
                     std::to_string(edges_seen) + " edge lines found");
  }
  return builder.build(options.limits);
}

std::string topology_to_text(const Topology& t) {
  std::ostringstream out;
  out.precision(17);
  out << "NODES " << t.num_nodes() << "\n";
  for (const Node& n : t.nodes()) {
    if (!n.label.empty()) out << n.id << " " << n.label << "\n";
  }
  auto edges = t.undirected_edges();
  out << "EDGES " << edges.size() << "\n";
  for (auto [u, v] : edges) {
    const Link& l = t.link(*t.find_link(u, v));
    out << u << " " << v << " " << l.capacity << " " << l.ospf_weight << "\n";
  }
  return out.str();
}

Topology load_topology_file(const std::string& path,
                            const TopologyParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open topology file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Topology t = parse_topology(ss.str(), options);
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  t.set_name(dot == std::string::npos ? base : base.substr(0, dot));
  return t;
}

void save_topology_file(const Topology& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write topology file: " + path);
  out << topology_to_text(t);
}

Topology remove_link_pair(const Topology& t, NodeId u, NodeId v) {
  if (!t.find_link(u, v) || !t.find_link(v, u)) {
    throw NotFoundError("link pair " + std::to_string(u) + "-" +
                        std::to_string(v) + " not present");
  }
  TopologyBuilder builder;
  builder.set_num_nodes(t.num_nodes());
  for (const Node& n : t.nodes()) {
    if (!n.label.empty()) builder.set_node_label(n.id, n.label);
  }
  for (auto [a, b] : t.undirected_edges()) {
    if ((a == std::min(u, v) && b == std::max(u, v))) continue;
    const Link& l = t.link(*t.find_link(a, b));
    builder.add_edge(a, b, l.capacity, l.ospf_weight);
  }
  try {
    Topology out = builder.build(
        TopologyLimits{t.num_nodes(), static_cast<int>(t.undirected_edges().size())});
    out.set_name(t.name());
    return out;
  } catch (const ConnectivityError&) {
    throw ConnectivityError("removing link pair " + std::to_string(u) + "-" +
                            std::to_string(v) + " disconnects the graph");
  }
}

}  // namespace enero

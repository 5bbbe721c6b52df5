#include "enero/metrics.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace enero {

std::vector<double> edge_betweenness(const Topology& t) {
  const int n = t.num_nodes();
  auto edges = t.undirected_edges();
  std::map<std::pair<NodeId, NodeId>, int> edge_pos;
  std::vector<std::vector<NodeId>> adj(static_cast<size_t>(n));
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    auto [u, v] = edges[static_cast<size_t>(i)];
    edge_pos[{u, v}] = i;
    adj[static_cast<size_t>(u)].push_back(v);
    adj[static_cast<size_t>(v)].push_back(u);
  }

  std::vector<double> score(edges.size(), 0.0);

  // Brandes accumulation, unit edge lengths (BFS).
  for (NodeId s = 0; s < n; ++s) {
    std::vector<int> dist(static_cast<size_t>(n), -1);
    std::vector<double> sigma(static_cast<size_t>(n), 0.0);
    std::vector<std::vector<NodeId>> preds(static_cast<size_t>(n));
    std::vector<NodeId> order;
    std::queue<NodeId> q;
    dist[static_cast<size_t>(s)] = 0;
    sigma[static_cast<size_t>(s)] = 1.0;
    q.push(s);
    while (!q.empty()) {
      NodeId v = q.front();
      q.pop();
      order.push_back(v);
      for (NodeId w : adj[static_cast<size_t>(v)]) {
        if (dist[static_cast<size_t>(w)] < 0) {
          dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
          q.push(w);
        }
        if (dist[static_cast<size_t>(w)] == dist[static_cast<size_t>(v)] + 1) {
          sigma[static_cast<size_t>(w)] += sigma[static_cast<size_t>(v)];
          preds[static_cast<size_t>(w)].push_back(v);
        }
      }
    }
    std::vector<double> delta(static_cast<size_t>(n), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      for (NodeId v : preds[static_cast<size_t>(w)]) {
        double c = sigma[static_cast<size_t>(v)] / sigma[static_cast<size_t>(w)] *
                   (1.0 + delta[static_cast<size_t>(w)]);
        auto key = std::minmax(v, w);
        score[static_cast<size_t>(edge_pos[{key.first, key.second}])] += c;
        delta[static_cast<size_t>(v)] += c;
      }
    }
  }

  // Each unordered pair was counted from both endpoints; normalize to the
  // fraction of the n*(n-1)/2 pairs.
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  for (double& v : score) v /= 2.0 * pairs;
  return score;
}

TopologyMetrics compute_metrics(const Topology& t) {
  const int n = t.num_nodes();
  std::vector<int> degree(static_cast<size_t>(n), 0);
  for (auto [u, v] : t.undirected_edges()) {
    ++degree[static_cast<size_t>(u)];
    ++degree[static_cast<size_t>(v)];
  }

  TopologyMetrics m;
  m.node_degree.min = *std::min_element(degree.begin(), degree.end());
  m.node_degree.max = *std::max_element(degree.begin(), degree.end());
  double sum = 0.0;
  for (int d : degree) sum += d;
  m.node_degree.mean = sum / n;

  auto bt = edge_betweenness(t);
  m.edge_betweenness.min = *std::min_element(bt.begin(), bt.end());
  m.edge_betweenness.max = *std::max_element(bt.begin(), bt.end());
  sum = 0.0;
  for (double v : bt) sum += v;
  m.edge_betweenness.mean = sum / static_cast<double>(bt.size());
  return m;
}

}  // namespace enero

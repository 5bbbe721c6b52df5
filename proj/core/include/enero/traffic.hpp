#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enero/topology.hpp"
#include "enero/types.hpp"

namespace enero {

/// Bandwidth for every ordered (src, dst) pair, src != dst.
class TrafficMatrix {
 public:
  TrafficMatrix() = default;
  explicit TrafficMatrix(int num_nodes)
      : n_(num_nodes), bw_(static_cast<size_t>(demand_count(num_nodes)), 0.0) {}

  int num_nodes() const { return n_; }
  int num_demands() const { return static_cast<int>(bw_.size()); }

  double at(NodeId src, NodeId dst) const {
    return bw_[static_cast<size_t>(demand_index(n_, src, dst))];
  }
  void set(NodeId src, NodeId dst, double bandwidth) {
    bw_[static_cast<size_t>(demand_index(n_, src, dst))] = bandwidth;
  }
  double at_index(int k) const { return bw_[static_cast<size_t>(k)]; }

  /// Demand k in (src, dst) lexicographic order, bandwidth included.
  Demand demand_at(int k) const {
    Demand d;
    demand_pair(n_, k, &d.src, &d.dst);
    d.bandwidth = bw_[static_cast<size_t>(k)];
    return d;
  }

  double total() const {
    double s = 0.0;
    for (double v : bw_) s += v;
    return s;
  }

  friend bool operator==(const TrafficMatrix& a, const TrafficMatrix& b) {
    return a.n_ == b.n_ && a.bw_ == b.bw_;
  }

 private:
  int n_ = 0;
  std::vector<double> bw_;
};

/// Draws every entry i.i.d. uniform[0.5, 1] times `scale`. Reproducible:
/// equal (topology, seed, scale) gives an equal TM. scale must be > 0.
TrafficMatrix generate_tm(const Topology& t, std::uint64_t seed, double scale);

/// Demands in strictly non-increasing bandwidth order, ties broken by
/// (src, dst) ascending.
std::vector<Demand> order_by_bandwidth(const TrafficMatrix& tm);

/// TM file format: header `TM <N>`, then N*(N-1) lines `src dst bandwidth`
/// in (src, dst) order.
std::string tm_to_text(const TrafficMatrix& tm);
TrafficMatrix parse_tm(const std::string& text);
TrafficMatrix load_tm_file(const std::string& path);
void save_tm_file(const TrafficMatrix& tm, const std::string& path);

}  // namespace enero

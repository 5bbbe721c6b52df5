#pragma once

#include <cstdint>
#include <functional>

namespace enero {

using NodeId = std::int32_t;
using LinkId = std::int32_t;

/// One source-destination traffic aggregate.
struct Demand {
  NodeId src = 0;
  NodeId dst = 0;
  double bandwidth = 0.0;

  friend bool operator==(const Demand& a, const Demand& b) {
    return a.src == b.src && a.dst == b.dst && a.bandwidth == b.bandwidth;
  }
};

/// SR midpoint decision for one demand: either a detour node or DIRECT
/// (plain OSPF path). DIRECT is a distinct action, not midpoint == dst.
class Midpoint {
 public:
  static constexpr std::int32_t kDirectRaw = -1;

  Midpoint() = default;
  static Midpoint direct() { return Midpoint(kDirectRaw); }
  static Midpoint via(NodeId n) { return Midpoint(n); }
  static Midpoint from_raw(std::int32_t raw) { return Midpoint(raw); }

  bool is_direct() const { return value_ == kDirectRaw; }
  NodeId node() const { return value_; }
  std::int32_t raw() const { return value_; }

  friend bool operator==(Midpoint a, Midpoint b) { return a.value_ == b.value_; }
  friend bool operator!=(Midpoint a, Midpoint b) { return a.value_ != b.value_; }
  friend bool operator<(Midpoint a, Midpoint b) { return a.value_ < b.value_; }

 private:
  explicit Midpoint(std::int32_t v) : value_(v) {}
  std::int32_t value_ = kDirectRaw;
};

/// Dense index of the ordered pair (src, dst), src != dst, in (src, dst)
/// lexicographic order over the n*(n-1) demands of an n-node topology.
inline int demand_index(int n, NodeId src, NodeId dst) {
  return src * (n - 1) + (dst > src ? dst - 1 : dst);
}

inline int demand_count(int n) { return n * (n - 1); }

/// Inverse of demand_index.
inline void demand_pair(int n, int index, NodeId* src, NodeId* dst) {
  *src = static_cast<NodeId>(index / (n - 1));
  const int r = index % (n - 1);
  *dst = static_cast<NodeId>(r >= *src ? r + 1 : r);
}

}  // namespace enero

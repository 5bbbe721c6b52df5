#include "enero/traffic.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "enero/error.hpp"
#include "enero/rng.hpp"

namespace enero {

TrafficMatrix generate_tm(const Topology& t, std::uint64_t seed, double scale) {
  if (scale <= 0.0) throw ValidationError("TM scale must be positive");
  Rng rng(seed);
  TrafficMatrix tm(t.num_nodes());
  for (int k = 0; k < tm.num_demands(); ++k) {
    NodeId s, d;
    demand_pair(t.num_nodes(), k, &s, &d);
    tm.set(s, d, rng.uniform(0.5, 1.0) * scale);
  }
  return tm;
}

std::vector<Demand> order_by_bandwidth(const TrafficMatrix& tm) {
  std::vector<Demand> demands;
  demands.reserve(static_cast<size_t>(tm.num_demands()));
  for (int k = 0; k < tm.num_demands(); ++k) demands.push_back(tm.demand_at(k));
  std::sort(demands.begin(), demands.end(), [](const Demand& a, const Demand& b) {
    if (a.bandwidth != b.bandwidth) return a.bandwidth > b.bandwidth;
    if (a.src != b.src) return a.src < b.src;
    return a.dst < b.dst;
  });
  return demands;
}

std::string tm_to_text(const TrafficMatrix& tm) {
  std::ostringstream out;
  out.precision(17);
  out << "TM " << tm.num_nodes() << "\n";
  for (int k = 0; k < tm.num_demands(); ++k) {
    Demand d = tm.demand_at(k);
    out << d.src << " " << d.dst << " " << d.bandwidth << "\n";
  }
  return out.str();
}

TrafficMatrix parse_tm(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  int n = 0;
  if (!(in >> header >> n) || header != "TM" || n < 2) {
    throw ParseError("expected 'TM <N>' header");
  }
  TrafficMatrix tm(n);
  int seen = 0;
  long s, d;
  double bw;
  while (in >> s >> d >> bw) {
    if (s < 0 || s >= n || d < 0 || d >= n || s == d) {
      throw ParseError("bad demand pair " + std::to_string(s) + "->" +
                       std::to_string(d));
    }
    if (bw < 0.0) throw ValidationError("negative bandwidth");
    tm.set(static_cast<NodeId>(s), static_cast<NodeId>(d), bw);
    ++seen;
  }
  if (seen != demand_count(n)) {
    throw ParseError("TM declares " + std::to_string(n) + " nodes but has " +
                     std::to_string(seen) + " entries");
  }
  return tm;
}

TrafficMatrix load_tm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open TM file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tm(ss.str());
}

void save_tm_file(const TrafficMatrix& tm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write TM file: " + path);
  out << tm_to_text(tm);
}

}  // namespace enero

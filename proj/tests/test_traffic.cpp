#include <doctest.h>

#include <algorithm>

#include "enero/critical.hpp"
#include "enero/error.hpp"
#include "enero/scenarios.hpp"
#include "enero/traffic.hpp"

using namespace enero;

TEST_CASE("generate_tm rejects nonpositive scale and respects bounds") {
  Topology t = make_ring(5);
  CHECK_THROWS_AS(generate_tm(t, 1, 0.0), ValidationError);
  TrafficMatrix tm = generate_tm(t, 1, 1.0);
  for (int k = 0; k < tm.num_demands(); ++k) {
    CHECK(tm.at_index(k) >= 0.5);
    CHECK(tm.at_index(k) < 1.0);
  }
}

TEST_CASE("generate_tm is reproducible") {
  Topology t = make_ring(6);
  CHECK(generate_tm(t, 42, 3.0) == generate_tm(t, 42, 3.0));
  CHECK_FALSE(generate_tm(t, 42, 3.0) == generate_tm(t, 43, 3.0));
}

TEST_CASE("sample mean of many draws sits near 0.75 scale") {
  // 10k+ draws across several TMs on a 12-node graph: 132 demands each.
  Topology t = gen_random_topology(12, 10, {10.0}, 2);
  const double scale = 4.0;
  double sum = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    TrafficMatrix tm = generate_tm(t, seed, scale);
    for (int k = 0; k < tm.num_demands(); ++k) {
      sum += tm.at_index(k);
      ++count;
    }
  }
  CHECK(count >= 10000);
  CHECK(sum / count == doctest::Approx(0.75 * scale).epsilon(0.01 / 0.75));
}

TEST_CASE("order_by_bandwidth sorts decreasing with pair tie-break") {
  TrafficMatrix tm(2);
  tm.set(0, 1, 3.0);
  tm.set(1, 0, 5.0);
  auto ordered = order_by_bandwidth(tm);
  CHECK(ordered[0].src == 1);
  CHECK(ordered[1].src == 0);

  TrafficMatrix flat(4);
  for (int k = 0; k < flat.num_demands(); ++k) {
    Demand d = flat.demand_at(k);
    flat.set(d.src, d.dst, 2.0);
  }
  auto tie = order_by_bandwidth(flat);
  for (size_t i = 0; i + 1 < tie.size(); ++i) {
    CHECK((tie[i].src < tie[i + 1].src ||
           (tie[i].src == tie[i + 1].src && tie[i].dst < tie[i + 1].dst)));
  }
}

TEST_CASE("ordering agrees with an independent comparison sort") {
  Topology t = make_ring(6);
  TrafficMatrix tm = generate_tm(t, 7, 2.0);
  auto ordered = order_by_bandwidth(tm);

  std::vector<Demand> expect;
  for (int k = 0; k < tm.num_demands(); ++k) expect.push_back(tm.demand_at(k));
  std::stable_sort(expect.begin(), expect.end(),
                   [](const Demand& a, const Demand& b) {
                     if (a.bandwidth != b.bandwidth) return a.bandwidth > b.bandwidth;
                     if (a.src != b.src) return a.src < b.src;
                     return a.dst < b.dst;
                   });
  REQUIRE(ordered.size() == expect.size());
  for (size_t i = 0; i < ordered.size(); ++i) {
    CHECK(ordered[i] == expect[i]);
  }
  for (size_t i = 0; i + 1 < ordered.size(); ++i) {
    CHECK(ordered[i].bandwidth >= ordered[i + 1].bandwidth);
  }
}

TEST_CASE("critical set picks the largest demands on the hot link") {
  // Star, center 0. Demands out of node 1 dominate link 1->0.
  Topology t = make_star(4);
  TrafficMatrix tm(4);
  for (int k = 0; k < tm.num_demands(); ++k) {
    Demand d = tm.demand_at(k);
    tm.set(d.src, d.dst, 0.1);
  }
  tm.set(1, 0, 5.0);
  tm.set(1, 2, 4.0);
  tm.set(1, 3, 3.0);

  PathTable paths(t);
  RoutingConfig cfg = RoutingConfig::all_direct(4);
  CriticalOptions opt;
  opt.fraction = 2.0 / 12.0;  // quota of 2
  opt.top_links = 1;
  CriticalSet set = select_critical(t, paths, tm, cfg, opt);
  REQUIRE(set.demands.size() == 2);
  CHECK(set.demands[0].bandwidth == 5.0);
  CHECK(set.demands[1].bandwidth == 4.0);
  CHECK(set.demands[0].src == 1);
  CHECK(set.demands[1].src == 1);
}

TEST_CASE("fraction one selects every demand in bandwidth order") {
  Topology t = make_ring(5);
  TrafficMatrix tm = generate_tm(t, 3, 2.0);
  PathTable paths(t);
  CriticalOptions opt;
  opt.fraction = 1.0;
  CriticalSet set =
      select_critical(t, paths, tm, RoutingConfig::all_direct(5), opt);
  auto expect = order_by_bandwidth(tm);
  REQUIRE(set.demands.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) CHECK(set.demands[i] == expect[i]);
}

TEST_CASE("uniform utilization collapses to the global bandwidth order") {
  // Zero TM: every link ties at zero utilization.
  Topology t = make_ring(5);
  TrafficMatrix tm(5);
  PathTable paths(t);
  CriticalOptions opt;
  opt.fraction = 0.5;
  CriticalSet set =
      select_critical(t, paths, tm, RoutingConfig::all_direct(5), opt);
  auto global = order_by_bandwidth(tm);
  REQUIRE(set.demands.size() == 10);
  for (size_t i = 0; i < set.demands.size(); ++i) {
    CHECK(set.demands[i] == global[i]);
  }
}

TEST_CASE("critical cardinality always matches the rounded quota") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    Topology t = gen_random_topology(7, 5, {10.0, 20.0}, seed);
    TrafficMatrix tm = generate_tm(t, seed, 3.0);
    PathTable paths(t);
    for (double fraction : {0.1, 0.15, 0.3, 1.0}) {
      CriticalOptions opt;
      opt.fraction = fraction;
      CriticalSet set =
          select_critical(t, paths, tm, RoutingConfig::all_direct(7), opt);
      const long quota = std::lround(fraction * tm.num_demands());
      CHECK(static_cast<long>(set.demands.size()) == quota);
      for (size_t i = 0; i + 1 < set.demands.size(); ++i) {
        CHECK(set.demands[i].bandwidth >= set.demands[i + 1].bandwidth);
      }
    }
  }
}

TEST_CASE("tm file round trips") {
  Topology t = make_ring(4);
  TrafficMatrix tm = generate_tm(t, 11, 7.5);
  TrafficMatrix back = parse_tm(tm_to_text(tm));
  CHECK(back == tm);
}

TEST_CASE("tm parser rejects bad input") {
  CHECK_THROWS_AS(parse_tm("TM 3\n0 1 1.0\n"), ParseError);       // short
  CHECK_THROWS_AS(parse_tm("XX 3\n"), ParseError);                // header
  CHECK_THROWS_AS(parse_tm("TM 2\n0 1 -1\n1 0 1\n"), ValidationError);
}

TEST_CASE("calibrated scale lands near the target utilization") {
  Topology t = gen_random_topology(8, 6, {10.0, 20.0}, 9);
  const double scale = calibrate_scale(t, 1.1, 123);
  PathTable paths(t);
  double sum = 0.0;
  const int samples = 20;
  for (int i = 0; i < samples; ++i) {
    TrafficMatrix tm = generate_tm(t, 500 + static_cast<std::uint64_t>(i), scale);
    sum += max_utilization(
        apply_routing(t, paths, tm, RoutingConfig::all_direct(8)));
  }
  CHECK(sum / samples == doctest::Approx(1.1).epsilon(0.15));
}

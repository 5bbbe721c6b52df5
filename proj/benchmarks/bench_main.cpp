#include <benchmark/benchmark.h>

#include "enero/env.hpp"
#include "enero/pipeline.hpp"
#include "enero/policy.hpp"
#include "enero/ppo.hpp"
#include "enero/rng.hpp"
#include "enero/scenarios.hpp"
#include "enero/search.hpp"

using namespace enero;

namespace {

Topology bench_topology(int n) {
  return gen_random_topology(n, n * 3 / 2, {5.0, 10.0, 20.0}, 42);
}

}  // namespace

static void BM_PathTableBuild(benchmark::State& state) {
  Topology t = bench_topology(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    PathTable paths(t);
    benchmark::DoNotOptimize(paths.distance(0, 1));
  }
}
BENCHMARK(BM_PathTableBuild)->Arg(10)->Arg(20)->Arg(30);

static void BM_ApplyRouting(benchmark::State& state) {
  Topology t = bench_topology(static_cast<int>(state.range(0)));
  PathTable paths(t);
  TrafficMatrix tm = generate_tm(t, 1, 4.0);
  RoutingConfig cfg = RoutingConfig::all_direct(t.num_nodes());
  for (auto _ : state) {
    LinkState ls = apply_routing(t, paths, tm, cfg);
    benchmark::DoNotOptimize(max_utilization(ls));
  }
}
BENCHMARK(BM_ApplyRouting)->Arg(10)->Arg(20)->Arg(30);

static void BM_PeekMove(benchmark::State& state) {
  Topology t = bench_topology(20);
  PathTable paths(t);
  TrafficMatrix tm = generate_tm(t, 1, 4.0);
  LinkState ls = apply_routing(t, paths, tm, RoutingConfig::all_direct(20));
  Demand d = tm.demand_at(7);
  LinkPath old_path = paths.path(d.src, d.dst);
  LinkPath new_path = sr_path(paths, d, Midpoint::via((d.dst + 1) % 20 == d.src
                                                          ? (d.dst + 2) % 20
                                                          : (d.dst + 1) % 20));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        peek_move_max_utilization(ls, d.bandwidth, old_path, new_path));
  }
}
BENCHMARK(BM_PeekMove);

static void BM_GnnScoreActions(benchmark::State& state) {
  Topology t = bench_topology(static_cast<int>(state.range(0)));
  TrafficMatrix tm = generate_tm(t, 1, 4.0);
  Env env(t, tm);
  PolicyParams params = PolicyParams::init(3);
  for (auto _ : state) {
    ActionDistribution dist = score_actions(params, env);
    benchmark::DoNotOptimize(dist.probabilities[0]);
  }
}
BENCHMARK(BM_GnnScoreActions)->Arg(10)->Arg(20);

static void BM_GreedyEpisode(benchmark::State& state) {
  Topology t = bench_topology(static_cast<int>(state.range(0)));
  TrafficMatrix tm = generate_tm(t, 1, 4.0);
  PolicyParams params = PolicyParams::init(3);
  for (auto _ : state) {
    Env env(t, tm);
    EpisodeResult ep = collect_episode(env, params, RolloutMode::kEval, nullptr);
    benchmark::DoNotOptimize(ep.best_maxu);
  }
}
BENCHMARK(BM_GreedyEpisode)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_HillClimb(benchmark::State& state) {
  Topology t = bench_topology(static_cast<int>(state.range(0)));
  PathTable paths(t);
  TrafficMatrix tm = generate_tm(t, 1, 4.0);
  RoutingConfig start = RoutingConfig::all_direct(t.num_nodes());
  CriticalSet critical = select_critical(t, paths, tm, start, {});
  for (auto _ : state) {
    HillClimbResult r = hill_climb(t, paths, tm, start, critical, {});
    benchmark::DoNotOptimize(r.maxu);
  }
}
BENCHMARK(BM_HillClimb)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_EneroOptimize(benchmark::State& state) {
  Topology t = bench_topology(static_cast<int>(state.range(0)));
  TrafficMatrix tm = generate_tm(t, 1, 4.0);
  PolicyParams params = PolicyParams::init(3);
  EneroConfig cfg;
  cfg.ls_budget_seconds = -1.0;
  for (auto _ : state) {
    OptimizationReport rep = enero_optimize(t, tm, params, cfg);
    benchmark::DoNotOptimize(rep.post_ls_maxu);
  }
}
BENCHMARK(BM_EneroOptimize)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include "enero/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "enero/error.hpp"
#include "enero/graphml.hpp"
#include "enero/rng.hpp"

namespace enero {

namespace {
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}
}  // namespace

Topology gen_random_topology(int num_nodes, int extra_edges,
                             const std::vector<double>& capacity_choices,
                             std::uint64_t seed) {
  if (num_nodes < 2) throw ValidationError("need at least 2 nodes");
  if (capacity_choices.empty()) throw ValidationError("need capacity choices");
  Rng rng(seed);
  TopologyBuilder builder;
  builder.set_num_nodes(num_nodes);

  auto capacity = [&]() {
    return capacity_choices[rng.uniform_index(capacity_choices.size())];
  };

  // Random spanning tree: attach each node to a previous one.
  std::set<std::pair<NodeId, NodeId>> used;
  for (NodeId v = 1; v < num_nodes; ++v) {
    NodeId u = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(v)));
    builder.add_edge(u, v, capacity());
    used.insert({std::min(u, v), std::max(u, v)});
  }
  int added = 0;
  int guard = 0;
  const int max_possible = num_nodes * (num_nodes - 1) / 2;
  while (added < extra_edges &&
         static_cast<int>(used.size()) < max_possible && guard < 100000) {
    ++guard;
    NodeId u = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(num_nodes)));
    NodeId v = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(num_nodes)));
    if (u == v) continue;
    auto key = std::minmax(u, v);
    if (used.count({key.first, key.second})) continue;
    used.insert({key.first, key.second});
    builder.add_edge(u, v, capacity());
    ++added;
  }
  Topology t = builder.build();
  t.set_name("synth" + std::to_string(num_nodes) + "s" + std::to_string(seed));
  return t;
}

Topology make_ring(int num_nodes, double capacity) {
  TopologyBuilder builder;
  builder.set_num_nodes(num_nodes);
  for (NodeId v = 0; v < num_nodes; ++v) {
    builder.add_edge(v, static_cast<NodeId>((v + 1) % num_nodes), capacity);
  }
  Topology t = builder.build();
  t.set_name("ring" + std::to_string(num_nodes));
  return t;
}

Topology make_star(int num_nodes, double capacity) {
  TopologyBuilder builder;
  builder.set_num_nodes(num_nodes);
  for (NodeId v = 1; v < num_nodes; ++v) builder.add_edge(0, v, capacity);
  Topology t = builder.build();
  t.set_name("star" + std::to_string(num_nodes));
  return t;
}

Topology make_line(int num_nodes, double capacity) {
  TopologyBuilder builder;
  builder.set_num_nodes(num_nodes);
  for (NodeId v = 0; v + 1 < num_nodes; ++v) {
    builder.add_edge(v, v + 1, capacity);
  }
  Topology t = builder.build();
  t.set_name("line" + std::to_string(num_nodes));
  return t;
}

FailureSuiteEntry gen_failures(const Topology& t, int k, int count,
                               std::uint64_t seed) {
  if (k < 1) throw ValidationError("k must be >= 1");
  constexpr int kMaxAttempts = 10000;
  Rng rng(seed);
  FailureSuiteEntry entry;
  entry.k_failures = k;
  std::set<std::vector<std::pair<NodeId, NodeId>>> seen;

  for (int v = 0; v < count; ++v) {
    bool produced = false;
    for (int attempt = 0; attempt < kMaxAttempts && !produced; ++attempt) {
      Topology current = t;
      std::vector<std::pair<NodeId, NodeId>> removed;
      bool dead = false;
      for (int i = 0; i < k; ++i) {
        auto edges = current.undirected_edges();
        auto [u, vtx] = edges[rng.uniform_index(edges.size())];
        try {
          current = remove_link_pair(current, u, vtx);
        } catch (const ConnectivityError&) {
          dead = true;
          break;
        }
        removed.emplace_back(u, vtx);
      }
      if (dead) continue;
      std::sort(removed.begin(), removed.end());
      if (seen.count(removed)) continue;
      seen.insert(removed);
      current.set_name(t.name() + "-k" + std::to_string(k) + "v" +
                       std::to_string(v));
      entry.variants.push_back({std::move(current), std::move(removed)});
      produced = true;
    }
    if (!produced) {
      throw ExhaustionError("could not produce " + std::to_string(count) +
                            " distinct connected variants with k=" +
                            std::to_string(k) + " (got " +
                            std::to_string(entry.variants.size()) + ")");
    }
  }
  return entry;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kOspf:
      return "ospf";
    case Method::kSap:
      return "sap";
    case Method::kLs:
      return "ls";
    case Method::kDrl:
      return "drl";
    case Method::kEnero:
      return "enero";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "ospf") return Method::kOspf;
  if (name == "sap") return Method::kSap;
  if (name == "ls") return Method::kLs;
  if (name == "drl") return Method::kDrl;
  if (name == "enero") return Method::kEnero;
  throw ValidationError("unknown method '" + name + "'");
}

std::string scenario_results_to_csv(const std::vector<ScenarioResult>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "scenario,topology,k_failures,tm_id,method,init_maxu,final_maxu,"
         "wall_ms,config_path\n";
  for (const ScenarioResult& r : rows) {
    out << r.scenario << "," << r.topology << "," << r.k_failures << ","
        << r.tm_id << "," << r.method << "," << r.init_maxu << ","
        << r.final_maxu << "," << r.wall_ms << "," << r.config_path << "\n";
  }
  return out.str();
}

ScenarioResult run_instance(const Topology& t, const TrafficMatrix& tm,
                            int tm_id, int k_failures, const RunnerOptions& opt,
                            std::vector<SeriesPoint>* series) {
  ScenarioResult row;
  row.scenario = opt.scenario;
  row.topology = t.name();
  row.k_failures = k_failures;
  row.tm_id = tm_id;
  row.method = method_name(opt.method);

  PathTable paths(t);
  const RoutingConfig direct = RoutingConfig::all_direct(t.num_nodes());
  row.init_maxu = max_utilization(apply_routing(t, paths, tm, direct));

  auto add_point = [&](const std::string& phase, int step, double maxu) {
    if (series != nullptr) series->push_back({tm_id, phase, step, maxu});
  };

  const auto t0 = Clock::now();
  RoutingConfig final_config = direct;
  bool have_config = true;

  switch (opt.method) {
    case Method::kOspf:
      row.final_maxu = row.init_maxu;
      break;
    case Method::kSap: {
      SapResult sap = sap_route(t, tm);
      row.final_maxu = sap.maxu;
      have_config = false;  // SAP paths are not 2-segment configs
      if (!opt.out_dir.empty()) {
        std::string path = opt.out_dir + "/" + row.scenario + "_" + row.topology +
                           "_tm" + std::to_string(tm_id) + "_sap.paths";
        std::ofstream f(path);
        for (int kdx = 0; kdx < tm.num_demands(); ++kdx) {
          Demand d = tm.demand_at(kdx);
          f << d.src << " " << d.dst;
          for (LinkId lid : sap.paths[static_cast<size_t>(kdx)]) {
            f << " " << t.link(lid).head;
          }
          f << "\n";
        }
        row.config_path = path;
      }
      break;
    }
    case Method::kLs: {
      LsBaselineResult ls =
          ls_baseline(t, paths, tm, opt.ls_budget, opt.critical);
      final_config = ls.config;
      row.final_maxu = ls.maxu;
      int step = 0;
      for (const IterationTraceRow& it : ls.detail.trace) {
        add_point("ls", ++step, it.max_utilization);
      }
      break;
    }
    case Method::kDrl:
    case Method::kEnero: {
      if (opt.params == nullptr) {
        throw ValidationError("method needs trained policy parameters");
      }
      EneroConfig cfg;
      cfg.critical_fraction = opt.critical.fraction;
      cfg.top_links = opt.critical.top_links;
      cfg.ls_budget_seconds = opt.ls_budget.wall_seconds;
      cfg.ls_max_iterations =
          opt.method == Method::kDrl ? 0 : opt.ls_budget.max_iterations;
      if (opt.method == Method::kDrl) cfg.ls_budget_seconds = 0.0;
      OptimizationReport report = enero_optimize(t, tm, *opt.params, cfg);
      final_config = report.final_config;
      row.final_maxu =
          opt.method == Method::kDrl ? report.post_drl_maxu : report.post_ls_maxu;
      int step = 0;
      for (const StepTraceRow& tr : report.drl_trace) {
        add_point("drl", ++step, tr.max_utilization);
      }
      add_point("drl", ++step, report.post_drl_maxu);
      if (opt.method == Method::kEnero) {
        for (const IterationTraceRow& it : report.ls_trace) {
          add_point("ls", ++step, it.max_utilization);
        }
        add_point("ls", ++step, report.post_ls_maxu);
      }
      break;
    }
  }
  row.wall_ms = elapsed_ms(t0);

  if (have_config && !opt.out_dir.empty() && opt.method != Method::kOspf) {
    std::string path = opt.out_dir + "/" + row.scenario + "_" + row.topology +
                       "_tm" + std::to_string(tm_id) + "_" + row.method + ".cfg";
    save_routing_config_file(final_config, path);
    row.config_path = path;
  }
  return row;
}

DynamicTmResult run_dynamic_tm(const Topology& t,
                               const std::vector<TrafficMatrix>& tms,
                               const RunnerOptions& opt) {
  DynamicTmResult result;
  for (size_t i = 0; i < tms.size(); ++i) {
    result.results.push_back(run_instance(t, tms[i], static_cast<int>(i), 0, opt,
                                          &result.series));
  }
  return result;
}

SweepResult run_sweep(const std::string& dataset_dir, const SweepOptions& opt) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".topo" || ext == ".graphml") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no topology files in " + dataset_dir);

  SweepResult sweep;
  if (!opt.out_dir.empty()) fs::create_directories(opt.out_dir);

  for (const std::string& file : files) {
    Topology t;
    try {
      t = fs::path(file).extension() == ".graphml" ? load_graphml_file(file)
                                                   : load_topology_file(file);
    } catch (const std::exception& e) {
      // A bad dataset file must not sink the sweep.
      continue;
    }

    // TMs: sibling files or generated with a calibrated scale.
    std::vector<TrafficMatrix> tms;
    const std::string stem = fs::path(file).parent_path() /
                             fs::path(file).stem();
    for (int i = 0;; ++i) {
      const std::string tm_path = stem + ".tm" + std::to_string(i);
      if (!fs::exists(tm_path)) break;
      tms.push_back(load_tm_file(tm_path));
    }
    if (tms.empty()) {
      const double scale = calibrate_scale(t, opt.target_maxu, opt.seed);
      for (int i = 0; i < opt.tms_per_topology; ++i) {
        tms.push_back(generate_tm(t, opt.seed + 1000 + static_cast<std::uint64_t>(i),
                                  scale));
      }
    }

    std::vector<std::vector<double>> per_method_final(
        opt.methods.size(), std::vector<double>(tms.size(), 0.0));
    for (size_t mi = 0; mi < opt.methods.size(); ++mi) {
      RunnerOptions ro;
      ro.method = opt.methods[mi];
      ro.ls_budget = opt.ls_budget;
      ro.critical = opt.critical;
      ro.params = opt.params;
      ro.scenario = "sweep";
      ro.out_dir = opt.out_dir;
      for (size_t ti = 0; ti < tms.size(); ++ti) {
        ScenarioResult row;
        try {
          row = run_instance(t, tms[ti], static_cast<int>(ti), 0, ro, nullptr);
        } catch (const std::exception& e) {
          row.scenario = "sweep";
          row.topology = t.name();
          row.tm_id = static_cast<int>(ti);
          row.method = method_name(opt.methods[mi]);
          row.init_maxu = row.final_maxu = std::numeric_limits<double>::quiet_NaN();
        }
        per_method_final[mi][ti] = row.final_maxu;
        sweep.rows.push_back(std::move(row));
      }
    }

    // Relative-performance rows against the LS baseline.
    auto ls_it = std::find(opt.methods.begin(), opt.methods.end(), Method::kLs);
    if (ls_it != opt.methods.end()) {
      const size_t li = static_cast<size_t>(ls_it - opt.methods.begin());
      for (size_t mi = 0; mi < opt.methods.size(); ++mi) {
        for (size_t ti = 0; ti < tms.size(); ++ti) {
          sweep.relative.push_back(
              {t.name(), static_cast<int>(ti), method_name(opt.methods[mi]),
               per_method_final[mi][ti] / per_method_final[li][ti]});
        }
      }
    }
  }

  if (!opt.out_dir.empty()) {
    std::ofstream out(opt.out_dir + "/results.csv");
    out << scenario_results_to_csv(sweep.rows);
    std::ofstream rel(opt.out_dir + "/relative_to_ls.csv");
    rel.precision(17);
    rel << "topology,tm_id,method,final_over_ls\n";
    for (const auto& r : sweep.relative) {
      rel << r.topology << "," << r.tm_id << "," << r.method << "," << r.ratio
          << "\n";
    }
  }
  return sweep;
}

}  // namespace enero

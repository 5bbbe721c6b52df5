// enero: two-stage segment-routing traffic optimizer.
//
// Subcommands: train, optimize, evaluate, gen-tm, gen-failures, sweep,
// metrics, baseline {sap|ls}. Exit codes: 0 success, 1 runtime/validation
// failure, 2 usage error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "enero/checkpoint.hpp"
#include "enero/error.hpp"
#include "enero/graphml.hpp"
#include "enero/metrics.hpp"
#include "enero/pipeline.hpp"
#include "enero/ppo.hpp"
#include "enero/scenarios.hpp"
#include "enero/search.hpp"
#include "enero/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace enero;

namespace {

Topology load_any_topology(const std::string& path) {
  if (fs::path(path).extension() == ".graphml") return load_graphml_file(path);
  return load_topology_file(path);
}

void write_text(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

struct GlobalArgs {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir = "enero_out";
};

// Applies --config (when given) over the defaults, command line wins last.
void load_config_layer(const GlobalArgs& g, TrainConfig* train, EneroConfig* enero) {
  if (g.config_path.empty()) return;
  apply_config(load_key_value_config(g.config_path), train, enero);
}

std::vector<TrafficMatrix> load_or_generate_tms(const Topology& t,
                                                const std::vector<std::string>& tm_files,
                                                int generate_count,
                                                double scale, double target_maxu,
                                                std::uint64_t seed) {
  std::vector<TrafficMatrix> tms;
  for (const std::string& f : tm_files) tms.push_back(load_tm_file(f));
  if (!tms.empty()) return tms;
  double s = scale;
  if (s <= 0.0) s = calibrate_scale(t, target_maxu, seed);
  for (int i = 0; i < generate_count; ++i) {
    tms.push_back(generate_tm(t, seed + 1000 + static_cast<std::uint64_t>(i), s));
  }
  return tms;
}

int cmd_train(const GlobalArgs& g, const std::vector<std::string>& topo_files,
              const std::string& tm_dir, int episodes, int tms, int eval_tms,
              double scale, double target_maxu) {
  TrainConfig cfg;
  load_config_layer(g, &cfg, nullptr);
  if (episodes > 0) cfg.episodes = episodes;

  std::vector<TrainTopology> tts;
  for (size_t i = 0; i < topo_files.size(); ++i) {
    TrainTopology tt;
    tt.topology = load_any_topology(topo_files[i]);
    if (!tm_dir.empty()) {
      for (int s = 0;; ++s) {
        const std::string path =
            tm_dir + "/" + tt.topology.name() + ".tm" + std::to_string(s);
        if (!fs::exists(path)) break;
        tt.train_tms.push_back(load_tm_file(path));
      }
      // Held-out tail for evaluation.
      const size_t split = tt.train_tms.size() * 2 / 3;
      tt.eval_tms.assign(tt.train_tms.begin() + static_cast<long>(split),
                         tt.train_tms.end());
      tt.train_tms.resize(split);
    } else {
      double s = scale;
      if (s <= 0.0) s = calibrate_scale(tt.topology, target_maxu, g.seed);
      for (int k = 0; k < tms; ++k) {
        tt.train_tms.push_back(generate_tm(
            tt.topology, g.seed + 10000 * (i + 1) + static_cast<std::uint64_t>(k), s));
      }
      for (int k = 0; k < eval_tms; ++k) {
        tt.eval_tms.push_back(generate_tm(
            tt.topology, g.seed + 90000 * (i + 1) + static_cast<std::uint64_t>(k), s));
      }
    }
    if (tt.train_tms.empty()) {
      throw ValidationError("no TMs for topology " + tt.topology.name());
    }
    tts.push_back(std::move(tt));
  }

  TrainResult result = train(tts, cfg, g.seed, g.out_dir, &std::cout);
  std::cout << "best eval maxU: " << result.best_eval_maxu << "\n";
  std::cout << "checkpoints and log written to " << g.out_dir << "\n";
  return 0;
}

int cmd_optimize(const GlobalArgs& g, const std::string& topo_file,
                 const std::string& tm_file, EneroConfig cfg) {
  load_config_layer(g, nullptr, &cfg);
  Topology t = load_any_topology(topo_file);
  TrafficMatrix tm = load_tm_file(tm_file);
  cfg.seed = g.seed;

  OptimizationReport report = enero_optimize(t, tm, cfg);

  fs::create_directories(g.out_dir);
  const std::string base = g.out_dir + "/" + t.name();
  save_routing_config_file(report.final_config, base + ".cfg");
  write_text(base + "_report.txt", report.to_text());
  write_text(base + "_drl_trace.csv", trace_to_csv(report.drl_trace));
  write_text(base + "_ls_trace.csv", iteration_trace_to_csv(report.ls_trace));

  ScenarioResult row;
  row.scenario = "optimize";
  row.topology = t.name();
  row.method = "enero";
  row.init_maxu = report.initial_maxu;
  row.final_maxu = report.post_ls_maxu;
  row.wall_ms = report.drl_wall_ms + report.ls_wall_ms;
  row.config_path = base + ".cfg";
  write_text(base + "_report.csv", scenario_results_to_csv({row}));

  std::cout << report.to_text();
  std::cout << "routing config written to " << base << ".cfg\n";
  return 0;
}

int cmd_evaluate(const GlobalArgs& g, const std::string& topo_file,
                 const std::vector<std::string>& tm_files, int tm_count,
                 const std::string& ckpt, const std::string& method_name_str,
                 double budget_s, double fraction, int top_links) {
  Topology t = load_any_topology(topo_file);
  std::vector<TrafficMatrix> tms =
      load_or_generate_tms(t, tm_files, tm_count, -1.0, 1.1, g.seed);

  RunnerOptions ro;
  ro.method = method_from_name(method_name_str);
  ro.ls_budget = SearchBudget{budget_s, -1};
  ro.critical = CriticalOptions{fraction, top_links};
  ro.scenario = "evaluate";
  ro.out_dir = g.out_dir;
  fs::create_directories(g.out_dir);

  PolicyParams params;
  if (ro.method == Method::kDrl || ro.method == Method::kEnero) {
    if (ckpt.empty()) throw ValidationError("--ckpt required for this method");
    params = load_checkpoint(ckpt);
    ro.params = &params;
  }

  DynamicTmResult result = run_dynamic_tm(t, tms, ro);
  write_text(g.out_dir + "/results.csv", scenario_results_to_csv(result.results));

  // Per-TM optimization trajectories and the wall-time CDF.
  std::vector<PlotSeries> series;
  for (const ScenarioResult& row : result.results) {
    PlotSeries s;
    s.label = result.results.size() <= 8
                  ? "tm" + std::to_string(row.tm_id)
                  : "";
    s.points.push_back({0.0, row.init_maxu});
    for (const SeriesPoint& p : result.series) {
      if (p.tm_id == row.tm_id) {
        s.points.push_back({static_cast<double>(p.step), p.maxu});
      }
    }
    series.push_back(std::move(s));
  }
  write_text(g.out_dir + "/maxu_series.svg",
             svg_line_chart(series, t.name() + " optimization progress", "step",
                            "max link utilization"));
  std::vector<double> walls;
  double init_sum = 0.0, final_sum = 0.0;
  for (const ScenarioResult& row : result.results) {
    walls.push_back(row.wall_ms / 1000.0);
    init_sum += row.init_maxu;
    final_sum += row.final_maxu;
  }
  write_text(g.out_dir + "/wall_cdf.svg",
             svg_cdf_chart({{method_name_str, walls}},
                           t.name() + " execution cost", "seconds"));

  std::cout << "TMs: " << tms.size() << "\n";
  std::cout << "mean initial maxU: " << init_sum / tms.size() << "\n";
  std::cout << "mean final maxU:   " << final_sum / tms.size() << "\n";
  std::cout << "results in " << g.out_dir << "\n";
  return 0;
}

int cmd_gen_tm(const GlobalArgs& g, const std::string& topo_file, int count,
               double scale, double target_maxu) {
  Topology t = load_any_topology(topo_file);
  double s = scale;
  if (s <= 0.0) s = calibrate_scale(t, target_maxu, g.seed);
  fs::create_directories(g.out_dir);
  for (int i = 0; i < count; ++i) {
    TrafficMatrix tm =
        generate_tm(t, g.seed + static_cast<std::uint64_t>(i), s);
    save_tm_file(tm, g.out_dir + "/" + t.name() + ".tm" + std::to_string(i));
  }
  std::cout << "wrote " << count << " TMs (scale " << s << ") to " << g.out_dir
            << "\n";
  return 0;
}

int cmd_gen_failures(const GlobalArgs& g, const std::string& topo_file, int k_min,
                     int k_max, int count) {
  Topology t = load_any_topology(topo_file);
  fs::create_directories(g.out_dir);
  std::ostringstream manifest;
  manifest << "k,variant,file,removed\n";
  for (int k = k_min; k <= k_max; ++k) {
    FailureSuiteEntry entry =
        gen_failures(t, k, count, g.seed + static_cast<std::uint64_t>(k));
    for (size_t v = 0; v < entry.variants.size(); ++v) {
      const std::string file = g.out_dir + "/" + t.name() + "_k" +
                               std::to_string(k) + "_v" + std::to_string(v) +
                               ".topo";
      save_topology_file(entry.variants[v].topology, file);
      manifest << k << "," << v << "," << file << ",";
      for (auto [a, b] : entry.variants[v].removed) {
        manifest << a << "-" << b << " ";
      }
      manifest << "\n";
    }
  }
  write_text(g.out_dir + "/manifest.csv", manifest.str());
  std::cout << "failure suite written to " << g.out_dir << "\n";
  return 0;
}

int cmd_sweep(const GlobalArgs& g, const std::string& dataset,
              const std::string& methods_csv, const std::string& ckpt,
              double budget_s, int tms) {
  SweepOptions opt;
  opt.methods.clear();
  std::istringstream ms(methods_csv);
  for (std::string name; std::getline(ms, name, ',');) {
    opt.methods.push_back(method_from_name(name));
  }
  opt.ls_budget = SearchBudget{budget_s, -1};
  opt.tms_per_topology = tms;
  opt.seed = g.seed;
  opt.out_dir = g.out_dir;

  PolicyParams params;
  const bool needs_params =
      std::any_of(opt.methods.begin(), opt.methods.end(), [](Method m) {
        return m == Method::kDrl || m == Method::kEnero;
      });
  if (needs_params) {
    if (ckpt.empty()) throw ValidationError("--ckpt required for drl/enero");
    params = load_checkpoint(ckpt);
    opt.params = &params;
  }

  SweepResult result = run_sweep(dataset, opt);

  // Wall-time CDF per method.
  std::vector<std::pair<std::string, std::vector<double>>> walls;
  for (Method m : opt.methods) {
    std::vector<double> xs;
    for (const ScenarioResult& row : result.rows) {
      if (row.method == method_name(m) && std::isfinite(row.final_maxu)) {
        xs.push_back(row.wall_ms / 1000.0);
      }
    }
    walls.push_back({method_name(m), std::move(xs)});
  }
  write_text(g.out_dir + "/wall_cdf.svg",
             svg_cdf_chart(walls, "sweep execution cost", "seconds"));

  std::cout << "sweep rows: " << result.rows.size() << "\n";
  std::cout << "results in " << g.out_dir << "\n";
  return 0;
}

int cmd_metrics(const std::string& topo_file, const std::string& export_topo) {
  Topology t = load_any_topology(topo_file);
  TopologyMetrics m = compute_metrics(t);
  std::cout << "topology: " << t.name() << "\n";
  std::cout << "nodes: " << t.num_nodes() << ", directed links: " << t.num_links()
            << "\n";
  std::cout << "node degree (min, max, mean): (" << m.node_degree.min << ", "
            << m.node_degree.max << ", " << m.node_degree.mean << ")\n";
  std::cout << "edge betweenness (min, max, mean): (" << m.edge_betweenness.min
            << ", " << m.edge_betweenness.max << ", " << m.edge_betweenness.mean
            << ")\n";
  if (!export_topo.empty()) {
    save_topology_file(t, export_topo);
    std::cout << "topology written to " << export_topo << "\n";
  }
  return 0;
}

int cmd_baseline(const GlobalArgs& g, const std::string& which,
                 const std::string& topo_file, const std::string& tm_file,
                 double budget_s, double fraction, int top_links) {
  Topology t = load_any_topology(topo_file);
  TrafficMatrix tm = load_tm_file(tm_file);
  PathTable paths(t);
  const double initial = max_utilization(
      apply_routing(t, paths, tm, RoutingConfig::all_direct(t.num_nodes())));

  fs::create_directories(g.out_dir);
  if (which == "sap") {
    SapResult r = sap_route(t, tm);
    std::cout << "initial maxU: " << initial << "\n";
    std::cout << "sap maxU: " << r.maxu << "\n";
  } else {
    LsBaselineResult r = ls_baseline(t, paths, tm, SearchBudget{budget_s, -1},
                                     CriticalOptions{fraction, top_links});
    save_routing_config_file(r.config, g.out_dir + "/" + t.name() + "_ls.cfg");
    write_text(g.out_dir + "/" + t.name() + "_ls_trace.csv",
               iteration_trace_to_csv(r.detail.trace));
    std::cout << "initial maxU: " << r.initial_maxu << "\n";
    std::cout << "ls maxU: " << r.maxu << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enero: two-stage segment-routing traffic engineering"};
  app.require_subcommand(1);
  std::cout.precision(9);

  GlobalArgs g;
  app.add_option("--seed", g.seed, "global RNG seed");
  app.add_option("--config", g.config_path, "key-value config file");
  app.add_option("--out", g.out_dir, "output directory");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the DRL agent");
  std::vector<std::string> train_topos;
  std::string train_tm_dir;
  int train_episodes = -1, train_tms = 100, train_eval_tms = 50;
  double train_scale = -1.0, train_target = 1.1;
  train_cmd->add_option("--topology", train_topos, "topology file(s)")
      ->required()
      ->expected(-1);
  train_cmd->add_option("--tm-dir", train_tm_dir, "directory with <name>.tm<i> files");
  train_cmd->add_option("--episodes", train_episodes, "training episodes");
  train_cmd->add_option("--tms", train_tms, "generated training TMs per topology");
  train_cmd->add_option("--eval-tms", train_eval_tms, "generated held-out TMs");
  train_cmd->add_option("--scale", train_scale, "TM scale (default: calibrated)");
  train_cmd->add_option("--target-maxu", train_target, "calibration target");

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "run the two-stage optimizer");
  std::string opt_topo, opt_tm;
  EneroConfig opt_cfg;
  opt_cmd->add_option("--topology", opt_topo, "topology file")->required();
  opt_cmd->add_option("--tm", opt_tm, "traffic matrix file")->required();
  opt_cmd->add_option("--ckpt", opt_cfg.checkpoint_path, "checkpoint")->required();
  opt_cmd->add_option("--ls-budget", opt_cfg.ls_budget_seconds, "LS seconds");
  opt_cmd->add_option("--fraction", opt_cfg.critical_fraction, "critical fraction");
  opt_cmd->add_option("--top-links", opt_cfg.top_links, "most-loaded links");
  opt_cmd->add_flag("--stochastic-stage1", opt_cfg.stochastic_stage1,
                    "sample several stage-1 rollouts");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "replay a method over TMs");
  std::string eval_topo, eval_ckpt, eval_method = "drl";
  std::vector<std::string> eval_tm_files;
  int eval_tm_count = 50;
  double eval_budget = 60.0, eval_fraction = 0.15;
  int eval_top_links = 5;
  eval_cmd->add_option("--topology", eval_topo, "topology file")->required();
  eval_cmd->add_option("--tm", eval_tm_files, "TM file(s)")->expected(-1);
  eval_cmd->add_option("--n", eval_tm_count, "generated TM count when none given");
  eval_cmd->add_option("--ckpt", eval_ckpt, "checkpoint (drl/enero)");
  eval_cmd->add_option("--method", eval_method, "ospf|sap|ls|drl|enero");
  eval_cmd->add_option("--ls-budget", eval_budget, "LS seconds");
  eval_cmd->add_option("--fraction", eval_fraction, "critical fraction");
  eval_cmd->add_option("--top-links", eval_top_links, "most-loaded links");

  // gen-tm
  auto* gtm_cmd = app.add_subcommand("gen-tm", "generate traffic matrices");
  std::string gtm_topo;
  int gtm_n = 150;
  double gtm_scale = -1.0, gtm_target = 1.1;
  gtm_cmd->add_option("--topology", gtm_topo, "topology file")->required();
  gtm_cmd->add_option("--n", gtm_n, "number of TMs");
  gtm_cmd->add_option("--scale", gtm_scale, "fixed scale (default: calibrated)");
  gtm_cmd->add_option("--target-maxu", gtm_target, "calibration target");

  // gen-failures
  auto* gf_cmd = app.add_subcommand("gen-failures", "generate failure variants");
  std::string gf_topo;
  int gf_k = 1, gf_kmax = -1, gf_count = 20;
  gf_cmd->add_option("--topology", gf_topo, "topology file")->required();
  gf_cmd->add_option("--k", gf_k, "failures per variant");
  gf_cmd->add_option("--k-max", gf_kmax, "generate suites for k..k-max");
  gf_cmd->add_option("--count", gf_count, "variants per k");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run methods over a dataset dir");
  std::string sweep_dataset, sweep_methods = "ospf,sap,ls,enero", sweep_ckpt;
  double sweep_budget = 60.0;
  int sweep_tms = 5;
  sweep_cmd->add_option("--dataset", sweep_dataset, "directory of topologies")
      ->required();
  sweep_cmd->add_option("--methods", sweep_methods, "comma-separated methods");
  sweep_cmd->add_option("--ckpt", sweep_ckpt, "checkpoint for drl/enero");
  sweep_cmd->add_option("--budget", sweep_budget, "LS seconds per instance");
  sweep_cmd->add_option("--tms", sweep_tms, "TMs per topology when generated");

  // metrics
  auto* met_cmd = app.add_subcommand("metrics", "topology metrics");
  std::string met_topo, met_export;
  met_cmd->add_option("--topology", met_topo, "topology file (.topo or .graphml)")
      ->required();
  met_cmd->add_option("--write-topo", met_export, "convert/export to .topo");

  // baseline
  auto* base_cmd = app.add_subcommand("baseline", "run a comparison baseline");
  std::string base_which, base_topo, base_tm;
  double base_budget = -1.0, base_fraction = 0.15;
  int base_top_links = 5;
  base_cmd->add_option("which", base_which, "sap or ls")
      ->required()
      ->check(CLI::IsMember({"sap", "ls"}));
  base_cmd->add_option("--topology", base_topo, "topology file")->required();
  base_cmd->add_option("--tm", base_tm, "traffic matrix file")->required();
  base_cmd->add_option("--budget", base_budget, "LS seconds");
  base_cmd->add_option("--fraction", base_fraction, "critical fraction");
  base_cmd->add_option("--top-links", base_top_links, "most-loaded links");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*train_cmd) {
      return cmd_train(g, train_topos, train_tm_dir, train_episodes, train_tms,
                       train_eval_tms, train_scale, train_target);
    }
    if (*opt_cmd) return cmd_optimize(g, opt_topo, opt_tm, opt_cfg);
    if (*eval_cmd) {
      return cmd_evaluate(g, eval_topo, eval_tm_files, eval_tm_count, eval_ckpt,
                          eval_method, eval_budget, eval_fraction,
                          eval_top_links);
    }
    if (*gtm_cmd) return cmd_gen_tm(g, gtm_topo, gtm_n, gtm_scale, gtm_target);
    if (*gf_cmd) {
      return cmd_gen_failures(g, gf_topo, gf_k, gf_kmax < 0 ? gf_k : gf_kmax,
                              gf_count);
    }
    if (*sweep_cmd) {
      return cmd_sweep(g, sweep_dataset, sweep_methods, sweep_ckpt, sweep_budget,
                       sweep_tms);
    }
    if (*met_cmd) return cmd_metrics(met_topo, met_export);
    if (*base_cmd) {
      return cmd_baseline(g, base_which, base_topo, base_tm, base_budget,
                          base_fraction, base_top_links);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

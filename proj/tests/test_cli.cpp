#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enero/checkpoint.hpp"
#include "enero/scenarios.hpp"
#include "enero/search.hpp"

using namespace enero;
namespace fs = std::filesystem;

namespace {

#ifndef ENERO_CLI_PATH
#define ENERO_CLI_PATH "enero"
#endif

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "cli_output.txt";
  const std::string cmd = std::string(ENERO_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(raw);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("unknown subcommands exit with usage status 2") {
  TempDir dir("enero_cli_usage");
  CHECK(run_cli("frobnicate", dir.path).exit_code == 2);
  CHECK(run_cli("optimize --no-such-flag", dir.path).exit_code == 2);
}

TEST_CASE("validation failures exit with status 1") {
  TempDir dir("enero_cli_validation");
  RunResult r = run_cli("metrics --topology /nonexistent.topo", dir.path);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("gen-tm is deterministic under a fixed seed") {
  TempDir dir("enero_cli_gentm");
  const fs::path topo = dir.path / "g.topo";
  save_topology_file(gen_random_topology(5, 4, {10.0}, 3), topo.string());

  const std::string args = "--seed 7 --out " + (dir.path / "a").string() +
                           " gen-tm --topology " + topo.string() +
                           " --n 3 --scale 4.0";
  CHECK(run_cli(args, dir.path).exit_code == 0);
  const std::string args2 = "--seed 7 --out " + (dir.path / "b").string() +
                            " gen-tm --topology " + topo.string() +
                            " --n 3 --scale 4.0";
  CHECK(run_cli(args2, dir.path).exit_code == 0);
  for (int i = 0; i < 3; ++i) {
    const std::string name = "g.tm" + std::to_string(i);
    CHECK(read_file(dir.path / "a" / name) == read_file(dir.path / "b" / name));
    CHECK(!read_file(dir.path / "a" / name).empty());
  }
}

TEST_CASE("metrics prints the degree tuple and converts graphml") {
  TempDir dir("enero_cli_metrics");
  const fs::path topo = dir.path / "star.topo";
  save_topology_file(make_star(4), topo.string());
  RunResult r = run_cli("metrics --topology " + topo.string(), dir.path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("(1, 3, 1.5)") != std::string::npos);

  const fs::path gml = dir.path / "two.graphml";
  std::ofstream(gml) << "<graphml><key id=\"k\" for=\"edge\" "
                        "attr.name=\"capacity\"/><graph>"
                        "<node id=\"a\"/><node id=\"b\"/><node id=\"c\"/>"
                        "<edge source=\"a\" target=\"b\"><data key=\"k\">5"
                        "</data></edge>"
                        "<edge source=\"b\" target=\"c\"><data key=\"k\">5"
                        "</data></edge>"
                        "<edge source=\"a\" target=\"c\"><data key=\"k\">5"
                        "</data></edge></graph></graphml>";
  const fs::path converted = dir.path / "two.topo";
  RunResult conv = run_cli("metrics --topology " + gml.string() +
                               " --write-topo " + converted.string(),
                           dir.path);
  CHECK(conv.exit_code == 0);
  CHECK(load_topology_file(converted.string()).num_links() == 6);
}

TEST_CASE("baseline sap matches the library result") {
  TempDir dir("enero_cli_sap");
  Topology t = gen_random_topology(6, 5, {5.0, 10.0}, 11);
  const fs::path topo = dir.path / "t.topo";
  save_topology_file(t, topo.string());
  TrafficMatrix tm = generate_tm(t, 4, 4.0);
  const fs::path tmf = dir.path / "t.tm0";
  save_tm_file(tm, tmf.string());

  RunResult r = run_cli("baseline sap --topology " + topo.string() + " --tm " +
                            tmf.string(),
                        dir.path);
  CHECK(r.exit_code == 0);
  std::ostringstream expect;
  expect.precision(9);
  expect << "sap maxU: " << sap_route(t, tm).maxu;
  CHECK(r.output.find(expect.str()) != std::string::npos);
}

TEST_CASE("baseline ls emits a reloadable config") {
  TempDir dir("enero_cli_ls");
  Topology t = gen_random_topology(6, 6, {5.0, 20.0}, 13);
  const fs::path topo = dir.path / "t.topo";
  save_topology_file(t, topo.string());
  TrafficMatrix tm = generate_tm(t, 5, 4.0);
  const fs::path tmf = dir.path / "t.tm0";
  save_tm_file(tm, tmf.string());

  RunResult r = run_cli("--out " + (dir.path / "out").string() +
                            " baseline ls --topology " + topo.string() +
                            " --tm " + tmf.string(),
                        dir.path);
  CHECK(r.exit_code == 0);
  RoutingConfig cfg =
      load_routing_config_file((dir.path / "out" / "t_ls.cfg").string());
  CHECK(cfg.num_nodes() == 6);
}

TEST_CASE("optimize writes report, config and traces") {
  TempDir dir("enero_cli_opt");
  Topology t = gen_random_topology(6, 5, {5.0, 10.0}, 17);
  const fs::path topo = dir.path / "t.topo";
  save_topology_file(t, topo.string());
  save_tm_file(generate_tm(t, 6, 4.0), (dir.path / "t.tm0").string());
  const fs::path ckpt = dir.path / "p.ckpt";
  save_checkpoint(PolicyParams::init(5), {}, ckpt.string());

  RunResult r = run_cli("--out " + (dir.path / "out").string() +
                            " optimize --topology " + topo.string() + " --tm " +
                            (dir.path / "t.tm0").string() + " --ckpt " +
                            ckpt.string() + " --ls-budget 2",
                        dir.path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("post-LS max utilization") != std::string::npos);
  CHECK(fs::exists(dir.path / "out" / "t.cfg"));
  CHECK(fs::exists(dir.path / "out" / "t_report.txt"));
  CHECK(fs::exists(dir.path / "out" / "t_drl_trace.csv"));

  // The emitted config reloads and covers the topology.
  RoutingConfig cfg = load_routing_config_file((dir.path / "out" / "t.cfg").string());
  CHECK(cfg.num_demands() == 30);

  // Missing checkpoint is a runtime error, exit 1.
  RunResult bad = run_cli("optimize --topology " + topo.string() + " --tm " +
                              (dir.path / "t.tm0").string() +
                              " --ckpt /nonexistent.ckpt",
                          dir.path);
  CHECK(bad.exit_code == 1);
}

TEST_CASE("gen-failures writes a manifest of distinct variants") {
  TempDir dir("enero_cli_gf");
  Topology t = gen_random_topology(8, 9, {10.0}, 23);
  const fs::path topo = dir.path / "t.topo";
  save_topology_file(t, topo.string());
  RunResult r = run_cli("--out " + (dir.path / "out").string() +
                            " gen-failures --topology " + topo.string() +
                            " --k 1 --count 4",
                        dir.path);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir.path / "out" / "manifest.csv"));
  int variants = 0;
  for (const auto& e : fs::directory_iterator(dir.path / "out")) {
    if (e.path().extension() == ".topo") ++variants;
  }
  CHECK(variants == 4);
}

TEST_CASE("evaluate and sweep run end to end with plots") {
  TempDir dir("enero_cli_sweep");
  Topology t = gen_random_topology(5, 4, {10.0}, 29);
  const fs::path topo = dir.path / "ds" / "t.topo";
  fs::create_directories(dir.path / "ds");
  save_topology_file(t, topo.string());

  RunResult ev = run_cli("--seed 3 --out " + (dir.path / "ev").string() +
                             " evaluate --topology " + topo.string() +
                             " --method ls --n 2 --ls-budget 1",
                         dir.path);
  CHECK(ev.exit_code == 0);
  CHECK(fs::exists(dir.path / "ev" / "results.csv"));
  CHECK(fs::exists(dir.path / "ev" / "maxu_series.svg"));
  CHECK(fs::exists(dir.path / "ev" / "wall_cdf.svg"));

  RunResult sw = run_cli("--seed 3 --out " + (dir.path / "sw").string() +
                             " sweep --dataset " + (dir.path / "ds").string() +
                             " --methods ospf,sap,ls --tms 2 --budget 1",
                         dir.path);
  CHECK(sw.exit_code == 0);
  CHECK(fs::exists(dir.path / "sw" / "results.csv"));
  CHECK(fs::exists(dir.path / "sw" / "relative_to_ls.csv"));
  const std::string rel = read_file(dir.path / "sw" / "relative_to_ls.csv");
  CHECK(rel.find("ls,1") != std::string::npos);
}

#include "enero/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "enero/error.hpp"

namespace enero {

namespace {
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}
}  // namespace

std::string OptimizationReport::to_text() const {
  std::ostringstream out;
  out.precision(9);
  out << "initial max utilization:  " << initial_maxu << "\n";
  out << "post-DRL max utilization: " << post_drl_maxu
      << (drl_failed ? "  (stage failed, kept input)" : "") << "\n";
  out << "post-LS max utilization:  " << post_ls_maxu
      << (ls_failed ? "  (stage failed, kept input)" : "") << "\n";
  out << "DRL stage wall time: " << drl_wall_ms << " ms\n";
  out << "LS stage wall time:  " << ls_wall_ms << " ms\n";
  return out.str();
}

OptimizationReport enero_optimize(const Topology& t, const TrafficMatrix& tm,
                                  const PolicyParams& params,
                                  const EneroConfig& cfg) {
  OptimizationReport report;
  PathTable paths(t);
  const RoutingConfig initial = RoutingConfig::all_direct(t.num_nodes());
  report.initial_maxu = max_utilization(apply_routing(t, paths, tm, initial));

  // Stage 1: DRL episode over the critical demands of the OSPF state.
  RoutingConfig stage1 = initial;
  const auto t0 = Clock::now();
  try {
    Env env(t, tm, EnvOptions{cfg.critical_options()});
    EpisodeResult best = collect_episode(env, params, RolloutMode::kEval, nullptr);
    if (cfg.stochastic_stage1) {
      Rng rng(cfg.seed);
      for (int i = 1; i < cfg.stage1_rollouts; ++i) {
        Env env_i(t, tm, EnvOptions{cfg.critical_options()});
        EpisodeResult rollout =
            collect_episode(env_i, params, RolloutMode::kTrain, &rng);
        if (rollout.best_maxu < best.best_maxu) best = std::move(rollout);
      }
    }
    stage1 = best.best_config;
    report.drl_trace = std::move(best.trace);
  } catch (const std::exception&) {
    report.drl_failed = true;
    stage1 = initial;
  }
  report.drl_wall_ms = elapsed_ms(t0);
  report.post_drl_config = stage1;
  report.post_drl_maxu = max_utilization(apply_routing(t, paths, tm, stage1));

  // Stage 2: local search from DRL's solution, critical set recomputed from
  // that state.
  RoutingConfig stage2 = stage1;
  const auto t1 = Clock::now();
  try {
    CriticalSet critical =
        select_critical(t, paths, tm, stage1, cfg.critical_options());
    SearchBudget budget{cfg.ls_budget_seconds, cfg.ls_max_iterations};
    HillClimbResult hc = hill_climb(t, paths, tm, stage1, critical, budget);
    stage2 = hc.config;
    report.ls_trace = std::move(hc.trace);
  } catch (const std::exception&) {
    report.ls_failed = true;
    stage2 = stage1;
  }
  report.ls_wall_ms = elapsed_ms(t1);
  report.final_config = stage2;
  report.post_ls_maxu = max_utilization(apply_routing(t, paths, tm, stage2));
  return report;
}

OptimizationReport enero_optimize(const Topology& t, const TrafficMatrix& tm,
                                  const EneroConfig& cfg) {
  PolicyParams params = load_checkpoint(cfg.checkpoint_path);
  return enero_optimize(t, tm, params, cfg);
}

bool KeyValueConfig::has(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return true;
  }
  return false;
}

std::string KeyValueConfig::get(const std::string& key,
                                const std::string& fallback) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stod(get(key));
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "' is not a number");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stoi(get(key));
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "' is not an integer");
  }
}

KeyValueConfig parse_key_value_config(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    std::string key, value;
    if (eq != std::string::npos) {
      key = line.substr(0, eq);
      value = line.substr(eq + 1);
    } else {
      std::istringstream ls(line);
      ls >> key;
      std::getline(ls, value);
    }
    auto trim = [](std::string& s) {
      const char* ws = " \t\r";
      auto b = s.find_first_not_of(ws);
      auto e = s.find_last_not_of(ws);
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    if (key.empty()) continue;
    if (value.empty()) throw ParseError("config key '" + key + "' has no value", line_no);
    kv.entries.emplace_back(key, value);
  }
  return kv;
}

KeyValueConfig load_key_value_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_value_config(ss.str());
}

void apply_config(const KeyValueConfig& kv, TrainConfig* train, EneroConfig* enero) {
  if (train != nullptr) {
    TrainConfig& c = *train;
    c.episodes = kv.get_int("episodes", c.episodes);
    c.epochs = kv.get_int("training_epochs", c.epochs);
    c.minibatch = kv.get_int("minibatch_size", c.minibatch);
    c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
    c.lr_decay_rate = kv.get_double("decay_rate", c.lr_decay_rate);
    c.lr_decay_episodes = kv.get_int("decay_steps", c.lr_decay_episodes);
    c.entropy_beta = kv.get_double("entropy_beta", c.entropy_beta);
    c.entropy_beta_late = kv.get_double("entropy_beta_after", c.entropy_beta_late);
    c.entropy_step_episode =
        kv.get_int("entropy_step_episode", c.entropy_step_episode);
    c.gamma = kv.get_double("gae_gamma", c.gamma);
    c.lambda = kv.get_double("gae_lambda", c.lambda);
    c.grad_clip_norm = kv.get_double("gradient_clipping_value", c.grad_clip_norm);
    c.actor_l2 = kv.get_double("actor_l2_regularization", c.actor_l2);
    c.ppo_clip = kv.get_double("ppo_clip_epsilon", c.ppo_clip);
    c.critical.fraction =
        kv.get_double("critical_demands_percent", c.critical.fraction * 100.0) /
        100.0;
    c.critical.top_links = kv.get_int("top_links", c.critical.top_links);
    c.eval_tms = kv.get_int("evaluation_episodes_per_topology", c.eval_tms);
    c.eval_every = kv.get_int("eval_every", c.eval_every);
    c.hidden_dim = kv.get_int("gnn_hidden_state", c.hidden_dim);
    c.message_passing_steps =
        kv.get_int("message_passing_steps", c.message_passing_steps);
    c.readout_units = kv.get_int("readout_units", c.readout_units);
  }
  if (enero != nullptr) {
    EneroConfig& c = *enero;
    c.checkpoint_path = kv.get("checkpoint", c.checkpoint_path);
    c.critical_fraction =
        kv.get_double("critical_demands_percent", c.critical_fraction * 100.0) /
        100.0;
    c.top_links = kv.get_int("top_links", c.top_links);
    c.ls_budget_seconds = kv.get_double("ls_budget_seconds", c.ls_budget_seconds);
    c.ls_max_iterations = kv.get_int("ls_max_iterations",
                                     static_cast<int>(c.ls_max_iterations));
  }
}

}  // namespace enero

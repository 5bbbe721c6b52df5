#include "enero/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "enero/checkpoint.hpp"
#include "enero/error.hpp"

namespace enero {

double TrainConfig::lr_at(int episode) const {
  const int k = episode / lr_decay_episodes;
  return learning_rate * std::pow(lr_decay_rate, k);
}

double TrainConfig::beta_at(int episode) const {
  return episode < entropy_step_episode ? entropy_beta : entropy_beta_late;
}

int sample_action(const ActionDistribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (size_t i = 0; i < dist.probabilities.size(); ++i) {
    acc += dist.probabilities[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(dist.probabilities.size()) - 1;
}

EpisodeResult collect_episode(Env& env, const PolicyParams& params,
                              RolloutMode mode, Rng* rng) {
  if (mode == RolloutMode::kTrain && rng == nullptr) {
    throw ValidationError("train-mode rollouts need an rng");
  }
  EpisodeResult result;
  result.initial_maxu = env.initial_max_utilization();

  const LinkGraph link_graph = LinkGraph::build(env.topology());

  const bool training = mode == RolloutMode::kTrain;
  while (!env.done()) {
    auto candidate_graphs = env.candidate_actions();
    std::vector<const ActionGraph*> ptrs;
    ptrs.reserve(candidate_graphs.size());
    for (const auto& [mid, graph] : candidate_graphs) ptrs.push_back(&graph);

    auto candidates = std::make_shared<StackedBatch>(
        StackedBatch::build(ptrs, link_graph));
    ActionDistribution dist = score_actions(params, *candidates);

    // The critic only matters for the update phase; greedy evaluation skips
    // it along with the state snapshot.
    std::shared_ptr<StackedBatch> state;
    double value = 0.0;
    if (training) {
      ActionGraph state_graph = env.state_graph();
      state = std::make_shared<StackedBatch>(
          StackedBatch::build({&state_graph}, link_graph));
      value = critic_value(params, state_graph, link_graph);
    }

    const int action =
        mode == RolloutMode::kEval ? dist.argmax() : sample_action(dist, *rng);

    StepResult step = env.step(candidate_graphs[static_cast<size_t>(action)].first);

    Transition tr;
    tr.candidates = candidates;
    tr.state = state;
    tr.old_probabilities = dist.probabilities;
    // Log prob straight from the logits so tiny probabilities stay exact.
    {
      const double m = *std::max_element(dist.logits.begin(), dist.logits.end());
      double z = 0.0;
      for (double l : dist.logits) z += std::exp(l - m);
      tr.old_log_prob =
          dist.logits[static_cast<size_t>(action)] - m - std::log(z);
    }
    tr.action_index = action;
    tr.reward = step.reward;
    tr.done = step.done;
    tr.value = value;
    result.transitions.push_back(std::move(tr));
  }

  // The training algorithm re-queries the critic once more for the
  // bootstrap value.
  if (training) {
    ActionGraph terminal = env.state_graph();
    result.terminal_value = critic_value(params, terminal, link_graph);
  }

  result.final_maxu = env.current_max_utilization();
  auto [best_config, best_maxu] = env.best_result();
  result.best_config = std::move(best_config);
  result.best_maxu = best_maxu;
  result.trace = env.trace();
  return result;
}

GaeResult compute_gae(const std::vector<double>& values,
                      const std::vector<double>& rewards,
                      const std::vector<char>& dones, double gamma,
                      double lambda) {
  const size_t T = rewards.size();
  if (values.size() != T + 1) {
    throw ShapeError("compute_gae: values must hold T+1 entries");
  }
  if (dones.size() != T) throw ShapeError("compute_gae: dones must hold T entries");

  GaeResult out;
  out.advantages.assign(T, 0.0);
  out.returns.assign(T, 0.0);
  double acc = 0.0;
  for (size_t i = T; i-- > 0;) {
    const double delta = rewards[i] + gamma * values[i + 1] - values[i];
    // A done step ends the lambda chain; its own delta still bootstraps
    // through the appended terminal value.
    acc = delta + gamma * lambda * (dones[i] ? 0.0 : acc);
    out.advantages[i] = acc;
    out.returns[i] = acc + values[i];
  }
  return out;
}

PolicyGrads PolicyGrads::zeros_like(const PolicyParams& params) {
  PolicyGrads g;
  params.for_each_tensor([&g](const std::string&, const Mat& m) {
    g.tensors.push_back(Mat::Zero(m.rows(), m.cols()));
  });
  return g;
}

double PolicyGrads::global_norm() const {
  double sq = 0.0;
  for (const Mat& m : tensors) sq += m.squaredNorm();
  return std::sqrt(sq);
}

void PolicyGrads::scale(double k) {
  for (Mat& m : tensors) m *= k;
}

void clip_global_norm(PolicyGrads& grads, double max_norm) {
  const double norm = grads.global_norm();
  if (norm > max_norm && norm > 0.0) grads.scale(max_norm / norm);
}

LossBreakdown ppo_losses(const std::vector<const Transition*>& batch,
                         const PolicyParams& params, const TrainConfig& cfg,
                         double entropy_beta, PolicyGrads* grads) {
  if (batch.empty()) throw ValidationError("ppo_losses: empty batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  LossBreakdown out;
  for (const Transition* tr : batch) {
    nn::Tape tape;
    TapedPolicy policy(tape, params);

    auto lp = policy.actor_log_probs(*tr->candidates);
    auto lp_a = tape.pick(lp, tr->action_index, 0);
    auto ratio = tape.exp(tape.add_scalar(lp_a, -tr->old_log_prob));
    auto surr_raw = tape.scale(ratio, tr->advantage);
    auto surr_clip =
        tape.scale(tape.clamp(ratio, 1.0 - cfg.ppo_clip, 1.0 + cfg.ppo_clip),
                   tr->advantage);
    auto surrogate = tape.minimum(surr_raw, surr_clip);

    auto probs = tape.exp(lp);
    auto entropy = tape.scale(tape.sum(tape.mul(probs, lp)), -1.0);

    auto v = policy.critic_value(*tr->state);
    auto err = tape.add_scalar(tape.scale(v, -1.0), tr->ret);
    auto critic_sq = tape.square(err);

    // total_t = -surrogate + critic - beta * entropy
    auto total = tape.add(tape.scale(surrogate, -1.0), critic_sq);
    total = tape.add(total, tape.scale(entropy, -entropy_beta));

    out.actor_loss += -tape.value(surrogate)(0, 0) * inv_b;
    out.critic_loss += tape.value(critic_sq)(0, 0) * inv_b;
    out.entropy += tape.value(entropy)(0, 0) * inv_b;

    if (grads != nullptr) {
      tape.backward(total);
      for (size_t i = 0; i < policy.num_tensors(); ++i) {
        grads->tensors[i] += policy.gradient(i) * inv_b;
      }
    }
  }

  // Actor L2 penalty, added once per batch. Its gradient is analytic.
  double l2 = 0.0;
  size_t index = 0;
  const_cast<PolicyParams&>(params).for_each_tensor(
      [&](const std::string& name, Mat& m) {
        if (name.rfind("actor", 0) == 0 && name.find(".weight") != std::string::npos) {
          l2 += m.squaredNorm();
          if (grads != nullptr) grads->tensors[index] += 2.0 * cfg.actor_l2 * m;
        }
        ++index;
      });
  out.actor_loss += cfg.actor_l2 * l2;

  out.entropy_term = entropy_beta * out.entropy;
  out.total = out.actor_loss + out.critic_loss - out.entropy_term;
  return out;
}

Adam::Adam(const PolicyParams& params, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  params.for_each_tensor([this](const std::string&, const Mat& m) {
    m_.push_back(Mat::Zero(m.rows(), m.cols()));
    v_.push_back(Mat::Zero(m.rows(), m.cols()));
  });
}

void Adam::step(PolicyParams& params, const PolicyGrads& grads, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  size_t i = 0;
  params.for_each_tensor([&](const std::string&, Mat& m) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads.tensors[i];
    v_[i] = beta2_ * v_[i].array().matrix() +
            (1.0 - beta2_) * grads.tensors[i].array().square().matrix();
    Mat mhat = m_[i] / c1;
    Mat vhat = v_[i] / c2;
    m.array() -= lr * mhat.array() / (vhat.array().sqrt() + epsilon_);
    ++i;
  });
}

double evaluate_policy(const PolicyParams& params, const Topology& t,
                       const std::vector<TrafficMatrix>& tms,
                       const CriticalOptions& critical, int limit) {
  int count = limit < 0 ? static_cast<int>(tms.size())
                        : std::min<int>(limit, static_cast<int>(tms.size()));
  if (count == 0) throw ValidationError("evaluate_policy: no TMs");
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    Env env(t, tms[static_cast<size_t>(i)], EnvOptions{critical});
    EpisodeResult ep = collect_episode(env, params, RolloutMode::kEval, nullptr);
    sum += ep.best_maxu;
  }
  return sum / count;
}

std::string train_log_to_csv(const std::vector<EpisodeLogRow>& log,
                             const std::vector<std::string>& topology_names) {
  std::ostringstream out;
  out.precision(17);
  out << "episode,mean_reward,lr,entropy_beta,actor_loss,critic_loss,entropy";
  for (const std::string& name : topology_names) out << ",eval_maxu_" << name;
  out << "\n";
  for (const EpisodeLogRow& row : log) {
    out << row.episode << "," << row.mean_reward << "," << row.lr << ","
        << row.entropy_beta << "," << row.actor_loss << "," << row.critic_loss
        << "," << row.entropy;
    for (double v : row.eval_maxu) out << "," << v;
    out << "\n";
  }
  return out.str();
}

HyperBlock train_hyper_block(const TrainConfig& cfg) {
  auto str = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  return {
      {"evaluation_episodes_per_topology", std::to_string(cfg.eval_tms)},
      {"training_epochs", std::to_string(cfg.epochs)},
      {"critical_demands_percent", str(cfg.critical.fraction * 100.0)},
      {"minibatch_size", std::to_string(cfg.minibatch)},
      {"learning_rate", str(cfg.learning_rate)},
      {"decay_rate", str(cfg.lr_decay_rate)},
      {"decay_steps", std::to_string(cfg.lr_decay_episodes)},
      {"entropy_beta", str(cfg.entropy_beta)},
      {"entropy_beta_after", str(cfg.entropy_beta_late)},
      {"entropy_step_episode", std::to_string(cfg.entropy_step_episode)},
      {"gae_gamma", str(cfg.gamma)},
      {"gae_lambda", str(cfg.lambda)},
      {"gradient_clipping_value", str(cfg.grad_clip_norm)},
      {"actor_l2_regularization", str(cfg.actor_l2)},
      {"ppo_clip_epsilon", str(cfg.ppo_clip)},
  };
}

TrainResult train(const std::vector<TrainTopology>& topologies, TrainConfig cfg,
                  std::uint64_t seed, const std::string& out_dir,
                  std::ostream* progress) {
  if (topologies.empty()) throw ValidationError("train: no topologies");
  for (const TrainTopology& tt : topologies) {
    if (tt.train_tms.empty()) throw ValidationError("train: topology without TMs");
  }
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  TrainResult result;
  result.params = PolicyParams::init(seed, cfg.hidden_dim,
                                     cfg.message_passing_steps, cfg.readout_units);
  result.best_params = result.params;
  result.best_eval_maxu = std::numeric_limits<double>::infinity();

  Adam adam(result.params);
  Rng rng(seed ^ 0xd1b54a32d192ed03ULL);

  std::vector<std::string> names;
  for (const TrainTopology& tt : topologies) names.push_back(tt.topology.name());
  std::vector<double> last_eval(topologies.size(),
                                std::numeric_limits<double>::quiet_NaN());

  auto run_eval = [&](const PolicyParams& params) {
    double total = 0.0;
    for (size_t i = 0; i < topologies.size(); ++i) {
      const auto& tms = topologies[i].eval_tms.empty() ? topologies[i].train_tms
                                                       : topologies[i].eval_tms;
      last_eval[i] =
          evaluate_policy(params, topologies[i].topology, tms, cfg.critical,
                          cfg.eval_tms);
      total += last_eval[i];
    }
    return total / static_cast<double>(topologies.size());
  };

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double lr = cfg.lr_at(ep);
    const double beta = cfg.beta_at(ep);

    // Collection: one trajectory per topology, GAE per trajectory.
    std::vector<Transition> transitions;
    double reward_sum = 0.0;
    int reward_count = 0;
    for (const TrainTopology& tt : topologies) {
      const TrafficMatrix& tm =
          tt.train_tms[static_cast<size_t>(ep) % tt.train_tms.size()];
      Env env(tt.topology, tm, EnvOptions{cfg.critical});
      EpisodeResult episode =
          collect_episode(env, result.params, RolloutMode::kTrain, &rng);
      if (episode.transitions.empty()) continue;

      std::vector<double> values;
      std::vector<double> rewards;
      std::vector<char> dones;
      for (const Transition& tr : episode.transitions) {
        values.push_back(tr.value);
        rewards.push_back(tr.reward);
        dones.push_back(tr.done ? 1 : 0);
        reward_sum += tr.reward;
        ++reward_count;
      }
      values.push_back(episode.terminal_value);
      GaeResult gae = compute_gae(values, rewards, dones, cfg.gamma, cfg.lambda);
      for (size_t i = 0; i < episode.transitions.size(); ++i) {
        episode.transitions[i].advantage = gae.advantages[i];
        episode.transitions[i].ret = gae.returns[i];
      }
      for (Transition& tr : episode.transitions) {
        transitions.push_back(std::move(tr));
      }
    }
    if (transitions.empty()) {
      throw ValidationError("train: episode produced no transitions");
    }

    if (cfg.normalize_advantages && transitions.size() > 1) {
      double mean = 0.0;
      for (const Transition& tr : transitions) mean += tr.advantage;
      mean /= static_cast<double>(transitions.size());
      double var = 0.0;
      for (const Transition& tr : transitions) {
        var += (tr.advantage - mean) * (tr.advantage - mean);
      }
      var /= static_cast<double>(transitions.size());
      const double denom = std::sqrt(var) + 1e-8;
      for (Transition& tr : transitions) tr.advantage = (tr.advantage - mean) / denom;
    }

    // Update phase: epochs x shuffled minibatches.
    double actor_loss = 0.0, critic_loss = 0.0, entropy = 0.0;
    int updates = 0;
    std::vector<size_t> order(transitions.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
      }
      for (size_t start = 0; start < order.size();
           start += static_cast<size_t>(cfg.minibatch)) {
        const size_t end =
            std::min(order.size(), start + static_cast<size_t>(cfg.minibatch));
        std::vector<const Transition*> batch;
        batch.reserve(end - start);
        for (size_t i = start; i < end; ++i) batch.push_back(&transitions[order[i]]);

        PolicyGrads grads = PolicyGrads::zeros_like(result.params);
        LossBreakdown losses = ppo_losses(batch, result.params, cfg, beta, &grads);
        if (!std::isfinite(losses.total)) {
          std::ostringstream diag;
          diag << "NaN loss at episode " << ep << ": actor=" << losses.actor_loss
               << " critic=" << losses.critic_loss << " entropy=" << losses.entropy;
          if (!out_dir.empty()) {
            std::ofstream dump(out_dir + "/nan_dump.txt");
            dump << diag.str() << "\n";
            result.params.for_each_tensor([&dump](const std::string& name,
                                                  const Mat& m) {
              dump << name << " norm=" << m.norm() << "\n";
            });
          }
          throw Error(diag.str());
        }
        clip_global_norm(grads, cfg.grad_clip_norm);
        adam.step(result.params, grads, lr);
        actor_loss += losses.actor_loss;
        critic_loss += losses.critic_loss;
        entropy += losses.entropy;
        ++updates;
      }
    }
    if (!result.params.all_finite()) {
      throw Error("non-finite parameters after episode " + std::to_string(ep));
    }

    const bool eval_due = (ep + 1) % cfg.eval_every == 0 || ep + 1 == cfg.episodes;
    if (eval_due) {
      const double mean_eval = run_eval(result.params);
      if (mean_eval < result.best_eval_maxu) {
        result.best_eval_maxu = mean_eval;
        result.best_params = result.params;
        if (!out_dir.empty()) {
          save_checkpoint(result.best_params, train_hyper_block(cfg),
                          out_dir + "/best.ckpt");
        }
      }
    }

    EpisodeLogRow row;
    row.episode = ep;
    row.mean_reward = reward_count > 0 ? reward_sum / reward_count : 0.0;
    row.lr = lr;
    row.entropy_beta = beta;
    row.actor_loss = actor_loss / updates;
    row.critic_loss = critic_loss / updates;
    row.entropy = entropy / updates;
    row.eval_maxu = last_eval;
    result.log.push_back(row);

    if (progress != nullptr && ((ep + 1) % 10 == 0 || ep + 1 == cfg.episodes)) {
      (*progress) << "episode " << (ep + 1) << "/" << cfg.episodes
                  << " mean_reward=" << row.mean_reward
                  << " actor=" << row.actor_loss << " critic=" << row.critic_loss
                  << "\n";
    }
  }

  if (!out_dir.empty()) {
    std::ofstream log(out_dir + "/log.csv");
    log << train_log_to_csv(result.log, names);
    save_checkpoint(result.params, train_hyper_block(cfg), out_dir + "/last.ckpt");
  }
  return result;
}

}  // namespace enero

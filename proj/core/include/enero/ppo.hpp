#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "enero/checkpoint.hpp"
#include "enero/critical.hpp"
#include "enero/env.hpp"
#include "enero/policy.hpp"
#include "enero/rng.hpp"

namespace enero {

struct TrainConfig {
  int episodes = 200;
  int epochs = 8;
  int minibatch = 55;
  double learning_rate = 2e-4;
  double lr_decay_rate = 0.96;
  int lr_decay_episodes = 60;
  double entropy_beta = 0.01;
  double entropy_beta_late = 0.001;
  int entropy_step_episode = 60;
  double gamma = 0.99;
  double lambda = 0.95;
  double grad_clip_norm = 0.5;
  double actor_l2 = 1e-4;
  double ppo_clip = 0.2;
  bool normalize_advantages = true;
  CriticalOptions critical;

  int eval_every = 25;  // episodes between held-out evaluations
  int eval_tms = 20;    // held-out TMs scored per topology per evaluation

  int hidden_dim = 20;
  int message_passing_steps = 5;
  int readout_units = 20;

  /// Multiplicative decay every lr_decay_episodes episodes.
  double lr_at(int episode) const;
  /// Steps down exactly once, at entropy_step_episode.
  double beta_at(int episode) const;
};

/// One environment step as stored during collection, with everything the
/// update phase needs to re-run the forward pass under current parameters.
struct Transition {
  std::shared_ptr<const StackedBatch> candidates;
  std::shared_ptr<const StackedBatch> state;
  std::vector<double> old_probabilities;
  double old_log_prob = 0.0;
  int action_index = 0;
  double reward = 0.0;
  bool done = false;
  double value = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

enum class RolloutMode { kTrain, kEval };

/// Inverse-CDF sample from an action distribution.
int sample_action(const ActionDistribution& dist, Rng& rng);

struct EpisodeResult {
  std::vector<Transition> transitions;
  double terminal_value = 0.0;  // critic bootstrap at the terminal state
  double initial_maxu = 0.0;
  double final_maxu = 0.0;
  double best_maxu = 0.0;
  RoutingConfig best_config;
  std::vector<StepTraceRow> trace;
};

/// Runs one full episode. Train mode samples the action distribution, eval
/// mode takes the argmax; rng may be null in eval mode. Critic values, state
/// snapshots and the terminal bootstrap are only produced in train mode —
/// greedy evaluation never consumes them.
EpisodeResult collect_episode(Env& env, const PolicyParams& params,
                              RolloutMode mode, Rng* rng);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// Standard GAE over one trajectory. values holds T+1 entries (bootstrap
/// appended); rewards and dones hold T. Throws ShapeError on mismatch.
GaeResult compute_gae(const std::vector<double>& values,
                      const std::vector<double>& rewards,
                      const std::vector<char>& dones, double gamma,
                      double lambda);

/// Gradient buffers in PolicyParams::for_each_tensor order.
struct PolicyGrads {
  std::vector<Mat> tensors;

  static PolicyGrads zeros_like(const PolicyParams& params);
  double global_norm() const;
  void scale(double k);
};

/// Scales gradients so the global norm does not exceed max_norm.
void clip_global_norm(PolicyGrads& grads, double max_norm);

struct LossBreakdown {
  double actor_loss = 0.0;   // clipped surrogate plus actor L2
  double critic_loss = 0.0;  // MSE against returns
  double entropy = 0.0;      // raw mean policy entropy
  double entropy_term = 0.0; // beta-scaled
  double total = 0.0;
};

/// PPO losses over a minibatch, re-forwarded under `params`. When grads is
/// non-null the gradients of the total loss are accumulated into it.
LossBreakdown ppo_losses(const std::vector<const Transition*>& batch,
                         const PolicyParams& params, const TrainConfig& cfg,
                         double entropy_beta, PolicyGrads* grads);

class Adam {
 public:
  explicit Adam(const PolicyParams& params, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);
  void step(PolicyParams& params, const PolicyGrads& grads, double lr);

 private:
  std::vector<Mat> m_, v_;
  double beta1_, beta2_, epsilon_;
  long t_ = 0;
};

struct TrainTopology {
  Topology topology;
  std::vector<TrafficMatrix> train_tms;
  std::vector<TrafficMatrix> eval_tms;
};

struct EpisodeLogRow {
  int episode = 0;
  double mean_reward = 0.0;
  double lr = 0.0;
  double entropy_beta = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  std::vector<double> eval_maxu;  // per topology, last known
};

struct TrainResult {
  PolicyParams params;        // after the final episode
  PolicyParams best_params;   // best held-out evaluation
  double best_eval_maxu = 0.0;
  std::vector<EpisodeLogRow> log;
};

std::string train_log_to_csv(const std::vector<EpisodeLogRow>& log,
                             const std::vector<std::string>& topology_names);

/// Hyperparameter provenance written into checkpoints.
HyperBlock train_hyper_block(const TrainConfig& cfg);

/// Algorithm: per episode, collect one trajectory per topology, compute GAE,
/// then run `epochs` passes of minibatch PPO updates with clipped gradients
/// and the lr/entropy schedules. Periodically evaluates on held-out TMs and
/// retains the best checkpoint. Throws on NaN losses.
/// When out_dir is nonempty, writes log.csv, last.ckpt and best.ckpt there.
TrainResult train(const std::vector<TrainTopology>& topologies, TrainConfig cfg,
                  std::uint64_t seed, const std::string& out_dir = "",
                  std::ostream* progress = nullptr);

/// Mean best-episode max utilization of greedy rollouts over the given TMs.
double evaluate_policy(const PolicyParams& params, const Topology& t,
                       const std::vector<TrafficMatrix>& tms,
                       const CriticalOptions& critical, int limit = -1);

}  // namespace enero

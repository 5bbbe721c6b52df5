#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enero/env.hpp"
#include "enero/nn/tape.hpp"
#include "enero/topology.hpp"

namespace enero {

using nn::Mat;

/// Directed-link adjacency: link a feeds link b when head(a) == tail(b).
/// Messages flow along traffic direction.
struct LinkGraph {
  int num_links = 0;
  std::vector<int> from;
  std::vector<int> to;

  static LinkGraph build(const Topology& t);
};

/// Candidate graphs stacked into one block-diagonal batch so a whole action
/// set is encoded with a single pass.
struct StackedBatch {
  Mat features;             // (num_blocks * L) x 4
  std::vector<int> from;    // stacked adjacency pairs
  std::vector<int> to;
  std::vector<int> block;   // row -> block id, for per-graph readout sums
  int num_blocks = 0;
  int rows = 0;

  static StackedBatch build(const std::vector<const ActionGraph*>& graphs,
                            const LinkGraph& g);
};

struct DenseLayer {
  Mat weight;  // in x out
  Mat bias;    // 1 x out
};

/// One GNN head: message/update functions for the rounds, two-layer readout.
struct GnnBranch {
  DenseLayer message;
  DenseLayer update;
  DenseLayer readout_hidden;
  DenseLayer readout_out;
};

/// All learnable weights. Actor and critic are fully separate stacks.
struct PolicyParams {
  int hidden_dim = 20;
  int message_passing_steps = 5;
  int readout_units = 20;
  GnnBranch actor;
  GnnBranch critic;

  /// Variance-scaled (LeCun normal) weights, zero biases, seeded.
  static PolicyParams init(std::uint64_t seed, int hidden_dim = 20,
                           int message_passing_steps = 5, int readout_units = 20);

  /// Visits every tensor as (name, matrix) in a fixed order.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    auto branch = [&fn](const char* prefix, GnnBranch& b) {
      std::string p(prefix);
      fn(p + ".message.weight", b.message.weight);
      fn(p + ".message.bias", b.message.bias);
      fn(p + ".update.weight", b.update.weight);
      fn(p + ".update.bias", b.update.bias);
      fn(p + ".readout_hidden.weight", b.readout_hidden.weight);
      fn(p + ".readout_hidden.bias", b.readout_hidden.bias);
      fn(p + ".readout_out.weight", b.readout_out.weight);
      fn(p + ".readout_out.bias", b.readout_out.bias);
    };
    branch("actor", actor);
    branch("critic", critic);
  }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    const_cast<PolicyParams*>(this)->for_each_tensor(
        [&fn](const std::string& name, Mat& m) { fn(name, static_cast<const Mat&>(m)); });
  }

  bool all_finite() const;
};

struct ActionDistribution {
  std::vector<double> probabilities;
  std::vector<double> logits;
  int argmax() const;
};

/// T rounds of message passing over the link graph; returns per-link hidden
/// states (rows x hidden_dim). Hidden state starts as the 4 features padded
/// with zeros.
Mat encode(const GnnBranch& branch, int hidden_dim, int steps, const Mat& features,
           const std::vector<int>& from, const std::vector<int>& to);

/// Per-candidate logits via the actor readout over summed hidden states.
std::vector<double> action_logits(const PolicyParams& p, const StackedBatch& batch);

ActionDistribution score_actions(const PolicyParams& p, const Env& env);
ActionDistribution score_actions(const PolicyParams& p,
                                 const std::vector<const ActionGraph*>& candidates,
                                 const LinkGraph& g);
ActionDistribution score_actions(const PolicyParams& p, const StackedBatch& batch);

double critic_value(const PolicyParams& p, const Env& env);
double critic_value(const PolicyParams& p, const ActionGraph& state,
                    const LinkGraph& g);

/// Tape-recorded forward pass: the same computation as the fast path, but
/// differentiable. Parameters are registered once per Taped instance.
class TapedPolicy {
 public:
  TapedPolicy(nn::Tape& tape, const PolicyParams& p);

  /// C x 1 log-probabilities over the stacked candidates.
  nn::Tape::VarId actor_log_probs(const StackedBatch& batch);
  /// 1 x 1 critic value of a single state graph.
  nn::Tape::VarId critic_value(const StackedBatch& state);
  /// Sum of squared actor weight entries (biases excluded).
  nn::Tape::VarId actor_weight_l2();

  /// Gradient of tensor `i` in for_each_tensor order; zero matrix when the
  /// tensor did not participate.
  Mat gradient(size_t i) const;
  size_t num_tensors() const { return ids_.size(); }

 private:
  struct BranchIds {
    nn::Tape::VarId message_w, message_b, update_w, update_b;
    nn::Tape::VarId readout_hidden_w, readout_hidden_b, readout_out_w, readout_out_b;
  };
  nn::Tape::VarId encode_and_readout(const BranchIds& ids, const StackedBatch& batch);

  nn::Tape* tape_;
  const PolicyParams* params_;
  BranchIds actor_ids_{}, critic_ids_{};
  std::vector<nn::Tape::VarId> ids_;  // for_each_tensor order
};

}  // namespace enero

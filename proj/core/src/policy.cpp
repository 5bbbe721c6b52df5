#include "enero/policy.hpp"

#include <algorithm>
#include <cmath>

#include "enero/error.hpp"
#include "enero/rng.hpp"

namespace enero {

LinkGraph LinkGraph::build(const Topology& t) {
  LinkGraph g;
  g.num_links = t.num_links();
  for (LinkId a = 0; a < t.num_links(); ++a) {
    const Link& la = t.link(a);
    for (LinkId b : t.out_links(la.head)) {
      g.from.push_back(a);
      g.to.push_back(b);
    }
  }
  return g;
}

StackedBatch StackedBatch::build(const std::vector<const ActionGraph*>& graphs,
                                 const LinkGraph& g) {
  StackedBatch batch;
  batch.num_blocks = static_cast<int>(graphs.size());
  const int L = g.num_links;
  batch.rows = batch.num_blocks * L;
  batch.features.resize(batch.rows, ActionGraph::kNumFeatures);
  batch.block.resize(static_cast<size_t>(batch.rows));
  const size_t pairs = g.from.size();
  batch.from.reserve(pairs * static_cast<size_t>(batch.num_blocks));
  batch.to.reserve(pairs * static_cast<size_t>(batch.num_blocks));

  for (int c = 0; c < batch.num_blocks; ++c) {
    const ActionGraph& ag = *graphs[static_cast<size_t>(c)];
    if (ag.num_links != L) throw ShapeError("action graph does not match link graph");
    const int base = c * L;
    for (int l = 0; l < L; ++l) {
      for (int f = 0; f < ActionGraph::kNumFeatures; ++f) {
        batch.features(base + l, f) = ag.feature(l, f);
      }
      batch.block[static_cast<size_t>(base + l)] = c;
    }
    for (size_t i = 0; i < pairs; ++i) {
      batch.from.push_back(base + g.from[i]);
      batch.to.push_back(base + g.to[i]);
    }
  }
  return batch;
}

namespace {

Mat scaled_normal(Rng& rng, int rows, int cols, double stddev) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, stddev);
  }
  return m;
}

DenseLayer init_layer(Rng& rng, int in, int out) {
  // LeCun normal, the variance scaling that keeps selu self-normalizing.
  return DenseLayer{scaled_normal(rng, in, out, 1.0 / std::sqrt(in)),
                    Mat::Zero(1, out)};
}

DenseLayer init_head(Rng& rng, int in, int out) {
  // Output heads start small: the readout input is a sum over all links, so
  // unit-scale weights would make the initial policy near-deterministic and
  // kill exploration.
  return DenseLayer{scaled_normal(rng, in, out, 0.01), Mat::Zero(1, out)};
}

Mat selu_mat(const Mat& x) {
  return x.unaryExpr([](double v) { return nn::selu_scalar(v); });
}

}  // namespace

PolicyParams PolicyParams::init(std::uint64_t seed, int hidden_dim,
                                int message_passing_steps, int readout_units) {
  PolicyParams p;
  p.hidden_dim = hidden_dim;
  p.message_passing_steps = message_passing_steps;
  p.readout_units = readout_units;
  Rng rng(seed);
  auto make_branch = [&](GnnBranch& b) {
    b.message = init_layer(rng, 2 * hidden_dim, hidden_dim);
    b.update = init_layer(rng, 2 * hidden_dim, hidden_dim);
    b.readout_hidden = init_layer(rng, hidden_dim, readout_units);
    b.readout_out = init_head(rng, readout_units, 1);
  };
  make_branch(p.actor);
  make_branch(p.critic);
  return p;
}

bool PolicyParams::all_finite() const {
  bool finite = true;
  for_each_tensor([&finite](const std::string&, const Mat& m) {
    if (!m.allFinite()) finite = false;
  });
  return finite;
}

int ActionDistribution::argmax() const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(probabilities.size()); ++i) {
    if (probabilities[static_cast<size_t>(i)] > probabilities[static_cast<size_t>(best)]) {
      best = i;
    }
  }
  return best;
}

Mat encode(const GnnBranch& branch, int hidden_dim, int steps, const Mat& features,
           const std::vector<int>& from, const std::vector<int>& to) {
  const Eigen::Index rows = features.rows();
  Mat h = Mat::Zero(rows, hidden_dim);
  h.leftCols(features.cols()) = features;

  const Eigen::Index pairs = static_cast<Eigen::Index>(from.size());
  Mat cat(pairs, 2 * hidden_dim);
  for (int step = 0; step < steps; ++step) {
    for (Eigen::Index i = 0; i < pairs; ++i) {
      cat.row(i).leftCols(hidden_dim) = h.row(from[static_cast<size_t>(i)]);
      cat.row(i).rightCols(hidden_dim) = h.row(to[static_cast<size_t>(i)]);
    }
    Mat msg = selu_mat((cat * branch.message.weight).rowwise() +
                       branch.message.bias.row(0));
    Mat agg = Mat::Zero(rows, hidden_dim);
    for (Eigen::Index i = 0; i < pairs; ++i) {
      agg.row(to[static_cast<size_t>(i)]) += msg.row(i);
    }
    Mat upd_in(rows, 2 * hidden_dim);
    upd_in << agg, h;
    h = selu_mat((upd_in * branch.update.weight).rowwise() +
                 branch.update.bias.row(0));
  }
  return h;
}

namespace {

// Summed hidden states per block, then the two-layer readout.
Eigen::VectorXd readout(const GnnBranch& branch, const Mat& hidden,
                        const std::vector<int>& block, int num_blocks) {
  Mat sums = Mat::Zero(num_blocks, hidden.cols());
  for (Eigen::Index r = 0; r < hidden.rows(); ++r) {
    sums.row(block[static_cast<size_t>(r)]) += hidden.row(r);
  }
  Mat hid = selu_mat((sums * branch.readout_hidden.weight).rowwise() +
                     branch.readout_hidden.bias.row(0));
  Mat out = (hid * branch.readout_out.weight).rowwise() +
            branch.readout_out.bias.row(0);
  return out.col(0);
}

}  // namespace

std::vector<double> action_logits(const PolicyParams& p, const StackedBatch& batch) {
  Mat hidden = encode(p.actor, p.hidden_dim, p.message_passing_steps,
                      batch.features, batch.from, batch.to);
  Eigen::VectorXd logits = readout(p.actor, hidden, batch.block, batch.num_blocks);
  return {logits.data(), logits.data() + logits.size()};
}

ActionDistribution score_actions(const PolicyParams& p,
                                 const std::vector<const ActionGraph*>& candidates,
                                 const LinkGraph& g) {
  if (candidates.empty()) throw ValidationError("score_actions needs candidates");
  return score_actions(p, StackedBatch::build(candidates, g));
}

ActionDistribution score_actions(const PolicyParams& p, const StackedBatch& batch) {
  if (batch.num_blocks < 1) throw ValidationError("score_actions needs candidates");
  ActionDistribution dist;
  dist.logits = action_logits(p, batch);

  // Softmax, shifted for stability.
  const double m = *std::max_element(dist.logits.begin(), dist.logits.end());
  double z = 0.0;
  dist.probabilities.resize(dist.logits.size());
  for (size_t i = 0; i < dist.logits.size(); ++i) {
    dist.probabilities[i] = std::exp(dist.logits[i] - m);
    z += dist.probabilities[i];
  }
  for (double& v : dist.probabilities) v /= z;
  return dist;
}

ActionDistribution score_actions(const PolicyParams& p, const Env& env) {
  auto candidates = env.candidate_actions();
  std::vector<const ActionGraph*> graphs;
  graphs.reserve(candidates.size());
  std::vector<ActionGraph> storage;
  storage.reserve(candidates.size());
  for (auto& [mid, graph] : candidates) storage.push_back(std::move(graph));
  for (const ActionGraph& graph : storage) graphs.push_back(&graph);
  return score_actions(p, graphs, LinkGraph::build(env.topology()));
}

double critic_value(const PolicyParams& p, const ActionGraph& state,
                    const LinkGraph& g) {
  StackedBatch batch = StackedBatch::build({&state}, g);
  Mat hidden = encode(p.critic, p.hidden_dim, p.message_passing_steps,
                      batch.features, batch.from, batch.to);
  return readout(p.critic, hidden, batch.block, 1)(0);
}

double critic_value(const PolicyParams& p, const Env& env) {
  return critic_value(p, env.state_graph(), LinkGraph::build(env.topology()));
}

TapedPolicy::TapedPolicy(nn::Tape& tape, const PolicyParams& p)
    : tape_(&tape), params_(&p) {
  auto reg = [this](const Mat& m) {
    nn::Tape::VarId id = tape_->input(m, /*requires_grad=*/true);
    ids_.push_back(id);
    return id;
  };
  // Registration order must match for_each_tensor.
  actor_ids_.message_w = reg(p.actor.message.weight);
  actor_ids_.message_b = reg(p.actor.message.bias);
  actor_ids_.update_w = reg(p.actor.update.weight);
  actor_ids_.update_b = reg(p.actor.update.bias);
  actor_ids_.readout_hidden_w = reg(p.actor.readout_hidden.weight);
  actor_ids_.readout_hidden_b = reg(p.actor.readout_hidden.bias);
  actor_ids_.readout_out_w = reg(p.actor.readout_out.weight);
  actor_ids_.readout_out_b = reg(p.actor.readout_out.bias);
  critic_ids_.message_w = reg(p.critic.message.weight);
  critic_ids_.message_b = reg(p.critic.message.bias);
  critic_ids_.update_w = reg(p.critic.update.weight);
  critic_ids_.update_b = reg(p.critic.update.bias);
  critic_ids_.readout_hidden_w = reg(p.critic.readout_hidden.weight);
  critic_ids_.readout_hidden_b = reg(p.critic.readout_hidden.bias);
  critic_ids_.readout_out_w = reg(p.critic.readout_out.weight);
  critic_ids_.readout_out_b = reg(p.critic.readout_out.bias);
}

nn::Tape::VarId TapedPolicy::encode_and_readout(const BranchIds& ids,
                                                const StackedBatch& batch) {
  nn::Tape& t = *tape_;
  const int H = params_->hidden_dim;
  Mat h0 = Mat::Zero(batch.rows, H);
  h0.leftCols(batch.features.cols()) = batch.features;
  nn::Tape::VarId h = t.input(std::move(h0), false);

  for (int step = 0; step < params_->message_passing_steps; ++step) {
    nn::Tape::VarId own = t.gather_rows(h, batch.from);
    nn::Tape::VarId nbr = t.gather_rows(h, batch.to);
    nn::Tape::VarId msg = t.selu(
        t.add_rowvec(t.matmul(t.hcat(own, nbr), ids.message_w), ids.message_b));
    nn::Tape::VarId agg = t.scatter_sum_rows(msg, batch.to, batch.rows);
    h = t.selu(
        t.add_rowvec(t.matmul(t.hcat(agg, h), ids.update_w), ids.update_b));
  }

  nn::Tape::VarId sums = t.scatter_sum_rows(h, batch.block, batch.num_blocks);
  nn::Tape::VarId hid = t.selu(
      t.add_rowvec(t.matmul(sums, ids.readout_hidden_w), ids.readout_hidden_b));
  return t.add_rowvec(t.matmul(hid, ids.readout_out_w), ids.readout_out_b);
}

nn::Tape::VarId TapedPolicy::actor_log_probs(const StackedBatch& batch) {
  return tape_->log_softmax(encode_and_readout(actor_ids_, batch));
}

nn::Tape::VarId TapedPolicy::critic_value(const StackedBatch& state) {
  if (state.num_blocks != 1) throw ShapeError("critic expects a single graph");
  return encode_and_readout(critic_ids_, state);
}

nn::Tape::VarId TapedPolicy::actor_weight_l2() {
  nn::Tape& t = *tape_;
  nn::Tape::VarId total = t.sum(t.square(actor_ids_.message_w));
  total = t.add(total, t.sum(t.square(actor_ids_.update_w)));
  total = t.add(total, t.sum(t.square(actor_ids_.readout_hidden_w)));
  total = t.add(total, t.sum(t.square(actor_ids_.readout_out_w)));
  return total;
}

Mat TapedPolicy::gradient(size_t i) const {
  nn::Tape::VarId id = ids_[i];
  if (tape_->has_grad(id)) return tape_->grad(id);
  return Mat::Zero(tape_->value(id).rows(), tape_->value(id).cols());
}

}  // namespace enero

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "enero/checkpoint.hpp"
#include "enero/env.hpp"
#include "enero/error.hpp"
#include "enero/policy.hpp"
#include "enero/rng.hpp"
#include "enero/scenarios.hpp"

using namespace enero;
using nn::Mat;

namespace {

PolicyParams zero_params(int hidden = 20, int steps = 5, int readout = 20) {
  PolicyParams p = PolicyParams::init(1, hidden, steps, readout);
  p.for_each_tensor([](const std::string&, Mat& m) { m.setZero(); });
  return p;
}

}  // namespace

TEST_CASE("zero parameters wash out every hidden state") {
  Topology t = make_ring(5);
  LinkGraph g = LinkGraph::build(t);
  TrafficMatrix tm = generate_tm(t, 1, 3.0);
  Env env(t, tm);
  ActionGraph state = env.state_graph();
  StackedBatch batch = StackedBatch::build({&state}, g);

  PolicyParams p = zero_params();
  Mat h = encode(p.critic, p.hidden_dim, p.message_passing_steps, batch.features,
                 batch.from, batch.to);
  CHECK(h.norm() == 0.0);
  CHECK(critic_value(p, env) == 0.0);
}

TEST_CASE("single candidate gets probability one") {
  Topology t = make_ring(5);
  TrafficMatrix tm = generate_tm(t, 2, 3.0);
  Env env(t, tm);
  LinkGraph g = LinkGraph::build(t);
  ActionGraph only = env.action_graph(Midpoint::direct());
  PolicyParams p = PolicyParams::init(7);
  ActionDistribution dist = score_actions(p, {&only}, g);
  REQUIRE(dist.probabilities.size() == 1);
  CHECK(dist.probabilities[0] == doctest::Approx(1.0));
}

TEST_CASE("identical candidates split evenly") {
  Topology t = make_ring(5);
  TrafficMatrix tm = generate_tm(t, 3, 3.0);
  Env env(t, tm);
  LinkGraph g = LinkGraph::build(t);
  ActionGraph a = env.action_graph(Midpoint::direct());
  ActionGraph b = a;
  PolicyParams p = PolicyParams::init(11);
  ActionDistribution dist = score_actions(p, {&a, &b}, g);
  CHECK(dist.probabilities[0] == doctest::Approx(0.5));
  CHECK(dist.probabilities[1] == doctest::Approx(0.5));
}

TEST_CASE("probabilities sum to one for any candidate count") {
  Rng rng(4);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Topology t = gen_random_topology(7, 5, {10.0, 20.0}, seed);
    TrafficMatrix tm = generate_tm(t, seed, 3.0);
    Env env(t, tm);
    PolicyParams p = PolicyParams::init(seed);
    ActionDistribution dist = score_actions(p, env);
    CHECK(std::accumulate(dist.probabilities.begin(), dist.probabilities.end(),
                          0.0) == doctest::Approx(1.0).epsilon(1e-6));
    for (double v : dist.probabilities) CHECK(v >= 0.0);
  }
}

TEST_CASE("shifting the readout bias leaves the distribution unchanged") {
  Topology t = gen_random_topology(6, 4, {10.0}, 8);
  TrafficMatrix tm = generate_tm(t, 8, 3.0);
  Env env(t, tm);
  PolicyParams p = PolicyParams::init(5);
  ActionDistribution before = score_actions(p, env);
  p.actor.readout_out.bias(0, 0) += 11.5;  // constant shift of every logit
  ActionDistribution after = score_actions(p, env);
  REQUIRE(before.probabilities.size() == after.probabilities.size());
  for (size_t i = 0; i < before.probabilities.size(); ++i) {
    CHECK(after.probabilities[i] ==
          doctest::Approx(before.probabilities[i]).epsilon(1e-9));
    CHECK(after.logits[i] ==
          doctest::Approx(before.logits[i] + 11.5).epsilon(1e-9));
  }
  CHECK(before.argmax() == after.argmax());
}

TEST_CASE("permuting link rows permutes hidden states and keeps outputs") {
  Rng rng(17);
  Topology t = gen_random_topology(5, 4, {10.0, 20.0}, 31);
  LinkGraph g = LinkGraph::build(t);
  TrafficMatrix tm = generate_tm(t, 9, 3.0);
  Env env(t, tm);
  PolicyParams p = PolicyParams::init(3);

  auto candidates = env.candidate_actions();
  std::vector<const ActionGraph*> ptrs;
  for (auto& [mid, graph] : candidates) ptrs.push_back(&graph);
  ActionDistribution base = score_actions(p, ptrs, g);
  ActionGraph state = env.state_graph();
  const double base_value = critic_value(p, state, g);

  const int L = t.num_links();
  for (int round = 0; round < 50; ++round) {
    // Random permutation of link indices.
    std::vector<int> perm(static_cast<size_t>(L));
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    }

    LinkGraph pg;
    pg.num_links = L;
    for (size_t e = 0; e < g.from.size(); ++e) {
      pg.from.push_back(perm[static_cast<size_t>(g.from[e])]);
      pg.to.push_back(perm[static_cast<size_t>(g.to[e])]);
    }
    auto permute_graph = [&](const ActionGraph& in) {
      ActionGraph out;
      out.num_links = L;
      out.features.assign(in.features.size(), 0.0);
      for (int l = 0; l < L; ++l) {
        for (int f = 0; f < ActionGraph::kNumFeatures; ++f) {
          out.features[static_cast<size_t>(perm[static_cast<size_t>(l)]) * 4 +
                       static_cast<size_t>(f)] = in.feature(l, f);
        }
      }
      return out;
    };

    std::vector<ActionGraph> permuted;
    for (const ActionGraph* a : ptrs) permuted.push_back(permute_graph(*a));
    std::vector<const ActionGraph*> pptrs;
    for (const ActionGraph& a : permuted) pptrs.push_back(&a);

    ActionDistribution dist = score_actions(p, pptrs, pg);
    for (size_t i = 0; i < base.logits.size(); ++i) {
      CHECK(std::abs(dist.logits[i] - base.logits[i]) < 1e-9);
    }
    ActionGraph pstate = permute_graph(state);
    CHECK(std::abs(critic_value(p, pstate, pg) - base_value) < 1e-9);

    // Hidden states are carried along by the same permutation.
    StackedBatch sb = StackedBatch::build({&state}, g);
    StackedBatch psb = StackedBatch::build({&pstate}, pg);
    Mat h = encode(p.critic, p.hidden_dim, p.message_passing_steps, sb.features,
                   sb.from, sb.to);
    Mat ph = encode(p.critic, p.hidden_dim, p.message_passing_steps, psb.features,
                    psb.from, psb.to);
    for (int l = 0; l < L; ++l) {
      CHECK((ph.row(perm[static_cast<size_t>(l)]) - h.row(l)).norm() < 1e-9);
    }
  }
}

TEST_CASE("a lone link evolves from the update function alone") {
  PolicyParams p = PolicyParams::init(2, 6, 3, 4);
  Mat features = Mat::Zero(1, 4);
  features(0, 0) = 0.3;
  Mat h = encode(p.actor, p.hidden_dim, p.message_passing_steps, features, {}, {});

  // Reference: start with padded features, apply update on zero messages.
  Mat expect = Mat::Zero(1, 6);
  expect.leftCols(4) = features;
  for (int step = 0; step < 3; ++step) {
    Mat in(1, 12);
    in << Mat::Zero(1, 6), expect;
    Mat pre = in * p.actor.update.weight + p.actor.update.bias;
    expect = pre.unaryExpr([](double x) { return nn::selu_scalar(x); });
  }
  CHECK((h - expect).norm() < 1e-12);
}

TEST_CASE("the same parameters evaluate on any topology size") {
  PolicyParams p = PolicyParams::init(21);
  for (int n : {4, 9, 14}) {
    Topology t = gen_random_topology(n, n / 2, {10.0}, static_cast<std::uint64_t>(n));
    TrafficMatrix tm = generate_tm(t, 5, 3.0);
    Env env(t, tm);
    ActionDistribution dist = score_actions(p, env);
    CHECK(dist.probabilities.size() == static_cast<size_t>(n - 1));
    CHECK(std::isfinite(critic_value(p, env)));
    for (double v : dist.logits) CHECK(std::isfinite(v));
  }
}

TEST_CASE("checkpoints round trip bit-exact") {
  PolicyParams p = PolicyParams::init(1234);
  HyperBlock hyper{{"learning_rate", "0.0002"}, {"note", "unit test"}};
  const std::string path =
      (std::filesystem::temp_directory_path() / "enero_test.ckpt").string();
  save_checkpoint(p, hyper, path);

  HyperBlock loaded_hyper;
  PolicyParams q = load_checkpoint(path, &loaded_hyper);
  bool identical = true;
  std::vector<const Mat*> lhs, rhs;
  p.for_each_tensor([&lhs](const std::string&, const Mat& m) { lhs.push_back(&m); });
  q.for_each_tensor([&rhs](const std::string&, const Mat& m) { rhs.push_back(&m); });
  REQUIRE(lhs.size() == rhs.size());
  for (size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i]->rows() != rhs[i]->rows() || lhs[i]->cols() != rhs[i]->cols()) {
      identical = false;
      continue;
    }
    for (Eigen::Index r = 0; r < lhs[i]->rows(); ++r) {
      for (Eigen::Index c = 0; c < lhs[i]->cols(); ++c) {
        if ((*lhs[i])(r, c) != (*rhs[i])(r, c)) identical = false;
      }
    }
  }
  CHECK(identical);

  bool found = false;
  for (auto& [k, v] : loaded_hyper) {
    if (k == "learning_rate" && v == "0.0002") found = true;
  }
  CHECK(found);
  std::remove(path.c_str());
}

TEST_CASE("corrupt checkpoints are rejected") {
  CHECK_THROWS_AS(checkpoint_from_text("garbage"), CheckpointError);
  CHECK_THROWS_AS(checkpoint_from_text("ENERO-CKPT 99\nend\n"), CheckpointError);
  CHECK_THROWS_AS(checkpoint_from_text("ENERO-CKPT 1\nhyper gnn_hidden_state 20\n"
                                       "hyper message_passing_steps 5\n"
                                       "hyper readout_units 20\nend\n"),
                  CheckpointError);
}

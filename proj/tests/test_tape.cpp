#include <doctest.h>

#include <cmath>
#include <functional>

#include "enero/nn/tape.hpp"
#include "enero/rng.hpp"

using namespace enero;
using nn::Mat;
using nn::Tape;

namespace {

Mat random_mat(Rng& rng, int r, int c, double scale = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-scale, scale);
  }
  return m;
}

// Central finite differences of f against the analytic gradient of the
// scalar built by `build`.
void check_gradients(const std::vector<Mat>& inputs,
                     const std::function<Tape::VarId(Tape&, const std::vector<Tape::VarId>&)>& build,
                     double h = 1e-6, double tol = 1e-5) {
  Tape tape;
  std::vector<Tape::VarId> ids;
  for (const Mat& m : inputs) ids.push_back(tape.input(m, true));
  Tape::VarId loss = build(tape, ids);
  tape.backward(loss);

  for (size_t v = 0; v < inputs.size(); ++v) {
    for (Eigen::Index i = 0; i < inputs[v].rows(); ++i) {
      for (Eigen::Index j = 0; j < inputs[v].cols(); ++j) {
        auto eval = [&](double delta) {
          Tape t2;
          std::vector<Tape::VarId> ids2;
          for (size_t w = 0; w < inputs.size(); ++w) {
            Mat m = inputs[w];
            if (w == v) m(i, j) += delta;
            ids2.push_back(t2.input(m, false));
          }
          return t2.value(build(t2, ids2))(0, 0);
        };
        const double fd = (eval(h) - eval(-h)) / (2.0 * h);
        const double an = tape.grad(ids[v])(i, j);
        CHECK(an == doctest::Approx(fd).epsilon(tol).scale(1.0 + std::abs(fd)));
      }
    }
  }
}

}  // namespace

TEST_CASE("matmul chain gradients match finite differences") {
  Rng rng(1);
  check_gradients({random_mat(rng, 3, 4), random_mat(rng, 4, 2)},
                  [](Tape& t, const std::vector<Tape::VarId>& v) {
                    return t.sum(t.matmul(v[0], v[1]));
                  });
}

TEST_CASE("selu and bias broadcast gradients") {
  Rng rng(2);
  check_gradients({random_mat(rng, 3, 3), random_mat(rng, 1, 3)},
                  [](Tape& t, const std::vector<Tape::VarId>& v) {
                    return t.sum(t.selu(t.add_rowvec(v[0], v[1])));
                  });
}

TEST_CASE("gather, scatter and hcat gradients") {
  Rng rng(3);
  check_gradients(
      {random_mat(rng, 4, 3), random_mat(rng, 6, 3)},
      [](Tape& t, const std::vector<Tape::VarId>& v) {
        auto g = t.gather_rows(v[0], {0, 2, 3, 1, 1, 0});
        auto cat = t.hcat(g, v[1]);
        auto sc = t.scatter_sum_rows(cat, {0, 0, 1, 2, 3, 1}, 4);
        return t.mean(t.selu(sc));
      });
}

TEST_CASE("log_softmax, exp, mul and pick gradients") {
  Rng rng(4);
  check_gradients({random_mat(rng, 5, 1)},
                  [](Tape& t, const std::vector<Tape::VarId>& v) {
                    auto lp = t.log_softmax(v[0]);
                    auto probs = t.exp(lp);
                    auto ent = t.scale(t.sum(t.mul(probs, lp)), -1.0);
                    return t.add(ent, t.pick(lp, 2, 0));
                  });
}

TEST_CASE("clamp and minimum route gradients to the active branch") {
  Rng rng(5);
  // Values away from the kink points so finite differences stay clean.
  Mat a(2, 2);
  a << 0.4, 1.9, -0.7, 1.1;
  Mat b(2, 2);
  b << 0.6, 0.3, 0.8, -2.0;
  check_gradients({a, b}, [](Tape& t, const std::vector<Tape::VarId>& v) {
    auto clamped = t.clamp(v[0], 0.0, 1.5);
    return t.sum(t.minimum(clamped, v[1]));
  });
}

TEST_CASE("square, sub, scale and stack gradients") {
  Rng rng(6);
  check_gradients(
      {random_mat(rng, 2, 2), random_mat(rng, 2, 2)},
      [](Tape& t, const std::vector<Tape::VarId>& v) {
        auto d = t.square(t.sub(v[0], t.scale(v[1], 0.7)));
        auto s1 = t.pick(d, 0, 0);
        auto s2 = t.mean(d);
        return t.sum(t.stack_scalars({s1, s2}));
      });
}

TEST_CASE("sum_rows replicates gradients over rows") {
  Rng rng(7);
  check_gradients({random_mat(rng, 4, 3)},
                  [](Tape& t, const std::vector<Tape::VarId>& v) {
                    return t.mean(t.square(t.sum_rows(v[0])));
                  });
}

TEST_CASE("constant loss has zero gradient") {
  Tape tape;
  auto x = tape.input(Mat::Ones(3, 3), true);
  auto loss = tape.mean(tape.scale(x, 0.0));
  tape.backward(loss);
  CHECK(tape.grad(x).norm() == 0.0);
}

TEST_CASE("doubling the loss doubles every gradient") {
  Rng rng(8);
  Mat x = random_mat(rng, 3, 2);
  auto run = [&](double k) {
    Tape tape;
    auto id = tape.input(x, true);
    auto loss = tape.scale(tape.sum(tape.selu(id)), k);
    tape.backward(loss);
    return Mat(tape.grad(id));
  };
  Mat g1 = run(1.0);
  Mat g2 = run(2.0);
  CHECK((g2 - 2.0 * g1).norm() < 1e-14);
}

TEST_CASE("empty adjacency shapes flow through") {
  Tape tape;
  auto x = tape.input(Mat::Ones(3, 2), true);
  auto gathered = tape.gather_rows(x, {});
  auto scattered = tape.scatter_sum_rows(gathered, {}, 3);
  auto loss = tape.sum(tape.add(x, scattered));
  tape.backward(loss);
  CHECK(tape.value(scattered).norm() == 0.0);
  CHECK(tape.grad(x).sum() == doctest::Approx(6.0));
}

TEST_CASE("selu matches its reference definition") {
  CHECK(nn::selu_scalar(0.0) == 0.0);
  CHECK(nn::selu_scalar(1.0) == doctest::Approx(1.0507009873554805));
  CHECK(nn::selu_scalar(-1e9) == doctest::Approx(-1.7580993408473766));
  CHECK(nn::selu_grad_scalar(2.0) == doctest::Approx(1.0507009873554805));
}

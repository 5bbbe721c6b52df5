#include "enero/nn/tape.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "enero/error.hpp"

namespace enero::nn {

namespace {
constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
}  // namespace

double selu_scalar(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
}

double selu_grad_scalar(double x) {
  return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}

Tape::VarId Tape::push(Mat value, bool needs_grad,
                       std::function<void(Tape&, const Mat&)> back) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad;
  node.back = needs_grad ? std::move(back) : nullptr;
  nodes_.push_back(std::move(node));
  return static_cast<VarId>(nodes_.size() - 1);
}

void Tape::accumulate(VarId id, const Mat& g) {
  Node& node = nodes_[static_cast<size_t>(id)];
  if (!node.needs_grad) return;
  if (node.grad.size() == 0) {
    node.grad = g;
  } else {
    node.grad += g;
  }
}

Tape::VarId Tape::input(Mat value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

Tape::VarId Tape::matmul(VarId a, VarId b) {
  Mat v = value(a) * value(b);
  return push(std::move(v), needs(a) || needs(b), [a, b](Tape& t, const Mat& g) {
    if (t.needs(a)) t.accumulate(a, g * t.value(b).transpose());
    if (t.needs(b)) t.accumulate(b, t.value(a).transpose() * g);
  });
}

Tape::VarId Tape::add(VarId a, VarId b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
    throw ShapeError("add: shape mismatch");
  }
  Mat v = value(a) + value(b);
  return push(std::move(v), needs(a) || needs(b), [a, b](Tape& t, const Mat& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Tape::VarId Tape::add_rowvec(VarId a, VarId bias) {
  if (value(bias).rows() != 1 || value(bias).cols() != value(a).cols()) {
    throw ShapeError("add_rowvec: bias must be 1 x cols(a)");
  }
  Mat v = value(a).rowwise() + value(bias).row(0);
  return push(std::move(v), needs(a) || needs(bias), [a, bias](Tape& t, const Mat& g) {
    t.accumulate(a, g);
    if (t.needs(bias)) t.accumulate(bias, g.colwise().sum());
  });
}

Tape::VarId Tape::sub(VarId a, VarId b) {
  Mat v = value(a) - value(b);
  return push(std::move(v), needs(a) || needs(b), [a, b](Tape& t, const Mat& g) {
    t.accumulate(a, g);
    if (t.needs(b)) t.accumulate(b, -g);
  });
}

Tape::VarId Tape::mul(VarId a, VarId b) {
  Mat v = value(a).cwiseProduct(value(b));
  return push(std::move(v), needs(a) || needs(b), [a, b](Tape& t, const Mat& g) {
    if (t.needs(a)) t.accumulate(a, g.cwiseProduct(t.value(b)));
    if (t.needs(b)) t.accumulate(b, g.cwiseProduct(t.value(a)));
  });
}

Tape::VarId Tape::scale(VarId a, double k) {
  Mat v = value(a) * k;
  return push(std::move(v), needs(a), [a, k](Tape& t, const Mat& g) {
    t.accumulate(a, g * k);
  });
}

Tape::VarId Tape::add_scalar(VarId a, double k) {
  Mat v = value(a).array() + k;
  return push(std::move(v), needs(a), [a](Tape& t, const Mat& g) {
    t.accumulate(a, g);
  });
}

Tape::VarId Tape::selu(VarId a) {
  Mat v = value(a).unaryExpr([](double x) { return selu_scalar(x); });
  return push(std::move(v), needs(a), [a](Tape& t, const Mat& g) {
    Mat d = t.value(a).unaryExpr([](double x) { return selu_grad_scalar(x); });
    t.accumulate(a, g.cwiseProduct(d));
  });
}

Tape::VarId Tape::exp(VarId a) {
  Mat v = value(a).array().exp();
  VarId id = push(std::move(v), needs(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, id](Tape& t, const Mat& g) {
    t.accumulate(a, g.cwiseProduct(t.value(id)));
  };
  return id;
}

Tape::VarId Tape::square(VarId a) {
  Mat v = value(a).array().square();
  return push(std::move(v), needs(a), [a](Tape& t, const Mat& g) {
    t.accumulate(a, 2.0 * g.cwiseProduct(t.value(a)));
  });
}

Tape::VarId Tape::minimum(VarId a, VarId b) {
  Mat v = value(a).cwiseMin(value(b));
  return push(std::move(v), needs(a) || needs(b), [a, b](Tape& t, const Mat& g) {
    const Mat& va = t.value(a);
    const Mat& vb = t.value(b);
    if (t.needs(a)) {
      Mat ga = (va.array() <= vb.array()).cast<double>() * g.array();
      t.accumulate(a, ga);
    }
    if (t.needs(b)) {
      Mat gb = (va.array() > vb.array()).cast<double>() * g.array();
      t.accumulate(b, gb);
    }
  });
}

Tape::VarId Tape::clamp(VarId a, double lo, double hi) {
  Mat v = value(a).array().max(lo).min(hi);
  return push(std::move(v), needs(a), [a, lo, hi](Tape& t, const Mat& g) {
    const Mat& va = t.value(a);
    Mat mask = ((va.array() >= lo) && (va.array() <= hi)).cast<double>();
    t.accumulate(a, g.cwiseProduct(mask));
  });
}

Tape::VarId Tape::gather_rows(VarId a, std::vector<int> rows) {
  const Mat& va = value(a);
  Mat v(static_cast<Eigen::Index>(rows.size()), va.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    v.row(static_cast<Eigen::Index>(i)) = va.row(rows[i]);
  }
  auto idx = std::make_shared<std::vector<int>>(std::move(rows));
  return push(std::move(v), needs(a), [a, idx](Tape& t, const Mat& g) {
    Mat ga = Mat::Zero(t.value(a).rows(), t.value(a).cols());
    for (size_t i = 0; i < idx->size(); ++i) {
      ga.row((*idx)[i]) += g.row(static_cast<Eigen::Index>(i));
    }
    t.accumulate(a, ga);
  });
}

Tape::VarId Tape::scatter_sum_rows(VarId a, std::vector<int> to, int out_rows) {
  const Mat& va = value(a);
  if (static_cast<Eigen::Index>(to.size()) != va.rows()) {
    throw ShapeError("scatter_sum_rows: index count must match rows");
  }
  Mat v = Mat::Zero(out_rows, va.cols());
  for (size_t i = 0; i < to.size(); ++i) {
    v.row(to[i]) += va.row(static_cast<Eigen::Index>(i));
  }
  auto idx = std::make_shared<std::vector<int>>(std::move(to));
  return push(std::move(v), needs(a), [a, idx](Tape& t, const Mat& g) {
    Mat ga(static_cast<Eigen::Index>(idx->size()), g.cols());
    for (size_t i = 0; i < idx->size(); ++i) {
      ga.row(static_cast<Eigen::Index>(i)) = g.row((*idx)[i]);
    }
    t.accumulate(a, ga);
  });
}

Tape::VarId Tape::hcat(VarId a, VarId b) {
  const Mat& va = value(a);
  const Mat& vb = value(b);
  if (va.rows() != vb.rows()) throw ShapeError("hcat: row mismatch");
  Mat v(va.rows(), va.cols() + vb.cols());
  v << va, vb;
  const Eigen::Index ca = va.cols();
  return push(std::move(v), needs(a) || needs(b), [a, b, ca](Tape& t, const Mat& g) {
    t.accumulate(a, g.leftCols(ca));
    if (t.needs(b)) t.accumulate(b, g.rightCols(g.cols() - ca));
  });
}

Tape::VarId Tape::sum_rows(VarId a) {
  Mat v = value(a).colwise().sum();
  return push(std::move(v), needs(a), [a](Tape& t, const Mat& g) {
    Mat ga = g.replicate(t.value(a).rows(), 1);
    t.accumulate(a, ga);
  });
}

Tape::VarId Tape::sum(VarId a) {
  Mat v(1, 1);
  v(0, 0) = value(a).sum();
  return push(std::move(v), needs(a), [a](Tape& t, const Mat& g) {
    t.accumulate(a, Mat::Constant(t.value(a).rows(), t.value(a).cols(), g(0, 0)));
  });
}

Tape::VarId Tape::mean(VarId a) {
  const double n = static_cast<double>(value(a).size());
  Mat v(1, 1);
  v(0, 0) = value(a).sum() / n;
  return push(std::move(v), needs(a), [a, n](Tape& t, const Mat& g) {
    t.accumulate(a,
                 Mat::Constant(t.value(a).rows(), t.value(a).cols(), g(0, 0) / n));
  });
}

Tape::VarId Tape::stack_scalars(const std::vector<VarId>& xs) {
  Mat v(static_cast<Eigen::Index>(xs.size()), 1);
  bool any = false;
  for (size_t i = 0; i < xs.size(); ++i) {
    const Mat& x = value(xs[i]);
    if (x.size() != 1) throw ShapeError("stack_scalars: inputs must be 1x1");
    v(static_cast<Eigen::Index>(i), 0) = x(0, 0);
    any = any || needs(xs[i]);
  }
  auto ids = std::make_shared<std::vector<VarId>>(xs);
  return push(std::move(v), any, [ids](Tape& t, const Mat& g) {
    for (size_t i = 0; i < ids->size(); ++i) {
      t.accumulate((*ids)[i], Mat::Constant(1, 1, g(static_cast<Eigen::Index>(i), 0)));
    }
  });
}

Tape::VarId Tape::log_softmax(VarId a) {
  const Mat& va = value(a);
  if (va.cols() != 1) throw ShapeError("log_softmax expects a column vector");
  const double m = va.maxCoeff();
  const double lse = m + std::log((va.array() - m).exp().sum());
  Mat v = va.array() - lse;
  VarId id = push(std::move(v), needs(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, id](Tape& t, const Mat& g) {
    // dx = g - softmax(x) * sum(g)
    Mat p = t.value(id).array().exp();
    t.accumulate(a, g - p * g.sum());
  };
  return id;
}

Tape::VarId Tape::pick(VarId a, int r, int c) {
  Mat v(1, 1);
  v(0, 0) = value(a)(r, c);
  return push(std::move(v), needs(a), [a, r, c](Tape& t, const Mat& g) {
    Mat ga = Mat::Zero(t.value(a).rows(), t.value(a).cols());
    ga(r, c) = g(0, 0);
    t.accumulate(a, ga);
  });
}

void Tape::backward(VarId loss) {
  Node& last = nodes_[static_cast<size_t>(loss)];
  if (last.value.size() != 1) throw ShapeError("backward expects a scalar loss");
  if (!last.needs_grad) return;
  last.grad = Mat::Ones(1, 1);
  for (VarId id = loss; id >= 0; --id) {
    Node& node = nodes_[static_cast<size_t>(id)];
    if (node.grad.size() == 0 || !node.back) continue;
    node.back(*this, node.grad);
  }
}

}  // namespace enero::nn

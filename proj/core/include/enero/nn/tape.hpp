#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace enero::nn {

using Mat = Eigen::MatrixXd;

/// Reverse-mode autodiff over dense matrices. A forward computation is
/// recorded as a sequence of nodes; backward() then produces exact gradients
/// of a scalar loss with respect to every requires-grad input.
///
/// Ids are indices into the tape, valid until clear().
class Tape {
 public:
  using VarId = int;

  VarId input(Mat value, bool requires_grad = false);

  VarId matmul(VarId a, VarId b);
  VarId add(VarId a, VarId b);
  /// Broadcasts a 1 x C bias over every row of a.
  VarId add_rowvec(VarId a, VarId bias);
  VarId sub(VarId a, VarId b);
  VarId mul(VarId a, VarId b);
  VarId scale(VarId a, double k);
  VarId add_scalar(VarId a, double k);
  VarId selu(VarId a);
  VarId exp(VarId a);
  VarId square(VarId a);
  /// Elementwise min; ties route the gradient to a.
  VarId minimum(VarId a, VarId b);
  VarId clamp(VarId a, double lo, double hi);

  /// out.row(i) = a.row(rows[i])
  VarId gather_rows(VarId a, std::vector<int> rows);
  /// out.row(to[i]) += a.row(i); out has out_rows rows.
  VarId scatter_sum_rows(VarId a, std::vector<int> to, int out_rows);
  VarId hcat(VarId a, VarId b);
  /// 1 x C column sums.
  VarId sum_rows(VarId a);
  VarId sum(VarId a);
  VarId mean(VarId a);
  /// Stacks 1x1 scalars into an R x 1 column.
  VarId stack_scalars(const std::vector<VarId>& xs);
  /// Log-softmax of an R x 1 column.
  VarId log_softmax(VarId a);
  /// 1x1 view of element (r, c).
  VarId pick(VarId a, int r, int c);

  void backward(VarId loss);

  const Mat& value(VarId id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Mat& grad(VarId id) const { return nodes_[static_cast<size_t>(id)].grad; }
  bool has_grad(VarId id) const {
    return nodes_[static_cast<size_t>(id)].grad.size() > 0;
  }

  size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void(Tape&, const Mat&)> back;  // accumulates into parents
    bool needs_grad = false;
  };

  VarId push(Mat value, bool needs_grad,
             std::function<void(Tape&, const Mat&)> back);
  void accumulate(VarId id, const Mat& g);
  bool needs(VarId id) const { return nodes_[static_cast<size_t>(id)].needs_grad; }

  std::vector<Node> nodes_;
};

/// Scaled exponential linear unit and its derivative.
double selu_scalar(double x);
double selu_grad_scalar(double x);

}  // namespace enero::nn

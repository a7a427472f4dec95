#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hoi/mat.hpp"
#include "hoi/rng.hpp"

namespace hoi::nn {

struct TensorNode {
  Mat value;
  Mat grad;  // allocated only on the differentiable part of the graph
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;
};

/// Handle to a node of an eagerly evaluated computation graph. Values are
/// computed at construction time; backward() replays the recorded graph in
/// reverse topological order and accumulates gradients into every node that
/// requires them.
class Tensor {
 public:
  Tensor() = default;

  static Tensor param(Mat value);     // leaf with a gradient slot
  static Tensor constant(Mat value);  // leaf outside the differentiable graph

  bool defined() const { return static_cast<bool>(n_); }
  std::size_t rows() const { return n_->value.rows; }
  std::size_t cols() const { return n_->value.cols; }
  const Mat& value() const { return n_->value; }
  Mat& value_mut() { return n_->value; }
  const Mat& grad() const { return n_->grad; }
  bool requires_grad() const { return n_ && n_->requires_grad; }
  void zero_grad() { if (n_) n_->grad.fill(0.0); }

  /// Value of a 1x1 tensor.
  double scalar() const;

  TensorNode* node() const { return n_.get(); }
  std::shared_ptr<TensorNode> share() const { return n_; }
  static Tensor from_node(std::shared_ptr<TensorNode> n);

 private:
  std::shared_ptr<TensorNode> n_;
};

// Graph ops. Shapes are validated eagerly; mismatches throw
// std::invalid_argument with both shapes in the message.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

/// y_ij = a_ij + v_0j for a 1 x cols row vector v (bias broadcast).
Tensor add_rowvec(const Tensor& a, const Tensor& v);

/// Broadcast ops against a trainable 1x1 scalar tensor.
Tensor add_scalar_param(const Tensor& a, const Tensor& s);
Tensor mul_scalar_param(const Tensor& a, const Tensor& s);

/// Elementwise combination with a constant matrix (no gradient through m).
Tensor add_mat(const Tensor& a, const Mat& m);
Tensor mul_mat(const Tensor& a, const Mat& m);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softmax_rows(const Tensor& a);
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps = 1e-5);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, std::size_t c0, std::size_t c1);

/// out row k = a row idx[k]; duplicate indices accumulate gradient.
Tensor gather_rows(const Tensor& a, std::vector<std::size_t> idx);

Tensor sum_all(const Tensor& a);

/// Inverted dropout; identity when p <= 0.
Tensor dropout(const Tensor& a, double p, Rng& rng);

/// Elementwise focal binary cross entropy against constant 0/1 targets.
/// Probabilities are clamped to [1e-12, 1 - 1e-12] before the logs.
Tensor focal_bce(const Tensor& probs, const Mat& targets, double gamma, double balance);

/// Reverse sweep from a scalar. Throws on undefined or non-scalar input and
/// on a non-finite loss value; a constant scalar is a no-op.
void backward(const Tensor& loss);

}  // namespace hoi::nn

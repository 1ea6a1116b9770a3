#pragma once

#include <functional>
#include <span>
#include <vector>

#include "reid/tensor.hpp"

namespace reid {

// Reverse-mode differentiation over an append-only operation tape.
//
// Leaves enter via constant() (no gradient) or param() (gradient tracked).
// Every op caches its forward value; ops whose operands require gradients
// also record a backward closure. backward() walks the tape once in strict
// reverse order, returns the gradient for each requested parameter (zero if
// the parameter never fed the loss), and clears the tape.
//
// A tape is single-threaded. Distinct tapes may run on distinct threads.
class Tape {
 public:
  struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
  };

  Var constant(Tensor t);
  Var param(Tensor t);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var relu(Var x);
  Var leaky_relu(Var x, double slope);
  Var sigmoid(Var x);
  Var softmax_vec(Var x);
  Var concat_cols(Var a, Var b);
  Var row_of(Var x, int r);
  Var dot(Var a, Var b);
  Var mean_vec(Var x);
  // sum_i coeffs[0,i] * xs[i]; coeffs is 1xN, xs share one shape.
  Var scale_add(Var coeffs, std::span<const Var> xs);
  // Mean binary cross-entropy of 1x1 predictions against labels in {0,1},
  // with predictions clamped to [1e-12, 1-1e-12] before the logs.
  Var bce_mean(std::span<const Var> yhat, std::span<const double> y01);

  const Tensor& value(Var v) const;

  // Gradients for `params` after backpropagating from the 1x1 `loss`.
  // The tape is cleared before returning.
  std::vector<Tensor> backward(Var loss, std::span<const Var> params);

  void clear();
  std::size_t size() const { return nodes_.size(); }

  static constexpr double kProbClamp = 1e-12;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&)> back;
  };

  Var push(Tensor value, bool requires_grad, std::function<void(Tape&)> back);
  Node& node(Var v);
  const Node& node(Var v) const;
  void accumulate(Var v, const Tensor& g);

  std::vector<Node> nodes_;
};

using Var = Tape::Var;

// Central-difference gradient of a deterministic scalar function.
std::vector<Tensor> finite_diff_gradient(
    const std::function<double(const std::vector<Tensor>&)>& f, std::vector<Tensor> params,
    double step);

// Max over coordinates of |g_ad - g_fd| / (|g_fd| + 1e-8).
double finite_diff_check(const std::function<double(const std::vector<Tensor>&)>& f,
                         const std::vector<Tensor>& params,
                         const std::vector<Tensor>& grads_autodiff, double step);

}  // namespace reid

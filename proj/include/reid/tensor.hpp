#pragma once

#include <cstddef>
#include <vector>

#include "reid/error.hpp"

namespace reid {

// Dense row-major f64 matrix. Row and column vectors are 1xN / Nx1 tensors;
// scalars are 1x1. Entries must be finite: NaN/Inf is rejected at
// construction and (in debug builds) after every op.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols);  // zero-filled
  Tensor(int rows, int cols, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor row(std::vector<double> data);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }
  double scalar_value() const;

  void check_finite(const char* what) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

bool operator==(const Tensor& a, const Tensor& b);

// Forward kernels. The autodiff tape records these same functions, so the
// training path and the inference path compute bitwise-identical values.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);
Tensor sigmoid(const Tensor& x);
Tensor softmax_vec(const Tensor& x);  // 1xN row vector
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor row_of(const Tensor& x, int r);
double dot(const Tensor& a, const Tensor& b);  // 1xN . 1xN
double mean_vec(const Tensor& x);              // mean of a 1xN vector

// Order-insensitive sum: accumulates in ascending value order, so any
// permutation of `xs` gives the bitwise-identical result. Used where the
// contract demands exact permutation equivariance (attention scores,
// softmax normalizer).
double stable_sum(std::vector<double> xs);

}  // namespace reid

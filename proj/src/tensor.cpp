#include "reid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace reid {

namespace {

void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

}  // namespace

Tensor::Tensor(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
  require(rows >= 0 && cols >= 0, Errc::shape_mismatch, "negative dimension");
}

Tensor::Tensor(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == static_cast<std::size_t>(rows) * cols, Errc::shape_mismatch,
          "data length does not match shape");
  check_finite("tensor construction");
}

Tensor Tensor::scalar(double v) { return Tensor(1, 1, {v}); }

Tensor Tensor::row(std::vector<double> data) {
  const int n = static_cast<int>(data.size());
  return Tensor(1, n, std::move(data));
}

double Tensor::scalar_value() const {
  require(is_scalar(), Errc::shape_mismatch, "expected 1x1 tensor");
  return data_[0];
}

void Tensor::check_finite(const char* what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error(Errc::non_finite, std::string("non-finite value in ") + what);
  }
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.data() == b.data();
}

#ifdef NDEBUG
#define REID_POST_CHECK(t, what) ((void)0)
#else
#define REID_POST_CHECK(t, what) (t).check_finite(what)
#endif

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), Errc::shape_mismatch,
          "matmul " + shape_str(a) + " * " + shape_str(b));
  Tensor out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) out.at(i, j) += aik * b.at(k, j);
    }
  }
  REID_POST_CHECK(out, "matmul");
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.same_shape(b), Errc::shape_mismatch, "add " + shape_str(a) + " + " + shape_str(b));
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  REID_POST_CHECK(out, "add");
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  return out;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : slope * out[i];
  REID_POST_CHECK(out, "leaky_relu");
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  return out;
}

double stable_sum(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double s = 0.0;
  for (double v : xs) s += v;
  return s;
}

Tensor softmax_vec(const Tensor& x) {
  require(x.rows() == 1 && x.cols() >= 1, Errc::shape_mismatch, "softmax_vec wants a 1xN vector");
  double m = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) m = std::max(m, x[i]);
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(x[i] - m);
  const double z = stable_sum(e);
  Tensor out(1, x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = e[i] / z;
  REID_POST_CHECK(out, "softmax_vec");
  return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows(), Errc::shape_mismatch,
          "concat_cols " + shape_str(a) + " || " + shape_str(b));
  Tensor out(a.rows(), a.cols() + b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) out.at(r, c) = a.at(r, c);
    for (int c = 0; c < b.cols(); ++c) out.at(r, a.cols() + c) = b.at(r, c);
  }
  return out;
}

Tensor row_of(const Tensor& x, int r) {
  require(r >= 0 && r < x.rows(), Errc::shape_mismatch, "row index out of range");
  Tensor out(1, x.cols());
  for (int c = 0; c < x.cols(); ++c) out.at(0, c) = x.at(r, c);
  return out;
}

double dot(const Tensor& a, const Tensor& b) {
  require(a.rows() == 1 && b.rows() == 1 && a.cols() == b.cols(), Errc::shape_mismatch,
          "dot " + shape_str(a) + " . " + shape_str(b));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double mean_vec(const Tensor& x) {
  require(x.rows() == 1 && x.cols() >= 1, Errc::shape_mismatch, "mean_vec wants a 1xN vector");
  return stable_sum(std::vector<double>(x.data())) / x.cols();
}

}  // namespace reid

#include "reid/autodiff.hpp"

#include <cmath>
#include <utility>

namespace reid {

Tape::Var Tape::push(Tensor value, bool requires_grad, std::function<void(Tape&)> back) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) {
    n.grad = Tensor(n.value.rows(), n.value.cols());
    n.back = std::move(back);
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) { return nodes_.at(static_cast<std::size_t>(v.id)); }
const Tape::Node& Tape::node(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)); }

const Tensor& Tape::value(Var v) const { return node(v).value; }

void Tape::accumulate(Var v, const Tensor& g) {
  Node& n = node(v);
  if (!n.requires_grad) return;
  for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
}

Tape::Var Tape::constant(Tensor t) { return push(std::move(t), false, {}); }

Tape::Var Tape::param(Tensor t) {
  // Leaf with gradient storage and no backward of its own.
  return push(std::move(t), true, [](Tape&) {});
}

Tape::Var Tape::matmul(Var a, Var b) {
  Tensor out = reid::matmul(value(a), value(b));
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [a, b, v](Tape& t) {
      const Tensor& g = t.node(v).grad;
      const Tensor& av = t.value(a);
      const Tensor& bv = t.value(b);
      if (t.node(a).requires_grad) {
        Tensor ga(av.rows(), av.cols());
        for (int i = 0; i < av.rows(); ++i)
          for (int k = 0; k < av.cols(); ++k) {
            double s = 0.0;
            for (int j = 0; j < bv.cols(); ++j) s += g.at(i, j) * bv.at(k, j);
            ga.at(i, k) = s;
          }
        t.accumulate(a, ga);
      }
      if (t.node(b).requires_grad) {
        Tensor gb(bv.rows(), bv.cols());
        for (int k = 0; k < bv.rows(); ++k)
          for (int j = 0; j < bv.cols(); ++j) {
            double s = 0.0;
            for (int i = 0; i < av.rows(); ++i) s += av.at(i, k) * g.at(i, j);
            gb.at(k, j) = s;
          }
        t.accumulate(b, gb);
      }
    };
  }
  return v;
}

Tape::Var Tape::add(Var a, Var b) {
  Tensor out = reid::add(value(a), value(b));
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [a, b, v](Tape& t) {
      const Tensor& g = t.node(v).grad;
      t.accumulate(a, g);
      t.accumulate(b, g);
    };
  }
  return v;
}

Tape::Var Tape::relu(Var x) {
  Tensor out = reid::relu(value(x));
  const bool rg = node(x).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [x, v](Tape& t) {
      const Tensor& g = t.node(v).grad;
      const Tensor& xv = t.value(x);
      Tensor gx(xv.rows(), xv.cols());
      // Subgradient at 0 is 0.
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = xv[i] > 0.0 ? g[i] : 0.0;
      t.accumulate(x, gx);
    };
  }
  return v;
}

Tape::Var Tape::leaky_relu(Var x, double slope) {
  Tensor out = reid::leaky_relu(value(x), slope);
  const bool rg = node(x).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [x, v, slope](Tape& t) {
      const Tensor& g = t.node(v).grad;
      const Tensor& xv = t.value(x);
      Tensor gx(xv.rows(), xv.cols());
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = xv[i] > 0.0 ? g[i] : slope * g[i];
      t.accumulate(x, gx);
    };
  }
  return v;
}

Tape::Var Tape::sigmoid(Var x) {
  Tensor out = reid::sigmoid(value(x));
  const bool rg = node(x).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [x, v](Tape& t) {
      const Tensor& g = t.node(v).grad;
      const Tensor& y = t.node(v).value;
      Tensor gx(y.rows(), y.cols());
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = g[i] * y[i] * (1.0 - y[i]);
      t.accumulate(x, gx);
    };
  }
  return v;
}

Tape::Var Tape::softmax_vec(Var x) {
  Tensor out = reid::softmax_vec(value(x));
  const bool rg = node(x).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [x, v](Tape& t) {
      const Tensor& g = t.node(v).grad;
      const Tensor& y = t.node(v).value;
      double gy = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) gy += g[i] * y[i];
      Tensor gx(y.rows(), y.cols());
      for (std::size_t i = 0; i < y.size(); ++i) gx[i] = y[i] * (g[i] - gy);
      t.accumulate(x, gx);
    };
  }
  return v;
}

Tape::Var Tape::concat_cols(Var a, Var b) {
  Tensor out = reid::concat_cols(value(a), value(b));
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [a, b, v](Tape& t) {
      const Tensor& g = t.node(v).grad;
      const Tensor& av = t.value(a);
      const Tensor& bv = t.value(b);
      Tensor ga(av.rows(), av.cols());
      Tensor gb(bv.rows(), bv.cols());
      for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < av.cols(); ++c) ga.at(r, c) = g.at(r, c);
        for (int c = 0; c < bv.cols(); ++c) gb.at(r, c) = g.at(r, av.cols() + c);
      }
      t.accumulate(a, ga);
      t.accumulate(b, gb);
    };
  }
  return v;
}

Tape::Var Tape::row_of(Var x, int r) {
  Tensor out = reid::row_of(value(x), r);
  const bool rg = node(x).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [x, v, r](Tape& t) {
      const Tensor& g = t.node(v).grad;
      const Tensor& xv = t.value(x);
      Tensor gx(xv.rows(), xv.cols());
      for (int c = 0; c < xv.cols(); ++c) gx.at(r, c) = g.at(0, c);
      t.accumulate(x, gx);
    };
  }
  return v;
}

Tape::Var Tape::dot(Var a, Var b) {
  Tensor out = Tensor::scalar(reid::dot(value(a), value(b)));
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [a, b, v](Tape& t) {
      const double g = t.node(v).grad[0];
      const Tensor& av = t.value(a);
      const Tensor& bv = t.value(b);
      Tensor ga(1, av.cols());
      Tensor gb(1, bv.cols());
      for (std::size_t i = 0; i < av.size(); ++i) {
        ga[i] = g * bv[i];
        gb[i] = g * av[i];
      }
      t.accumulate(a, ga);
      t.accumulate(b, gb);
    };
  }
  return v;
}

Tape::Var Tape::mean_vec(Var x) {
  Tensor out = Tensor::scalar(reid::mean_vec(value(x)));
  const bool rg = node(x).requires_grad;
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [x, v](Tape& t) {
      const double g = t.node(v).grad[0];
      const Tensor& xv = t.value(x);
      Tensor gx(1, xv.cols());
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = g / xv.cols();
      t.accumulate(x, gx);
    };
  }
  return v;
}

Tape::Var Tape::scale_add(Var coeffs, std::span<const Var> xs) {
  const Tensor& c = value(coeffs);
  if (c.rows() != 1 || c.cols() != static_cast<int>(xs.size()) || xs.empty())
    throw Error(Errc::shape_mismatch, "scale_add wants a 1xN coefficient row over N tensors");
  Tensor out(value(xs[0]).rows(), value(xs[0]).cols());
  bool rg = node(coeffs).requires_grad;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Tensor& xi = value(xs[i]);
    if (!xi.same_shape(out)) throw Error(Errc::shape_mismatch, "scale_add operand shapes");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += c[i] * xi[k];
    rg = rg || node(xs[i]).requires_grad;
  }
  std::vector<Var> vs(xs.begin(), xs.end());
  Var v = push(std::move(out), rg, {});
  if (rg) {
    node(v).back = [coeffs, vs, v](Tape& t) {
      const Tensor& g = t.node(v).grad;
      if (t.node(coeffs).requires_grad) {
        Tensor gc(1, static_cast<int>(vs.size()));
        for (std::size_t i = 0; i < vs.size(); ++i) {
          double s = 0.0;
          const Tensor& xi = t.value(vs[i]);
          for (std::size_t k = 0; k < g.size(); ++k) s += g[k] * xi[k];
          gc[i] = s;
        }
        t.accumulate(coeffs, gc);
      }
      const Tensor& cv = t.value(coeffs);
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (!t.node(vs[i]).requires_grad) continue;
        Tensor gx(g.rows(), g.cols());
        for (std::size_t k = 0; k < g.size(); ++k) gx[k] = cv[i] * g[k];
        t.accumulate(vs[i], gx);
      }
    };
  }
  return v;
}

Tape::Var Tape::bce_mean(std::span<const Var> yhat, std::span<const double> y01) {
  if (yhat.size() != y01.size() || yhat.empty())
    throw Error(Errc::length_mismatch, "bce_mean wants matching non-empty prediction/label lists");
  const double lo = kProbClamp;
  const double hi = 1.0 - kProbClamp;
  const double m = static_cast<double>(yhat.size());
  bool rg = false;
  double loss = 0.0;
  for (std::size_t i = 0; i < yhat.size(); ++i) {
    if (y01[i] != 0.0 && y01[i] != 1.0)
      throw Error(Errc::label_out_of_range, "labels must be 0 or 1");
    const Tensor& p = value(yhat[i]);
    if (!p.is_scalar()) throw Error(Errc::shape_mismatch, "bce_mean wants 1x1 predictions");
    const double pc = std::min(hi, std::max(lo, p[0]));
    loss -= y01[i] * std::log(pc) + (1.0 - y01[i]) * std::log(1.0 - pc);
    rg = rg || node(yhat[i]).requires_grad;
  }
  loss /= m;
  std::vector<Var> ys(yhat.begin(), yhat.end());
  std::vector<double> labels(y01.begin(), y01.end());
  Var v = push(Tensor::scalar(loss), rg, {});
  if (rg) {
    node(v).back = [ys, labels, v, lo, hi, m](Tape& t) {
      const double g = t.node(v).grad[0];
      for (std::size_t i = 0; i < ys.size(); ++i) {
        const double p = t.value(ys[i])[0];
        double d = 0.0;
        if (p > lo && p < hi) d = (p - labels[i]) / (p * (1.0 - p)) / m;
        t.accumulate(ys[i], Tensor::scalar(g * d));
      }
    };
  }
  return v;
}

std::vector<Tensor> Tape::backward(Var loss, std::span<const Var> params) {
  if (!loss.valid() || !node(loss).value.is_scalar())
    throw Error(Errc::not_scalar_loss, "backward needs a 1x1 loss on the tape");
  if (node(loss).requires_grad) {
    node(loss).grad[0] = 1.0;
    for (int i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.requires_grad && n.back) n.back(*this);
    }
  }
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (Var p : params) {
    const Node& n = node(p);
    grads.push_back(n.requires_grad ? n.grad : Tensor(n.value.rows(), n.value.cols()));
  }
  clear();
  return grads;
}

void Tape::clear() { nodes_.clear(); }

std::vector<Tensor> finite_diff_gradient(
    const std::function<double(const std::vector<Tensor>&)>& f, std::vector<Tensor> params,
    double step) {
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor g(params[p].rows(), params[p].cols());
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double orig = params[p][i];
      params[p][i] = orig + step;
      const double fp = f(params);
      params[p][i] = orig - step;
      const double fm = f(params);
      params[p][i] = orig;
      g[i] = (fp - fm) / (2.0 * step);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double finite_diff_check(const std::function<double(const std::vector<Tensor>&)>& f,
                         const std::vector<Tensor>& params,
                         const std::vector<Tensor>& grads_autodiff, double step) {
  if (grads_autodiff.size() != params.size())
    throw Error(Errc::length_mismatch, "gradient list does not match parameter list");
  const std::vector<Tensor> fd = finite_diff_gradient(f, params, step);
  double worst = 0.0;
  for (std::size_t p = 0; p < fd.size(); ++p) {
    for (std::size_t i = 0; i < fd[p].size(); ++i) {
      const double rel =
          std::abs(grads_autodiff[p][i] - fd[p][i]) / (std::abs(fd[p][i]) + 1e-8);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace reid

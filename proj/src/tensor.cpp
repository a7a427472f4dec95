#include "hoi/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace hoi::nn {

namespace {

std::string shape_str(const Mat& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

[[noreturn]] void shape_error(const char* op, const Mat& a, const Mat& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a) +
                              " vs " + shape_str(b));
}

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw std::invalid_argument(std::string(op) + ": undefined tensor");
}

std::shared_ptr<TensorNode> make_node(Mat value,
                                      std::vector<std::shared_ptr<TensorNode>> parents) {
  auto n = std::make_shared<TensorNode>();
  n->value = std::move(value);
  for (const auto& p : parents) {
    if (p->requires_grad) {
      n->requires_grad = true;
      break;
    }
  }
  if (n->requires_grad) {
    n->grad = Mat(n->value.rows, n->value.cols);
    n->parents = std::move(parents);
  }
  return n;
}

void accumulate(Mat& dst, const Mat& src) {
  for (std::size_t i = 0; i < dst.a.size(); ++i) dst.a[i] += src.a[i];
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor Tensor::from_node(std::shared_ptr<TensorNode> n) {
  Tensor t;
  t.n_ = std::move(n);
  return t;
}

Tensor Tensor::param(Mat value) {
  auto n = std::make_shared<TensorNode>();
  n->grad = Mat(value.rows, value.cols);
  n->value = std::move(value);
  n->requires_grad = true;
  return from_node(std::move(n));
}

Tensor Tensor::constant(Mat value) {
  auto n = std::make_shared<TensorNode>();
  n->value = std::move(value);
  return from_node(std::move(n));
}

double Tensor::scalar() const {
  if (!n_ || n_->value.rows != 1 || n_->value.cols != 1)
    throw std::runtime_error("scalar: tensor is not 1x1");
  return n_->value.a[0];
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined(a, "matmul");
  require_defined(b, "matmul");
  if (a.value().cols != b.value().rows) shape_error("matmul", a.value(), b.value());
  auto n = make_node(hoi::matmul(a.value(), b.value()), {a.share(), b.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& pa = *self.parents[0];
      TensorNode& pb = *self.parents[1];
      if (pa.requires_grad) accumulate(pa.grad, hoi::matmul(self.grad, transposed(pb.value)));
      if (pb.requires_grad) accumulate(pb.grad, hoi::matmul(transposed(pa.value), self.grad));
    };
  }
  return Tensor::from_node(n);
}

Tensor transpose(const Tensor& a) {
  require_defined(a, "transpose");
  auto n = make_node(transposed(a.value()), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      accumulate(self.parents[0]->grad, transposed(self.grad));
    };
  }
  return Tensor::from_node(n);
}

namespace {

template <typename Fwd, typename Bwd>
Tensor binary_same_shape(const char* name, const Tensor& a, const Tensor& b, Fwd fwd, Bwd bwd) {
  require_defined(a, name);
  require_defined(b, name);
  if (!a.value().same_shape(b.value())) shape_error(name, a.value(), b.value());
  Mat out(a.value().rows, a.value().cols);
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = fwd(a.value().a[i], b.value().a[i]);
  auto n = make_node(std::move(out), {a.share(), b.share()});
  if (n->requires_grad) n->backward_fn = bwd;
  return Tensor::from_node(n);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_same_shape(
      "add", a, b, [](double x, double y) { return x + y; },
      [](TensorNode& self) {
        for (int k = 0; k < 2; ++k) {
          TensorNode& p = *self.parents[k];
          if (p.requires_grad) accumulate(p.grad, self.grad);
        }
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_same_shape(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](TensorNode& self) {
        TensorNode& pa = *self.parents[0];
        TensorNode& pb = *self.parents[1];
        if (pa.requires_grad) accumulate(pa.grad, self.grad);
        if (pb.requires_grad)
          for (std::size_t i = 0; i < pb.grad.a.size(); ++i) pb.grad.a[i] -= self.grad.a[i];
      });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  return binary_same_shape(
      "hadamard", a, b, [](double x, double y) { return x * y; },
      [](TensorNode& self) {
        TensorNode& pa = *self.parents[0];
        TensorNode& pb = *self.parents[1];
        if (pa.requires_grad)
          for (std::size_t i = 0; i < pa.grad.a.size(); ++i)
            pa.grad.a[i] += self.grad.a[i] * pb.value.a[i];
        if (pb.requires_grad)
          for (std::size_t i = 0; i < pb.grad.a.size(); ++i)
            pb.grad.a[i] += self.grad.a[i] * pa.value.a[i];
      });
}

Tensor scale(const Tensor& a, double s) {
  require_defined(a, "scale");
  Mat out = a.value();
  for (double& x : out.a) x *= s;
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [s](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      for (std::size_t i = 0; i < p.grad.a.size(); ++i) p.grad.a[i] += s * self.grad.a[i];
    };
  }
  return Tensor::from_node(n);
}

Tensor add_rowvec(const Tensor& a, const Tensor& v) {
  require_defined(a, "add_rowvec");
  require_defined(v, "add_rowvec");
  if (v.value().rows != 1 || v.value().cols != a.value().cols)
    shape_error("add_rowvec", a.value(), v.value());
  Mat out = a.value();
  for (std::size_t i = 0; i < out.rows; ++i)
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) += v.value()(0, j);
  auto n = make_node(std::move(out), {a.share(), v.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& pa = *self.parents[0];
      TensorNode& pv = *self.parents[1];
      if (pa.requires_grad) accumulate(pa.grad, self.grad);
      if (pv.requires_grad) {
        for (std::size_t i = 0; i < self.grad.rows; ++i)
          for (std::size_t j = 0; j < self.grad.cols; ++j)
            pv.grad(0, j) += self.grad(i, j);
      }
    };
  }
  return Tensor::from_node(n);
}

namespace {

void require_scalar_tensor(const Tensor& s, const char* op) {
  require_defined(s, op);
  if (s.value().rows != 1 || s.value().cols != 1)
    throw std::invalid_argument(std::string(op) + ": scalar operand must be 1x1, got " +
                                shape_str(s.value()));
}

}  // namespace

Tensor add_scalar_param(const Tensor& a, const Tensor& s) {
  require_defined(a, "add_scalar_param");
  require_scalar_tensor(s, "add_scalar_param");
  Mat out = a.value();
  const double sv = s.value().a[0];
  for (double& x : out.a) x += sv;
  auto n = make_node(std::move(out), {a.share(), s.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& pa = *self.parents[0];
      TensorNode& ps = *self.parents[1];
      if (pa.requires_grad) accumulate(pa.grad, self.grad);
      if (ps.requires_grad) {
        double sum = 0.0;
        for (double g : self.grad.a) sum += g;
        ps.grad.a[0] += sum;
      }
    };
  }
  return Tensor::from_node(n);
}

Tensor mul_scalar_param(const Tensor& a, const Tensor& s) {
  require_defined(a, "mul_scalar_param");
  require_scalar_tensor(s, "mul_scalar_param");
  Mat out = a.value();
  const double sv = s.value().a[0];
  for (double& x : out.a) x *= sv;
  auto n = make_node(std::move(out), {a.share(), s.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& pa = *self.parents[0];
      TensorNode& ps = *self.parents[1];
      const double sv = ps.value.a[0];
      if (pa.requires_grad)
        for (std::size_t i = 0; i < pa.grad.a.size(); ++i)
          pa.grad.a[i] += sv * self.grad.a[i];
      if (ps.requires_grad) {
        double sum = 0.0;
        for (std::size_t i = 0; i < self.grad.a.size(); ++i)
          sum += self.grad.a[i] * pa.value.a[i];
        ps.grad.a[0] += sum;
      }
    };
  }
  return Tensor::from_node(n);
}

Tensor add_mat(const Tensor& a, const Mat& m) {
  require_defined(a, "add_mat");
  if (!a.value().same_shape(m)) shape_error("add_mat", a.value(), m);
  Mat out = a.value();
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += m.a[i];
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) { accumulate(self.parents[0]->grad, self.grad); };
  }
  return Tensor::from_node(n);
}

Tensor mul_mat(const Tensor& a, const Mat& m) {
  require_defined(a, "mul_mat");
  if (!a.value().same_shape(m)) shape_error("mul_mat", a.value(), m);
  Mat out = a.value();
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] *= m.a[i];
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [m](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      for (std::size_t i = 0; i < p.grad.a.size(); ++i)
        p.grad.a[i] += self.grad.a[i] * m.a[i];
    };
  }
  return Tensor::from_node(n);
}

Tensor relu(const Tensor& a) {
  require_defined(a, "relu");
  Mat out = a.value();
  for (double& x : out.a) x = x > 0.0 ? x : 0.0;
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      for (std::size_t i = 0; i < p.grad.a.size(); ++i)
        if (p.value.a[i] > 0.0) p.grad.a[i] += self.grad.a[i];
    };
  }
  return Tensor::from_node(n);
}

Tensor sigmoid(const Tensor& a) {
  require_defined(a, "sigmoid");
  Mat out = a.value();
  for (double& x : out.a) x = stable_sigmoid(x);
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      for (std::size_t i = 0; i < p.grad.a.size(); ++i) {
        const double y = self.value.a[i];
        p.grad.a[i] += self.grad.a[i] * y * (1.0 - y);
      }
    };
  }
  return Tensor::from_node(n);
}

Tensor softmax_rows(const Tensor& a) {
  require_defined(a, "softmax_rows");
  const Mat& x = a.value();
  Mat out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double mx = x(i, 0);
    for (std::size_t j = 1; j < x.cols; ++j) mx = std::max(mx, x(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) {
      out(i, j) = std::exp(x(i, j) - mx);
      sum += out(i, j);
    }
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < x.cols; ++j) out(i, j) *= inv;
  }
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      for (std::size_t i = 0; i < self.value.rows; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < self.value.cols; ++j)
          dot += self.grad(i, j) * self.value(i, j);
        for (std::size_t j = 0; j < self.value.cols; ++j)
          p.grad(i, j) += self.value(i, j) * (self.grad(i, j) - dot);
      }
    };
  }
  return Tensor::from_node(n);
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require_defined(x, "layer_norm_rows");
  require_defined(gain, "layer_norm_rows");
  require_defined(bias, "layer_norm_rows");
  const Mat& X = x.value();
  if (gain.value().rows != 1 || gain.value().cols != X.cols)
    shape_error("layer_norm_rows gain", X, gain.value());
  if (bias.value().rows != 1 || bias.value().cols != X.cols)
    shape_error("layer_norm_rows bias", X, bias.value());
  if (!(eps > 0.0)) throw std::invalid_argument("layer_norm_rows: eps must be positive");

  const std::size_t d = X.cols;
  std::vector<double> mean(X.rows), rstd(X.rows);
  Mat out(X.rows, X.cols);
  for (std::size_t i = 0; i < X.rows; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += X(i, j);
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = X(i, j) - mu;
      var += c * c;
    }
    var /= static_cast<double>(d);
    mean[i] = mu;
    rstd[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j)
      out(i, j) = (X(i, j) - mu) * rstd[i] * gain.value()(0, j) + bias.value()(0, j);
  }
  auto n = make_node(std::move(out), {x.share(), gain.share(), bias.share()});
  if (n->requires_grad) {
    n->backward_fn = [mean = std::move(mean), rstd = std::move(rstd)](TensorNode& self) {
      TensorNode& px = *self.parents[0];
      TensorNode& pg = *self.parents[1];
      TensorNode& pb = *self.parents[2];
      const Mat& X = px.value;
      const Mat& G = pg.value;
      const std::size_t d = X.cols;
      std::vector<double> xhat(d), dxhat(d);
      for (std::size_t i = 0; i < X.rows; ++i) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          xhat[j] = (X(i, j) - mean[i]) * rstd[i];
          dxhat[j] = self.grad(i, j) * G(0, j);
          m1 += dxhat[j];
          m2 += dxhat[j] * xhat[j];
        }
        m1 /= static_cast<double>(d);
        m2 /= static_cast<double>(d);
        if (px.requires_grad)
          for (std::size_t j = 0; j < d; ++j)
            px.grad(i, j) += rstd[i] * (dxhat[j] - m1 - xhat[j] * m2);
        if (pg.requires_grad)
          for (std::size_t j = 0; j < d; ++j) pg.grad(0, j) += self.grad(i, j) * xhat[j];
        if (pb.requires_grad)
          for (std::size_t j = 0; j < d; ++j) pb.grad(0, j) += self.grad(i, j);
      }
    };
  }
  return Tensor::from_node(n);
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_defined(a, "concat_cols");
  require_defined(b, "concat_cols");
  const Mat& A = a.value();
  const Mat& B = b.value();
  if (A.rows != B.rows) shape_error("concat_cols", A, B);
  Mat out(A.rows, A.cols + B.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) out(i, j) = A(i, j);
    for (std::size_t j = 0; j < B.cols; ++j) out(i, A.cols + j) = B(i, j);
  }
  auto n = make_node(std::move(out), {a.share(), b.share()});
  if (n->requires_grad) {
    const std::size_t ac = A.cols;
    n->backward_fn = [ac](TensorNode& self) {
      TensorNode& pa = *self.parents[0];
      TensorNode& pb = *self.parents[1];
      if (pa.requires_grad)
        for (std::size_t i = 0; i < pa.grad.rows; ++i)
          for (std::size_t j = 0; j < pa.grad.cols; ++j) pa.grad(i, j) += self.grad(i, j);
      if (pb.requires_grad)
        for (std::size_t i = 0; i < pb.grad.rows; ++i)
          for (std::size_t j = 0; j < pb.grad.cols; ++j)
            pb.grad(i, j) += self.grad(i, ac + j);
    };
  }
  return Tensor::from_node(n);
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  std::size_t rows = 0;
  const std::size_t cols = parts[0].defined() ? parts[0].value().cols : 0;
  std::vector<std::shared_ptr<TensorNode>> parents;
  for (const Tensor& p : parts) {
    require_defined(p, "concat_rows");
    if (p.value().cols != cols) shape_error("concat_rows", parts[0].value(), p.value());
    rows += p.value().rows;
    parents.push_back(p.share());
  }
  Mat out(rows, cols);
  std::size_t r = 0;
  for (const Tensor& p : parts) {
    const Mat& v = p.value();
    for (std::size_t i = 0; i < v.rows; ++i, ++r)
      for (std::size_t j = 0; j < cols; ++j) out(r, j) = v(i, j);
  }
  auto n = make_node(std::move(out), std::move(parents));
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      std::size_t r = 0;
      for (auto& parent : self.parents) {
        TensorNode& p = *parent;
        if (p.requires_grad) {
          for (std::size_t i = 0; i < p.value.rows; ++i)
            for (std::size_t j = 0; j < p.value.cols; ++j)
              p.grad(i, j) += self.grad(r + i, j);
        }
        r += p.value.rows;
      }
    };
  }
  return Tensor::from_node(n);
}

Tensor slice_cols(const Tensor& a, std::size_t c0, std::size_t c1) {
  require_defined(a, "slice_cols");
  const Mat& A = a.value();
  if (c0 >= c1 || c1 > A.cols)
    throw std::invalid_argument("slice_cols: bad range [" + std::to_string(c0) + "," +
                                std::to_string(c1) + ") for " + shape_str(A));
  Mat out(A.rows, c1 - c0);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) = A(i, c0 + j);
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [c0](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      for (std::size_t i = 0; i < self.grad.rows; ++i)
        for (std::size_t j = 0; j < self.grad.cols; ++j)
          p.grad(i, c0 + j) += self.grad(i, j);
    };
  }
  return Tensor::from_node(n);
}

Tensor gather_rows(const Tensor& a, std::vector<std::size_t> idx) {
  require_defined(a, "gather_rows");
  const Mat& A = a.value();
  for (std::size_t k : idx)
    if (k >= A.rows)
      throw std::invalid_argument("gather_rows: index " + std::to_string(k) +
                                  " out of range for " + shape_str(A));
  Mat out(idx.size(), A.cols);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t j = 0; j < A.cols; ++j) out(r, j) = A(idx[r], j);
  auto n = make_node(std::move(out), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [idx = std::move(idx)](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t j = 0; j < self.grad.cols; ++j)
          p.grad(idx[r], j) += self.grad(r, j);
    };
  }
  return Tensor::from_node(n);
}

Tensor sum_all(const Tensor& a) {
  require_defined(a, "sum_all");
  double s = 0.0;
  for (double v : a.value().a) s += v;
  auto n = make_node(Mat(1, 1, s), {a.share()});
  if (n->requires_grad) {
    n->backward_fn = [](TensorNode& self) {
      TensorNode& p = *self.parents[0];
      const double g = self.grad.a[0];
      for (double& x : p.grad.a) x += g;
    };
  }
  return Tensor::from_node(n);
}

Tensor dropout(const Tensor& a, double p, Rng& rng) {
  require_defined(a, "dropout");
  if (p <= 0.0) return a;
  if (p >= 1.0) throw std::invalid_argument("dropout: p must be below 1");
  const double keep = 1.0 / (1.0 - p);
  Mat mask(a.value().rows, a.value().cols);
  for (double& m : mask.a) m = rng.uniform() < p ? 0.0 : keep;
  return mul_mat(a, mask);
}

Tensor focal_bce(const Tensor& probs, const Mat& targets, double gamma, double balance) {
  require_defined(probs, "focal_bce");
  if (!probs.value().same_shape(targets)) shape_error("focal_bce", probs.value(), targets);
  if (gamma < 0.0) throw std::invalid_argument("focal_bce: gamma must be non-negative");
  for (double y : targets.a)
    if (y != 0.0 && y != 1.0)
      throw std::invalid_argument("focal_bce: targets must be 0 or 1");

  constexpr double kClamp = 1e-12;
  Mat out(probs.value().rows, probs.value().cols);
  for (std::size_t i = 0; i < out.a.size(); ++i) {
    const double pc = std::min(std::max(probs.value().a[i], kClamp), 1.0 - kClamp);
    out.a[i] = targets.a[i] == 1.0
                   ? -balance * std::pow(1.0 - pc, gamma) * std::log(pc)
                   : -(1.0 - balance) * std::pow(pc, gamma) * std::log(1.0 - pc);
  }
  auto n = make_node(std::move(out), {probs.share()});
  if (n->requires_grad) {
    n->backward_fn = [targets, gamma, balance](TensorNode& self) {
      constexpr double kClamp = 1e-12;
      TensorNode& p = *self.parents[0];
      for (std::size_t i = 0; i < p.grad.a.size(); ++i) {
        const double pc = std::min(std::max(p.value.a[i], kClamp), 1.0 - kClamp);
        double d;
        if (targets.a[i] == 1.0) {
          d = -balance *
              (std::pow(1.0 - pc, gamma) / pc -
               gamma * std::pow(1.0 - pc, gamma - 1.0) * std::log(pc));
        } else {
          d = -(1.0 - balance) *
              (gamma * std::pow(pc, gamma - 1.0) * std::log(1.0 - pc) -
               std::pow(pc, gamma) / (1.0 - pc));
        }
        p.grad.a[i] += self.grad.a[i] * d;
      }
    };
  }
  return Tensor::from_node(n);
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw std::runtime_error("backward: no recorded forward");
  if (loss.value().rows != 1 || loss.value().cols != 1)
    throw std::runtime_error("backward: loss must be 1x1, got " + shape_str(loss.value()));
  if (!std::isfinite(loss.value().a[0]))
    throw std::runtime_error("backward: loss is not finite");
  if (!loss.requires_grad()) return;  // constant graph, nothing to propagate

  // Iterative post-order over the differentiable subgraph; reversed, every
  // node runs after all of its consumers.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  struct Frame {
    TensorNode* n;
    std::size_t next;
  };
  std::vector<Frame> stack{{loss.node(), 0}};
  seen.insert(loss.node());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.n->parents.size()) {
      TensorNode* p = f.n->parents[f.next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }
  loss.node()->grad.a[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
}

}  // namespace hoi::nn

#include "hoi/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace hoi::nn {

Tensor& ParamStore::add(const std::string& name, Mat init) {
  if (by_name_.count(name))
    throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  order_.push_back(name);
  return by_name_.emplace(name, Tensor::param(std::move(init))).first->second;
}

Tensor& ParamStore::get(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end())
    throw std::invalid_argument("ParamStore: unknown parameter " + name);
  return it->second;
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end())
    throw std::invalid_argument("ParamStore: unknown parameter " + name);
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : by_name_) n += t.value().size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : by_name_) t.zero_grad();
}

GradStore ParamStore::grads() const {
  GradStore out;
  for (const auto& [name, t] : by_name_) out.emplace(name, t.grad());
  return out;
}

GradStore backward(const Tensor& loss, ParamStore& params) {
  backward(loss);
  return params.grads();
}

Mat xavier_init(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  Mat w(fan_in, fan_out);
  const double s = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
  for (double& x : w.a) x = s * rng.normal();
  return w;
}

Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }

Mat ones_row(std::size_t cols) { return Mat(1, cols, 1.0); }

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  Tensor y = matmul(x, w);
  return b.defined() ? add_rowvec(y, b) : y;
}

Tensor ffn(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2,
           const Tensor& b2, NnContext& ctx) {
  Tensor h = relu(linear(x, w1, b1));
  if (ctx.training && ctx.dropout > 0.0) {
    if (!ctx.rng) throw std::runtime_error("ffn: dropout requested without an rng");
    h = dropout(h, ctx.dropout, *ctx.rng);
  }
  return linear(h, w2, b2);
}

void AdamW::step(ParamStore& params) { step(params, params.grads()); }

void AdamW::step(ParamStore& params, const GradStore& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (const std::string& name : params.names()) {
    auto git = grads.find(name);
    if (git == grads.end())
      throw std::runtime_error("AdamW: missing gradient for " + name);
    const Mat& g = git->second;
    Tensor& p = params.get(name);
    if (!p.value().same_shape(g))
      throw std::runtime_error("AdamW: gradient shape mismatch for " + name);
    if (!all_finite(g))
      throw std::runtime_error("AdamW: non-finite gradient for " + name);
    Mat& m = m_.try_emplace(name, Mat(g.rows, g.cols)).first->second;
    Mat& v = v_.try_emplace(name, Mat(g.rows, g.cols)).first->second;
    Mat& x = p.value_mut();
    for (std::size_t i = 0; i < x.a.size(); ++i) {
      m.a[i] = cfg_.beta1 * m.a[i] + (1.0 - cfg_.beta1) * g.a[i];
      v.a[i] = cfg_.beta2 * v.a[i] + (1.0 - cfg_.beta2) * g.a[i] * g.a[i];
      const double mhat = m.a[i] / bc1;
      const double vhat = v.a[i] / bc2;
      x.a[i] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) + cfg_.weight_decay * x.a[i]);
    }
  }
}

GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, ParamStore& params,
                           double eps, std::size_t max_coords_per_tensor,
                           std::uint64_t seed) {
  params.zero_grad();
  Tensor loss = loss_fn();
  backward(loss);
  const GradStore analytic = params.grads();

  GradCheckReport report;
  Rng rng(seed);
  for (const std::string& name : params.names()) {
    Tensor& p = params.get(name);
    const std::size_t total = p.value().size();
    std::vector<std::size_t> coords;
    if (total <= max_coords_per_tensor) {
      coords.resize(total);
      for (std::size_t i = 0; i < total; ++i) coords[i] = i;
    } else {
      coords = rng.sample_without_replacement(total, max_coords_per_tensor);
    }
    const Mat& ag = analytic.at(name);
    for (std::size_t i : coords) {
      double& slot = p.value_mut().a[i];
      const double saved = slot;
      slot = saved + eps;
      const double up = loss_fn().scalar();
      slot = saved - eps;
      const double down = loss_fn().scalar();
      slot = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw std::runtime_error("grad_check: non-finite loss while perturbing " + name);
      const double numeric = (up - down) / (2.0 * eps);
      const double a = ag.a[i];
      const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      ++report.coords_checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

double grad_norm(const ParamStore& params) {
  double s = 0.0;
  for (const std::string& name : params.names()) {
    const Mat& g = params.get(name).grad();
    for (double x : g.a) s += x * x;
  }
  return std::sqrt(s);
}

std::string params_to_json(const ParamStore& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const std::string& name : params.names()) {
    const Mat& v = params.get(name).value();
    j[name] = {{"rows", v.rows}, {"cols", v.cols}, {"data", v.a}};
  }
  return j.dump();
}

void params_from_json(const std::string& text, ParamStore& params) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::runtime_error("params: top level must be an object");
  std::size_t matched = 0;
  for (const std::string& name : params.names()) {
    auto it = j.find(name);
    if (it == j.end()) throw std::runtime_error("params: missing tensor " + name);
    Tensor& p = params.get(name);
    const std::size_t rows = it->at("rows").get<std::size_t>();
    const std::size_t cols = it->at("cols").get<std::size_t>();
    if (rows != p.value().rows || cols != p.value().cols)
      throw std::runtime_error("params: shape mismatch for " + name);
    std::vector<double> data = it->at("data").get<std::vector<double>>();
    if (data.size() != rows * cols)
      throw std::runtime_error("params: data length mismatch for " + name);
    p.value_mut().a = std::move(data);
    ++matched;
  }
  if (matched != j.size()) throw std::runtime_error("params: file contains unknown tensors");
}

}  // namespace hoi::nn

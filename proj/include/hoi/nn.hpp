#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hoi/rng.hpp"
#include "hoi/tensor.hpp"

namespace hoi::nn {

/// Runtime knobs threaded through every forward builder. Dropout only fires
/// when training is set and the probability is positive; rng must then be
/// non-null.
struct NnContext {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
};

/// Name -> gradient snapshot, ordered so iteration is deterministic.
using GradStore = std::map<std::string, Mat>;

/// Named trainable tensors. Iteration follows insertion order, which is what
/// keeps initialization and optimizer updates reproducible.
class ParamStore {
 public:
  Tensor& add(const std::string& name, Mat init);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const { return by_name_.count(name) != 0; }
  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::size_t scalar_count() const;
  void zero_grad();
  GradStore grads() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, Tensor> by_name_;
};

/// Reverse sweep plus a snapshot of the parameter gradients.
GradStore backward(const Tensor& loss, ParamStore& params);

Mat xavier_init(Rng& rng, std::size_t fan_in, std::size_t fan_out);
Mat zeros(std::size_t rows, std::size_t cols);
Mat ones_row(std::size_t cols);

/// x W (+ b when bias is defined).
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

/// Two-layer rectified feed-forward with dropout on the hidden activations.
Tensor ffn(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2,
           const Tensor& b2, NnContext& ctx);

struct AdamWConfig {
  double lr = 2e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Decoupled-weight-decay Adam. First and second moments are keyed by
/// parameter name; decay multiplies the parameter directly and never enters
/// the moment estimates. Throws on a non-finite gradient.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}
  void step(ParamStore& params);
  void step(ParamStore& params, const GradStore& grads);
  void set_lr(double lr) { cfg_.lr = lr; }
  const AdamWConfig& config() const { return cfg_; }
  std::size_t step_count() const { return t_; }

 private:
  AdamWConfig cfg_;
  std::size_t t_ = 0;
  std::map<std::string, Mat> m_, v_;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
};

/// Central-difference check of every parameter in the store against the
/// analytic gradients of loss_fn. Relative error is
/// |a - n| / max(1e-8, |a| + |n|). loss_fn must rebuild the same graph on
/// every call (any internal sampling has to be re-seeded inside it).
GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, ParamStore& params,
                           double eps = 1e-4, std::size_t max_coords_per_tensor = 200,
                           std::uint64_t seed = 0x6e6e5f636865636bull);

/// Gradient L2 norm over the whole store.
double grad_norm(const ParamStore& params);

/// JSON object {"name": {"rows": r, "cols": c, "data": [...]}, ...} rendered
/// as a string; load enforces that names and shapes match the store exactly.
std::string params_to_json(const ParamStore& params);
void params_from_json(const std::string& text, ParamStore& params);

}  // namespace hoi::nn

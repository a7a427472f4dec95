#include "hoi/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace hoi {

namespace {
constexpr double kClamp = 1e-12;

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

double da_weight(double distance, double alpha, double beta) {
  return stable_sigmoid(alpha * distance + beta);
}

double focal_term(double prob, int target, double gamma, double balance) {
  if (target != 0 && target != 1)
    throw std::invalid_argument("focal_term: target must be 0 or 1");
  const double p = std::min(std::max(prob, kClamp), 1.0 - kClamp);
  if (target == 1) return -balance * std::pow(1.0 - p, gamma) * std::log(p);
  return -(1.0 - balance) * std::pow(p, gamma) * std::log(1.0 - p);
}

double pair_loss(const std::vector<double>& probs, const std::vector<int>& targets,
                 double distance_weight, const LossConfig& cfg) {
  if (probs.size() != targets.size())
    throw std::invalid_argument("pair_loss: probs and targets differ in length");
  double sum = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c)
    sum += focal_term(probs[c], targets[c], cfg.focal_gamma, cfg.focal_balance);
  return distance_weight * sum;
}

double batch_loss(const std::vector<PairSample>& pairs, double alpha, double beta,
                  const LossConfig& cfg) {
  double total = 0.0;
  std::size_t positives = 0;
  for (const PairSample& p : pairs) {
    const double w = cfg.da_enabled ? da_weight(p.distance, alpha, beta) : 1.0;
    total += pair_loss(p.probs, p.targets, w, cfg);
    for (int t : p.targets) {
      if (t == 1) {
        ++positives;
        break;
      }
    }
  }
  return total / static_cast<double>(std::max<std::size_t>(1, positives));
}

nn::Tensor pair_focal_sums(const nn::Tensor& probs, const Mat& targets, const LossConfig& cfg) {
  using namespace nn;
  Tensor elems = focal_bce(probs, targets, cfg.focal_gamma, cfg.focal_balance);
  // Row sums via multiplication with a ones column.
  Tensor ones_col = Tensor::constant(Mat(probs.cols(), 1, 1.0));
  return matmul(elems, ones_col);
}

nn::Tensor da_weight_column(const Mat& distances, const nn::Tensor& alpha,
                            const nn::Tensor& beta) {
  using namespace nn;
  if (distances.cols != 1)
    throw std::invalid_argument("da_weight_column: distances must be m x 1");
  Tensor d = Tensor::constant(distances);
  return sigmoid(add_scalar_param(mul_scalar_param(d, alpha), beta));
}

std::size_t count_positive_pairs(const Mat& targets) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < targets.rows; ++i) {
    for (std::size_t j = 0; j < targets.cols; ++j) {
      if (targets(i, j) == 1.0) {
        ++n;
        break;
      }
    }
  }
  return n;
}

}  // namespace hoi

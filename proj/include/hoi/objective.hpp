#pragma once

#include <vector>

#include "hoi/nn.hpp"

namespace hoi {

struct LossConfig {
  double focal_gamma = 2.0;
  double focal_balance = 0.25;
  bool da_enabled = true;
};

/// Distance weight sigma(alpha * distance + beta). With the default trainable
/// initialization alpha = 1, beta = 0, so farther pairs weigh more.
double da_weight(double distance, double alpha, double beta);

/// One focal binary cross-entropy term. target must be 0 or 1; the
/// probability is clamped to [1e-12, 1 - 1e-12] before the log.
double focal_term(double prob, int target, double gamma, double balance);

/// Distance-weighted focal sum over one pair's verb probabilities.
double pair_loss(const std::vector<double>& probs, const std::vector<int>& targets,
                 double distance_weight, const LossConfig& cfg);

/// Plain-value batch loss over per-pair terms, normalized by the number of
/// positive pairs (a pair is positive when any target is 1), floored at 1.
struct PairSample {
  std::vector<double> probs;
  std::vector<int> targets;
  double distance = 0.0;
};
double batch_loss(const std::vector<PairSample>& pairs, double alpha, double beta,
                  const LossConfig& cfg);

/// Graph-side pieces of the same objective. pair_focal_sums maps an m x C
/// probability tensor to an m x 1 column of per-pair focal sums;
/// da_weight_column maps constant distances and the trainable alpha/beta
/// scalars to an m x 1 weight column.
nn::Tensor pair_focal_sums(const nn::Tensor& probs, const Mat& targets, const LossConfig& cfg);
nn::Tensor da_weight_column(const Mat& distances, const nn::Tensor& alpha,
                            const nn::Tensor& beta);

/// Number of rows with at least one positive target.
std::size_t count_positive_pairs(const Mat& targets);

}  // namespace hoi

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hoi/nn.hpp"
#include "hoi/objective.hpp"
#include "hoi/rng.hpp"

using namespace hoi;
using nn::Tensor;

namespace {

bool close(double a, double b, double eps = 1e-12) { return std::abs(a - b) < eps; }

}  // namespace

TEST_CASE("distance weight is a stable sigmoid of an affine distance map") {
  CHECK(close(da_weight(0.0, 1.0, 0.0), 0.5));
  CHECK(close(da_weight(0.5, 1.0, 0.0), 1.0 / (1.0 + std::exp(-0.5))));
  CHECK(close(da_weight(0.3, 2.0, -0.1), 1.0 / (1.0 + std::exp(-0.5))));
  // Monotone in distance for positive slope.
  CHECK(da_weight(0.8, 3.0, 0.0) > da_weight(0.2, 3.0, 0.0));
  // Extreme arguments saturate without overflowing.
  CHECK(da_weight(1.0, 1000.0, 0.0) == doctest::Approx(1.0));
  CHECK(da_weight(1.0, -50.0, 0.0) > 0.0);
  CHECK(da_weight(1.0, -50.0, 0.0) < 1e-20);
  CHECK(da_weight(1.0, -1000.0, 0.0) >= 0.0);
  CHECK(std::isfinite(da_weight(1.0, 1e8, 1e8)));
}

TEST_CASE("focal term matches closed forms") {
  // -0.25 * (1 - 0.5)^2 * log(0.5)
  CHECK(close(focal_term(0.5, 1, 2.0, 0.25), 0.25 * 0.25 * std::log(2.0)));
  CHECK(focal_term(0.5, 1, 2.0, 0.25) == doctest::Approx(0.043321698785).epsilon(1e-9));
  // -0.75 * 0.5^2 * log(0.5)
  CHECK(close(focal_term(0.5, 0, 2.0, 0.25), 0.75 * 0.25 * std::log(2.0)));
  // Well-classified positive is strongly down-weighted.
  CHECK(close(focal_term(0.9, 1, 2.0, 0.25), -0.25 * 0.01 * std::log(0.9)));
  // Confident mistake keeps a large penalty.
  CHECK(close(focal_term(0.9, 0, 2.0, 0.25), -0.75 * 0.81 * std::log(0.1), 1e-9));
  // gamma = 0, balance = 1/2 reduces to halved binary cross-entropy.
  CHECK(close(focal_term(0.3, 1, 0.0, 0.5), -0.5 * std::log(0.3)));
  CHECK(close(focal_term(0.3, 0, 0.0, 0.5), -0.5 * std::log(0.7)));
}

TEST_CASE("focal term clamps probabilities and validates targets") {
  CHECK(std::isfinite(focal_term(0.0, 1, 2.0, 0.25)));
  CHECK(std::isfinite(focal_term(1.0, 0, 2.0, 0.25)));
  CHECK(focal_term(0.0, 1, 2.0, 0.25) == doctest::Approx(0.25 * 12.0 * std::log(10.0)));
  CHECK_THROWS_WITH_AS(focal_term(0.5, 2, 2.0, 0.25), doctest::Contains("target must be 0 or 1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(focal_term(0.5, -1, 2.0, 0.25), doctest::Contains("target must be 0 or 1"),
                       std::invalid_argument);
}

TEST_CASE("pair loss weighs the focal sum by the distance weight") {
  LossConfig cfg;  // gamma 2, balance 0.25
  std::vector<double> probs = {0.5, 0.9};
  std::vector<int> targets = {1, 0};
  const double expected =
      focal_term(0.5, 1, cfg.focal_gamma, cfg.focal_balance) +
      focal_term(0.9, 0, cfg.focal_gamma, cfg.focal_balance);
  CHECK(close(pair_loss(probs, targets, 1.0, cfg), expected));
  CHECK(close(pair_loss(probs, targets, 0.25, cfg), 0.25 * expected));
  CHECK(close(pair_loss({}, {}, 3.0, cfg), 0.0));
  CHECK_THROWS_WITH_AS(pair_loss({0.5}, {1, 0}, 1.0, cfg),
                       doctest::Contains("differ in length"), std::invalid_argument);
}

TEST_CASE("batch loss normalizes by the positive-pair count") {
  LossConfig cfg;
  PairSample pos{{0.6, 0.2}, {1, 0}, 0.7};
  PairSample neg{{0.3, 0.4}, {0, 0}, 0.2};
  PairSample pos2{{0.1, 0.8}, {0, 1}, 0.4};

  const double wp = da_weight(pos.distance, 1.0, 0.0);
  const double wn = da_weight(neg.distance, 1.0, 0.0);
  const double wp2 = da_weight(pos2.distance, 1.0, 0.0);
  const double terms = pair_loss(pos.probs, pos.targets, wp, cfg) +
                       pair_loss(neg.probs, neg.targets, wn, cfg) +
                       pair_loss(pos2.probs, pos2.targets, wp2, cfg);
  // Two pairs carry a positive verb, so the divisor is two.
  CHECK(close(batch_loss({pos, neg, pos2}, 1.0, 0.0, cfg), terms / 2.0));

  // No positives: divisor floors at one instead of dividing by zero.
  const double only_neg = pair_loss(neg.probs, neg.targets, wn, cfg);
  CHECK(close(batch_loss({neg}, 1.0, 0.0, cfg), only_neg));
  CHECK(batch_loss({}, 1.0, 0.0, cfg) == 0.0);

  // Disabling the distance weight is the same as weighing every pair by one.
  LossConfig flat = cfg;
  flat.da_enabled = false;
  const double unweighted = pair_loss(pos.probs, pos.targets, 1.0, cfg) +
                            pair_loss(neg.probs, neg.targets, 1.0, cfg);
  CHECK(close(batch_loss({pos, neg}, 5.0, -3.0, flat), unweighted));
}

TEST_CASE("graph focal sums match the plain-value loss row by row") {
  LossConfig cfg;
  Mat probs(3, 4);
  Mat targets(3, 4, 0.0);
  Rng rng(17);
  for (double& v : probs.a) v = rng.uniform(0.05, 0.95);
  targets(0, 1) = 1.0;
  targets(2, 0) = 1.0;
  targets(2, 3) = 1.0;

  Tensor sums = pair_focal_sums(Tensor::constant(probs), targets, cfg);
  REQUIRE(sums.rows() == 3);
  REQUIRE(sums.cols() == 1);
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> p(4), t4;
    std::vector<int> t(4);
    for (std::size_t j = 0; j < 4; ++j) {
      p[j] = probs(i, j);
      t[j] = static_cast<int>(targets(i, j));
    }
    CHECK(close(sums.value()(i, 0), pair_loss(p, t, 1.0, cfg), 1e-12));
  }
}

TEST_CASE("distance weight column matches the scalar map and validates shape") {
  Mat dist(4, 1);
  dist.a = {0.05, 0.3, 0.6, 0.85};
  Tensor alpha = Tensor::param(Mat(1, 1, 1.4));
  Tensor beta = Tensor::param(Mat(1, 1, -0.2));
  Tensor col = da_weight_column(dist, alpha, beta);
  REQUIRE(col.rows() == 4);
  REQUIRE(col.cols() == 1);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(close(col.value()(i, 0), da_weight(dist(i, 0), 1.4, -0.2)));

  Mat wide(2, 2, 0.1);
  CHECK_THROWS_WITH_AS(da_weight_column(wide, alpha, beta),
                       doctest::Contains("must be m x 1"), std::invalid_argument);
}

TEST_CASE("weighted graph loss equals the plain batch total before normalization") {
  LossConfig cfg;
  Rng rng(23);
  const std::size_t m = 5, verbs = 3;
  Mat probs(m, verbs);
  for (double& v : probs.a) v = rng.uniform(0.05, 0.95);
  Mat targets(m, verbs, 0.0);
  targets(0, 0) = 1.0;
  targets(3, 2) = 1.0;
  Mat dist(m, 1);
  for (double& v : dist.a) v = rng.uniform(0.0, 0.85);

  const double alpha = 0.9, beta = 0.15;
  Tensor a = Tensor::param(Mat(1, 1, alpha));
  Tensor b = Tensor::param(Mat(1, 1, beta));
  Tensor weighted = nn::hadamard(da_weight_column(dist, a, b),
                                 pair_focal_sums(Tensor::constant(probs), targets, cfg));
  double total = nn::sum_all(weighted).value()(0, 0);

  std::vector<PairSample> samples(m);
  for (std::size_t i = 0; i < m; ++i) {
    samples[i].distance = dist(i, 0);
    for (std::size_t j = 0; j < verbs; ++j) {
      samples[i].probs.push_back(probs(i, j));
      samples[i].targets.push_back(static_cast<int>(targets(i, j)));
    }
  }
  CHECK(close(batch_loss(samples, alpha, beta, cfg) * 2.0, total, 1e-10));
  CHECK(count_positive_pairs(targets) == 2);
}

TEST_CASE("count_positive_pairs counts rows with any positive") {
  Mat t(4, 2, 0.0);
  t(0, 0) = 1.0;
  t(2, 1) = 1.0;
  t(3, 0) = 1.0;
  t(3, 1) = 1.0;
  CHECK(count_positive_pairs(t) == 3);
  CHECK(count_positive_pairs(Mat(3, 2, 0.0)) == 0);
  CHECK(count_positive_pairs(Mat(0, 0)) == 0);
}

TEST_CASE("objective gradients check out end to end") {
  LossConfig cfg;
  const std::size_t m = 4, verbs = 3;
  nn::ParamStore params;
  Rng init(41);
  Mat logits(m, verbs);
  for (double& v : logits.a) v = 0.8 * init.normal();
  params.add("logits", logits);
  params.add("da.alpha", Mat(1, 1, 1.0));
  params.add("da.beta", Mat(1, 1, 0.0));

  Mat targets(m, verbs, 0.0);
  targets(0, 0) = 1.0;
  targets(1, 2) = 1.0;
  targets(3, 1) = 1.0;
  Mat dist(m, 1);
  dist.a = {0.1, 0.45, 0.7, 0.3};
  const double norm = 1.0 / static_cast<double>(count_positive_pairs(targets));

  auto loss_fn = [&]() {
    Tensor probs = nn::sigmoid(params.get("logits"));
    Tensor w = da_weight_column(dist, params.get("da.alpha"), params.get("da.beta"));
    Tensor focal = pair_focal_sums(probs, targets, cfg);
    return nn::scale(nn::sum_all(nn::hadamard(w, focal)), norm);
  };

  nn::GradCheckReport rep = nn::grad_check(loss_fn, params, 1e-5, 100);
  INFO("worst ", rep.worst_param, "[", rep.worst_index, "] analytic ", rep.worst_analytic,
       " numeric ", rep.worst_numeric);
  CHECK(rep.max_rel_error < 2e-6);
  CHECK(rep.coords_checked > 0);
}

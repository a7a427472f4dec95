#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hoi/interaction.hpp"
#include "hoi/nn.hpp"
#include "hoi/rng.hpp"
#include "hoi/scene.hpp"

using namespace hoi;
using nn::Tensor;

namespace {

Token make_token(bool human) {
  Token t;
  t.is_human = human;
  t.class_id = human ? 1 : 40;
  t.score = 0.9;
  t.box = {0.1, 0.1, 0.3, 0.3};
  return t;
}

std::vector<Token> tokens_from_flags(const std::vector<bool>& human) {
  std::vector<Token> out;
  for (bool h : human) out.push_back(make_token(h));
  return out;
}

Mat randn(Rng& rng, std::size_t r, std::size_t c, double s) {
  Mat m(r, c);
  for (double& v : m.a) v = s * rng.normal();
  return m;
}

// Plain-double x W + b over one row.
std::vector<double> row_linear(const std::vector<double>& x, const Mat& w, const Mat& b) {
  std::vector<double> out(w.cols, 0.0);
  for (std::size_t j = 0; j < w.cols; ++j) {
    double s = b(0, j);
    for (std::size_t k = 0; k < w.rows; ++k) s += x[k] * w(k, j);
    out[j] = s;
  }
  return out;
}

std::vector<double> reference_context(const std::vector<double>& g, const Mat& w1, const Mat& b1,
                                      const Mat& w2, const Mat& b2) {
  std::vector<double> h = row_linear(g, w1, b1);
  for (double& v : h) v = v > 0.0 ? v : 0.0;
  return row_linear(h, w2, b2);
}

}  // namespace

TEST_CASE("make_pairs anchors every human against every other token") {
  auto pairs = make_pairs(tokens_from_flags({true, false, true, false}));
  std::vector<std::pair<std::size_t, std::size_t>> expected = {
      {0, 1}, {0, 2}, {0, 3}, {2, 0}, {2, 1}, {2, 3}};
  CHECK(pairs == expected);
}

TEST_CASE("make_pairs degenerate inputs") {
  CHECK(make_pairs(tokens_from_flags({false, false, false})).empty());
  CHECK(make_pairs(tokens_from_flags({true})).empty());
  CHECK(make_pairs({}).empty());
  // One human, one object: both directions do not appear, only human anchor.
  auto pairs = make_pairs(tokens_from_flags({false, true}));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{1, 0});
}

TEST_CASE("fuse_pairs concatenates endpoints and broadcasts the scene context") {
  const std::size_t d = 3, hidden = 4;
  Mat tok(3, d);
  const double vals[9] = {0.2, -0.4, 0.7, 1.1, 0.05, -0.3, -0.9, 0.6, 0.25};
  tok.a.assign(vals, vals + 9);

  Rng rng(31);
  Mat w1 = randn(rng, d, hidden, 0.6);
  Mat b1 = randn(rng, 1, hidden, 0.4);  // mixed signs exercise the rectifier
  Mat w2 = randn(rng, hidden, 2 * d, 0.6);
  Mat b2 = randn(rng, 1, 2 * d, 0.4);
  GlobalFusionWeights w{Tensor::constant(w1), Tensor::constant(b1), Tensor::constant(w2),
                        Tensor::constant(b2)};

  std::vector<double> g = {0.3, -0.2, 0.5};
  std::vector<std::pair<std::size_t, std::size_t>> pairs = {{0, 1}, {2, 0}};
  nn::NnContext ctx;
  Tensor out = fuse_pairs(Tensor::constant(tok), pairs, g, w, ctx);
  REQUIRE(out.rows() == 2);
  REQUIRE(out.cols() == 2 * d);

  std::vector<double> context = reference_context(g, w1, b1, w2, b2);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (std::size_t c = 0; c < 2 * d; ++c) {
      const std::size_t src = c < d ? pairs[k].first : pairs[k].second;
      const double expected = tok(src, c % d) + context[c];
      CHECK(std::abs(out.value()(k, c) - expected) < 1e-12);
    }
  }
}

TEST_CASE("fuse_pairs validates its inputs") {
  Mat tok(2, 3, 0.1);
  Rng rng(7);
  GlobalFusionWeights w{Tensor::constant(randn(rng, 3, 4, 0.5)),
                        Tensor::constant(Mat(1, 4, 0.0)),
                        Tensor::constant(randn(rng, 4, 6, 0.5)),
                        Tensor::constant(Mat(1, 6, 0.0))};
  nn::NnContext ctx;
  CHECK_THROWS_WITH_AS(fuse_pairs(Tensor::constant(tok), {}, {0.0, 0.0, 0.0}, w, ctx),
                       doctest::Contains("no pairs"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(fuse_pairs(Tensor::constant(tok), {{0, 1}}, {0.0, 0.0}, w, ctx),
                       doctest::Contains("global feature width mismatch"), std::invalid_argument);
}

TEST_CASE("interaction encoder registers per-layer blocks and preserves shape") {
  nn::ParamStore params;
  Rng init(5);
  InteractionEncoderConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.hidden = 8;
  register_interaction_encoder(params, "ienc", 6, cfg, init);
  CHECK(params.size() == 24);  // 12 tensors per block, one block per layer
  REQUIRE(params.has("ienc.l0.wq"));
  REQUIRE(params.has("ienc.l1.ffn.w1"));
  CHECK(params.get("ienc.l0.wq").rows() == 6);
  CHECK(params.get("ienc.l0.wq").cols() == 6);
  CHECK(params.get("ienc.l1.ffn.w1").rows() == 6);
  CHECK(params.get("ienc.l1.ffn.w1").cols() == 8);

  Rng data(9);
  Mat x = randn(data, 5, 6, 0.8);
  nn::NnContext ctx;
  Tensor a = interaction_encoder(Tensor::constant(x), params, "ienc", cfg, ctx);
  Tensor b = interaction_encoder(Tensor::constant(x), params, "ienc", cfg, ctx);
  REQUIRE(a.rows() == 5);
  REQUIRE(a.cols() == 6);
  double diff_from_input = 0.0;
  for (std::size_t i = 0; i < a.value().a.size(); ++i) {
    CHECK(std::isfinite(a.value().a[i]));
    CHECK(a.value().a[i] == b.value().a[i]);  // eval pass is deterministic
    diff_from_input += std::abs(a.value().a[i] - x.a[i]);
  }
  CHECK(diff_from_input > 1e-3);
}

TEST_CASE("predict_verbs squashes an MLP through a sigmoid") {
  const std::size_t width = 4, hidden = 5, verbs = 3;
  Rng rng(13);
  Mat x = randn(rng, 6, width, 1.0);
  nn::NnContext ctx;

  // Zero weights pin every probability at one half.
  VerbHeadWeights zero{Tensor::constant(Mat(width, hidden, 0.0)),
                       Tensor::constant(Mat(1, hidden, 0.0)),
                       Tensor::constant(Mat(hidden, verbs, 0.0)),
                       Tensor::constant(Mat(1, verbs, 0.0))};
  Tensor flat = predict_verbs(Tensor::constant(x), zero, ctx);
  REQUIRE(flat.rows() == 6);
  REQUIRE(flat.cols() == verbs);
  for (double v : flat.value().a) CHECK(v == 0.5);

  VerbHeadWeights w{Tensor::constant(randn(rng, width, hidden, 0.7)),
                    Tensor::constant(randn(rng, 1, hidden, 0.3)),
                    Tensor::constant(randn(rng, hidden, verbs, 0.7)),
                    Tensor::constant(randn(rng, 1, verbs, 0.3))};
  Tensor probs = predict_verbs(Tensor::constant(x), w, ctx);
  for (double v : probs.value().a) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("gradients flow through fusion, encoder and verb head") {
  const std::size_t d = 3, width = 2 * d, hidden = 5, verbs = 2;
  nn::ParamStore params;
  Rng init(21);
  params.add("gf.w1", nn::xavier_init(init, d, hidden));
  params.add("gf.b1", randn(init, 1, hidden, 0.1));
  params.add("gf.w2", nn::xavier_init(init, hidden, width));
  params.add("gf.b2", randn(init, 1, width, 0.1));
  InteractionEncoderConfig cfg;
  cfg.layers = 1;
  cfg.heads = 2;
  cfg.hidden = 5;
  register_interaction_encoder(params, "ienc", width, cfg, init);
  params.add("head.w1", nn::xavier_init(init, width, 7));
  params.add("head.b1", randn(init, 1, 7, 0.1));
  params.add("head.w2", nn::xavier_init(init, 7, verbs));
  params.add("head.b2", randn(init, 1, verbs, 0.1));

  Rng data(4);
  Mat tok = randn(data, 4, d, 0.8);
  auto pairs = make_pairs(tokens_from_flags({true, false, true, false}));
  REQUIRE(pairs.size() == 6);
  std::vector<double> g = {0.25, -0.4, 0.6};
  Mat mask = randn(data, 6, verbs, 1.0);

  auto loss_fn = [&]() {
    nn::NnContext ctx;
    GlobalFusionWeights gf{params.get("gf.w1"), params.get("gf.b1"), params.get("gf.w2"),
                           params.get("gf.b2")};
    Tensor fused = fuse_pairs(Tensor::constant(tok), pairs, g, gf, ctx);
    Tensor enc = interaction_encoder(fused, params, "ienc", cfg, ctx);
    VerbHeadWeights head{params.get("head.w1"), params.get("head.b1"), params.get("head.w2"),
                         params.get("head.b2")};
    Tensor probs = predict_verbs(enc, head, ctx);
    return nn::sum_all(nn::hadamard(probs, Tensor::constant(mask)));
  };

  nn::GradCheckReport rep = nn::grad_check(loss_fn, params, 1e-5, 60);
  INFO("worst ", rep.worst_param, "[", rep.worst_index, "] analytic ", rep.worst_analytic,
       " numeric ", rep.worst_numeric);
  CHECK(rep.max_rel_error < 2e-6);
  CHECK(rep.coords_checked > 0);
}

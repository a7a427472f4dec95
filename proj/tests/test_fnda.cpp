#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hoi/fnda.hpp"
#include "hoi/nn.hpp"

using namespace hoi;
using nn::Tensor;

namespace {

DistanceMatrix dm_from(std::size_t n, std::vector<double> upper) {
  DistanceMatrix d;
  d.n = n;
  d.entries = Mat(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      d.entries(i, j) = upper[k];
      d.entries(j, i) = upper[k];
      ++k;
    }
  return d;
}

Mat randn(Rng& rng, std::size_t r, std::size_t c, double s = 1.0) {
  Mat m(r, c);
  for (double& x : m.a) x = s * rng.normal();
  return m;
}

// Plain-double reference of masked multi-head attention with residual.
Mat reference_mhsa(const Mat& x, const Mat& wq, const Mat& wk, const Mat& wv, const Mat& wo,
                   std::size_t heads, const Mat& mask, MaskMode mode) {
  const std::size_t n = x.rows, d = x.cols, dh = d / heads;
  const Mat q = matmul(x, wq), k = matmul(x, wk), v = matmul(x, wv);
  Mat merged(n, d);
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> logits(n);
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < dh; ++c)
          dot += q(i, h * dh + c) * k(j, h * dh + c);
        dot /= std::sqrt(static_cast<double>(dh));
        if (mode == MaskMode::kAdditive) {
          if (mask(i, j) == 0.0) dot += -1e9;
        } else {
          dot *= mask(i, j);
        }
        logits[j] = dot;
      }
      double mx = logits[0];
      for (double l : logits) mx = std::max(mx, l);
      double z = 0.0;
      for (double& l : logits) {
        l = std::exp(l - mx);
        z += l;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double w = logits[j] / z;
        for (std::size_t c = 0; c < dh; ++c) merged(i, h * dh + c) += w * v(j, h * dh + c);
      }
    }
  }
  Mat out = matmul(merged, wo);
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += x.a[i];
  return out;
}

}  // namespace

TEST_CASE("build_masks oracles for tiny scenes") {
  // Single token: both masks are the 1x1 identity.
  const MaskPair solo = build_masks(dm_from(1, {}));
  CHECK(solo.far(0, 0) == 1.0);
  CHECK(solo.near(0, 0) == 1.0);

  // Two tokens at positive distance: the median of [0, d] is d/2, so the
  // partner is always far.
  const MaskPair pair = build_masks(dm_from(2, {0.4}));
  CHECK(pair.far(0, 1) == 1.0);
  CHECK(pair.near(0, 1) == 0.0);
  CHECK(pair.far(1, 0) == 1.0);

  // Two tokens at identical centers: distance ties go near.
  const MaskPair tied = build_masks(dm_from(2, {0.0}));
  CHECK(tied.far(0, 1) == 0.0);
  CHECK(tied.near(0, 1) == 1.0);
}

TEST_CASE("build_masks three-token hand case") {
  // D(0,1)=0.2, D(0,2)=0.6, D(1,2)=0.3; row medians 0.2, 0.2, 0.3.
  const MaskPair m = build_masks(dm_from(3, {0.2, 0.6, 0.3}));
  const double far_expect[3][3] = {{1, 0, 1}, {0, 1, 1}, {1, 0, 1}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(m.far(i, j) == far_expect[i][j]);
      if (i != j) CHECK(m.near(i, j) == 1.0 - far_expect[i][j]);
    }
}

TEST_CASE("build_masks even-row median keeps ties near") {
  // Row 0 distances [0, .5, .5, .8]: median (0.5+0.5)/2 = 0.5, so only the
  // 0.8 entry is far and both ties stay near.
  DistanceMatrix d;
  d.n = 4;
  d.entries = Mat(4, 4);
  const double row0[4] = {0.0, 0.5, 0.5, 0.8};
  for (std::size_t j = 1; j < 4; ++j) {
    d.entries(0, j) = row0[j];
    d.entries(j, 0) = row0[j];
  }
  d.entries(1, 2) = d.entries(2, 1) = 0.3;
  d.entries(1, 3) = d.entries(3, 1) = 0.6;
  d.entries(2, 3) = d.entries(3, 2) = 0.7;
  const MaskPair m = build_masks(d);
  CHECK(m.far(0, 1) == 0.0);
  CHECK(m.far(0, 2) == 0.0);
  CHECK(m.far(0, 3) == 1.0);
  CHECK(m.near(0, 1) == 1.0);
  CHECK(m.near(0, 2) == 1.0);
  CHECK(m.near(0, 3) == 0.0);
}

TEST_CASE("build_masks row counts and complement over random scenes") {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.uniform_int(10);
    std::vector<double> upper(n * (n - 1) / 2);
    for (double& u : upper) u = rng.uniform(0.01, 1.4);
    const MaskPair m = build_masks(dm_from(n, upper));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(m.far(i, i) == 1.0);
      CHECK(m.near(i, i) == 1.0);
      std::size_t near_count = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        CHECK(m.far(i, j) + m.near(i, j) == 1.0);
        near_count += m.near(i, j) == 1.0 ? 1 : 0;
      }
      // Full-row median with a zero diagonal: distinct off-diagonal entries
      // leave (n-1)/2 of them near for odd n and n/2 - 1 for even n.
      if (n % 2 == 1) {
        CHECK(near_count == (n - 1) / 2);
      } else {
        CHECK(near_count == n / 2 - 1);
      }
    }
  }
  CHECK_THROWS_AS(build_masks(DistanceMatrix{}), std::invalid_argument);
}

TEST_CASE("masked attention matches the plain-double reference") {
  Rng rng(501);
  for (MaskMode mode : {MaskMode::kAdditive, MaskMode::kMultiplicative}) {
    const std::size_t n = 5, d = 8, heads = 2;
    const Mat x = randn(rng, n, d, 0.7);
    MhsaWeights w{Tensor::param(randn(rng, d, d, 0.4)), Tensor::param(randn(rng, d, d, 0.4)),
                  Tensor::param(randn(rng, d, d, 0.4)), Tensor::param(randn(rng, d, d, 0.4))};
    std::vector<double> upper(n * (n - 1) / 2);
    for (double& u : upper) u = rng.uniform(0.05, 1.2);
    const MaskPair masks = build_masks(dm_from(n, upper));

    nn::NnContext ctx;
    const Tensor out = masked_mhsa(Tensor::constant(x), masks.far, w, heads, mode, ctx);
    const Mat ref = reference_mhsa(x, w.wq.value(), w.wk.value(), w.wv.value(), w.wo.value(),
                                   heads, masks.far, mode);
    REQUIRE(out.rows() == n);
    REQUIRE(out.cols() == d);
    for (std::size_t i = 0; i < ref.a.size(); ++i)
      CHECK(out.value().a[i] == doctest::Approx(ref.a[i]).epsilon(1e-12));
  }
}

TEST_CASE("additive masking suppresses weight, multiplicative leaks it") {
  Rng rng(502);
  const std::size_t n = 4, d = 8, heads = 2;
  // Two tight clusters far apart: tokens 0,1 vs 2,3.
  DistanceMatrix dm = dm_from(n, {0.02, 0.9, 0.91, 0.9, 0.91, 0.02});
  const MaskPair masks = build_masks(dm);
  // Row 0 median over [0,.02,.9,.91] is .46: far = {2,3}.
  CHECK(masks.far(0, 2) == 1.0);
  CHECK(masks.far(0, 3) == 1.0);
  CHECK(masks.near(0, 1) == 1.0);

  const Mat x = randn(rng, n, d, 0.8);
  MhsaWeights w{Tensor::param(randn(rng, d, d, 0.5)), Tensor::param(randn(rng, d, d, 0.5)),
                Tensor::param(randn(rng, d, d, 0.5)), Tensor::param(randn(rng, d, d, 0.5))};
  nn::NnContext ctx;

  Mat rec;
  masked_mhsa(Tensor::constant(x), masks.far, w, heads, MaskMode::kAdditive, ctx, &rec);
  // Masked slots get essentially zero attention; each row still sums to one.
  CHECK(rec(0, 1) < 1e-12);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += rec(i, j);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
  }

  Mat leak;
  masked_mhsa(Tensor::constant(x), masks.far, w, heads, MaskMode::kMultiplicative, ctx, &leak);
  // The literal product form zeroes the logit, not the weight: the masked
  // slot keeps exp(0)-sized mass.
  CHECK(leak(0, 1) > 1e-4);
}

TEST_CASE("masked attention validates its inputs") {
  Rng rng(503);
  const Mat x = randn(rng, 3, 8);
  MhsaWeights w{Tensor::param(randn(rng, 8, 8)), Tensor::param(randn(rng, 8, 8)),
                Tensor::param(randn(rng, 8, 8)), Tensor::param(randn(rng, 8, 8))};
  nn::NnContext ctx;
  Mat good(3, 3, 1.0);
  CHECK_THROWS_AS(masked_mhsa(Tensor::constant(x), good, w, 3, MaskMode::kAdditive, ctx),
                  std::invalid_argument);
  Mat small(2, 2, 1.0);
  CHECK_THROWS_AS(masked_mhsa(Tensor::constant(x), small, w, 2, MaskMode::kAdditive, ctx),
                  std::invalid_argument);
  Mat broken_diag(3, 3, 1.0);
  broken_diag(1, 1) = 0.0;
  CHECK_THROWS_AS(
      masked_mhsa(Tensor::constant(x), broken_diag, w, 2, MaskMode::kAdditive, ctx),
      std::runtime_error);
}

TEST_CASE("zero output projection reduces attention to the residual") {
  Rng rng(504);
  const Mat x = randn(rng, 4, 6);
  MhsaWeights w{Tensor::param(randn(rng, 6, 6)), Tensor::param(randn(rng, 6, 6)),
                Tensor::param(randn(rng, 6, 6)), Tensor::param(Mat(6, 6))};
  nn::NnContext ctx;
  Mat mask(4, 4, 1.0);
  const Tensor out = masked_mhsa(Tensor::constant(x), mask, w, 2, MaskMode::kAdditive, ctx);
  CHECK(out.value().a == x.a);
}

TEST_CASE("gradcheck through one masked encoder block") {
  Rng rng(505);
  nn::ParamStore params;
  register_encoder_block(params, "blk", 6, 10, rng);
  const Mat x = randn(rng, 4, 6, 0.6);
  const MaskPair masks = build_masks(dm_from(4, {0.1, 0.8, 0.7, 0.9, 0.2, 0.15}));
  nn::NnContext ctx;
  // Random output weights keep every upstream gradient away from structural
  // zeros (a plain sum through unit layernorm gains has none).
  const Mat mix = randn(rng, 4, 6, 1.0);
  const nn::GradCheckReport rep = nn::grad_check(
      [&] {
        return nn::sum_all(nn::hadamard(
            encoder_block(Tensor::constant(x), masks.far, params, "blk", 2,
                          MaskMode::kAdditive, ctx),
            Tensor::constant(mix)));
      },
      params, 1e-5, 40, 7);
  INFO("worst ", rep.worst_param, " analytic ", rep.worst_analytic, " numeric ",
       rep.worst_numeric);
  CHECK(rep.max_rel_error < 1e-5);
}

TEST_CASE("token encoder registration, shapes and trace kinds") {
  Rng rng(506);
  nn::ParamStore params;
  TokenEncoderConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.hidden = 12;
  register_token_encoder(params, "tenc", 6, cfg, rng);
  // 2 layers x 2 blocks x 12 tensors each.
  CHECK(params.size() == 48);
  CHECK(params.has("tenc.l0.far.wq"));
  CHECK(params.has("tenc.l1.near.ffn.b2"));

  const Mat x = randn(rng, 5, 6, 0.5);
  std::vector<double> upper(10);
  for (double& u : upper) u = rng.uniform(0.05, 1.2);
  const MaskPair masks = build_masks(dm_from(5, upper));
  nn::NnContext ctx;

  AttentionTrace trace;
  const Tensor out = token_encoder(Tensor::constant(x), masks, params, "tenc", cfg, ctx,
                                   &trace);
  CHECK(out.rows() == 5);
  CHECK(out.cols() == 6);
  REQUIRE(trace.blocks.size() == 4);
  CHECK(trace.blocks[0].kind == BlockMaskKind::kFar);
  CHECK(trace.blocks[1].kind == BlockMaskKind::kNear);
  CHECK(trace.blocks[2].kind == BlockMaskKind::kFar);
  CHECK(trace.blocks[3].kind == BlockMaskKind::kNear);
  for (const BlockAttention& b : trace.blocks) {
    REQUIRE(b.weights.rows == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < 5; ++j) row += b.weights(i, j);
      CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  // Same stack without masks: identical shapes, full-attention trace kinds.
  TokenEncoderConfig plain = cfg;
  plain.use_masks = false;
  AttentionTrace full_trace;
  const Tensor out2 = token_encoder(Tensor::constant(x), masks, params, "tenc", plain, ctx,
                                    &full_trace);
  CHECK(out2.rows() == 5);
  REQUIRE(full_trace.blocks.size() == 4);
  for (const BlockAttention& b : full_trace.blocks) CHECK(b.kind == BlockMaskKind::kFull);

  // Determinism: rebuilding the same forward reproduces the values.
  const Tensor again = token_encoder(Tensor::constant(x), masks, params, "tenc", cfg, ctx);
  CHECK(again.value().a == out.value().a);
}

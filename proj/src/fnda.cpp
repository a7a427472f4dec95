#include "hoi/fnda.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hoi {

MaskPair build_masks(const DistanceMatrix& d) {
  const std::size_t n = d.n;
  if (n == 0 || d.entries.rows != n || d.entries.cols != n)
    throw std::invalid_argument("build_masks: bad distance matrix");
  MaskPair m{Mat(n, n), Mat(n, n)};
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = d.entries(i, j);
    std::sort(row.begin(), row.end());
    const double median =
        (n % 2 == 1) ? row[n / 2] : 0.5 * (row[n / 2 - 1] + row[n / 2]);
    for (std::size_t j = 0; j < n; ++j) {
      const bool far = (j != i) && d.entries(i, j) > median;
      m.far(i, j) = (j == i || far) ? 1.0 : 0.0;
      m.near(i, j) = (j == i || !far) ? 1.0 : 0.0;
    }
  }
  return m;
}

nn::Tensor masked_mhsa(const nn::Tensor& x, const Mat& mask, const MhsaWeights& w,
                       std::size_t heads, MaskMode mode, nn::NnContext& ctx,
                       Mat* recorded) {
  using namespace nn;
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (heads == 0 || d % heads != 0)
    throw std::invalid_argument("masked_mhsa: heads must divide the model width");
  if (mask.rows != n || mask.cols != n)
    throw std::invalid_argument("masked_mhsa: mask must be n x n");
  for (std::size_t i = 0; i < n; ++i)
    if (mask(i, i) != 1.0)
      throw std::runtime_error("masked_mhsa: mask diagonal must be all ones");

  const std::size_t dh = d / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  // Additive form: -1e9 on masked logits. Multiplicative form zeroes the
  // logits instead (kept literal, leaks exp(0) mass to masked slots).
  Mat additive(n, n);
  if (mode == MaskMode::kAdditive)
    for (std::size_t i = 0; i < additive.a.size(); ++i)
      additive.a[i] = mask.a[i] == 0.0 ? -1e9 : 0.0;

  Tensor q = matmul(x, w.wq);
  Tensor k = matmul(x, w.wk);
  Tensor v = matmul(x, w.wv);

  if (recorded) *recorded = Mat(n, n);
  std::vector<Tensor> head_ctx;
  head_ctx.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    Tensor qh = slice_cols(q, h * dh, (h + 1) * dh);
    Tensor kh = slice_cols(k, h * dh, (h + 1) * dh);
    Tensor vh = slice_cols(v, h * dh, (h + 1) * dh);
    Tensor logits = scale(matmul(qh, transpose(kh)), inv_sqrt);
    logits = mode == MaskMode::kAdditive ? add_mat(logits, additive)
                                         : mul_mat(logits, mask);
    Tensor weights = softmax_rows(logits);
    if (recorded) {
      const Mat& b = weights.value();
      for (std::size_t i = 0; i < b.a.size(); ++i)
        recorded->a[i] += b.a[i] / static_cast<double>(heads);
    }
    if (ctx.training && ctx.dropout > 0.0) {
      if (!ctx.rng) throw std::runtime_error("masked_mhsa: dropout requested without an rng");
      weights = dropout(weights, ctx.dropout, *ctx.rng);
    }
    head_ctx.push_back(matmul(weights, vh));
  }
  Tensor merged = head_ctx[0];
  for (std::size_t h = 1; h < heads; ++h) merged = concat_cols(merged, head_ctx[h]);
  Tensor out = matmul(merged, w.wo);
  if (ctx.training && ctx.dropout > 0.0) out = dropout(out, ctx.dropout, *ctx.rng);
  return add(x, out);
}

void register_encoder_block(nn::ParamStore& params, const std::string& prefix,
                            std::size_t width, std::size_t hidden, Rng& init) {
  using namespace nn;
  params.add(prefix + ".wq", xavier_init(init, width, width));
  params.add(prefix + ".wk", xavier_init(init, width, width));
  params.add(prefix + ".wv", xavier_init(init, width, width));
  params.add(prefix + ".wo", xavier_init(init, width, width));
  params.add(prefix + ".ln1.g", ones_row(width));
  params.add(prefix + ".ln1.b", zeros(1, width));
  params.add(prefix + ".ffn.w1", xavier_init(init, width, hidden));
  params.add(prefix + ".ffn.b1", zeros(1, hidden));
  params.add(prefix + ".ffn.w2", xavier_init(init, hidden, width));
  params.add(prefix + ".ffn.b2", zeros(1, width));
  params.add(prefix + ".ln2.g", ones_row(width));
  params.add(prefix + ".ln2.b", zeros(1, width));
}

nn::Tensor encoder_block(const nn::Tensor& x, const Mat& mask, const nn::ParamStore& params,
                         const std::string& prefix, std::size_t heads, MaskMode mode,
                         nn::NnContext& ctx, Mat* recorded) {
  using namespace nn;
  MhsaWeights w{params.get(prefix + ".wq"), params.get(prefix + ".wk"),
                params.get(prefix + ".wv"), params.get(prefix + ".wo")};
  Tensor a = masked_mhsa(x, mask, w, heads, mode, ctx, recorded);
  a = layer_norm_rows(a, params.get(prefix + ".ln1.g"), params.get(prefix + ".ln1.b"));
  Tensor f = ffn(a, params.get(prefix + ".ffn.w1"), params.get(prefix + ".ffn.b1"),
                 params.get(prefix + ".ffn.w2"), params.get(prefix + ".ffn.b2"), ctx);
  return layer_norm_rows(add(a, f), params.get(prefix + ".ln2.g"),
                         params.get(prefix + ".ln2.b"));
}

void register_token_encoder(nn::ParamStore& params, const std::string& prefix,
                            std::size_t d, const TokenEncoderConfig& cfg, Rng& init) {
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string base = prefix + ".l" + std::to_string(l);
    register_encoder_block(params, base + ".far", d, cfg.hidden, init);
    register_encoder_block(params, base + ".near", d, cfg.hidden, init);
  }
}

nn::Tensor token_encoder(const nn::Tensor& tokens, const MaskPair& masks,
                         const nn::ParamStore& params, const std::string& prefix,
                         const TokenEncoderConfig& cfg, nn::NnContext& ctx,
                         AttentionTrace* trace) {
  const std::size_t n = tokens.rows();
  Mat full(n, n, 1.0);
  nn::Tensor x = tokens;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string base = prefix + ".l" + std::to_string(l);
    Mat rec_far, rec_near;
    x = encoder_block(x, cfg.use_masks ? masks.far : full, params, base + ".far",
                      cfg.heads, cfg.mask_mode, ctx, trace ? &rec_far : nullptr);
    x = encoder_block(x, cfg.use_masks ? masks.near : full, params, base + ".near",
                      cfg.heads, cfg.mask_mode, ctx, trace ? &rec_near : nullptr);
    if (trace) {
      trace->blocks.push_back({cfg.use_masks ? BlockMaskKind::kFar : BlockMaskKind::kFull,
                               std::move(rec_far)});
      trace->blocks.push_back({cfg.use_masks ? BlockMaskKind::kNear : BlockMaskKind::kFull,
                               std::move(rec_near)});
    }
  }
  return x;
}

}  // namespace hoi

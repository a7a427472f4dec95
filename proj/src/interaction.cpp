#include "hoi/interaction.hpp"

#include <stdexcept>

namespace hoi {

std::vector<std::pair<std::size_t, std::size_t>> make_pairs(const std::vector<Token>& tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_human) continue;
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      if (j == i) continue;
      pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

nn::Tensor fuse_pairs(const nn::Tensor& tokens,
                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                      const std::vector<double>& global_feature,
                      const GlobalFusionWeights& w, nn::NnContext& ctx) {
  using namespace nn;
  if (pairs.empty()) throw std::invalid_argument("fuse_pairs: no pairs");
  if (global_feature.size() != tokens.cols())
    throw std::invalid_argument("fuse_pairs: global feature width mismatch");
  std::vector<std::size_t> lhs(pairs.size()), rhs(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    lhs[k] = pairs[k].first;
    rhs[k] = pairs[k].second;
  }
  Tensor joined = concat_cols(gather_rows(tokens, std::move(lhs)),
                              gather_rows(tokens, std::move(rhs)));
  Tensor g = Tensor::constant(Mat::from_row(global_feature));
  Tensor context = ffn(g, w.w1, w.b1, w.w2, w.b2, ctx);  // 1 x 2d
  return add_rowvec(joined, context);
}

void register_interaction_encoder(nn::ParamStore& params, const std::string& prefix,
                                  std::size_t width, const InteractionEncoderConfig& cfg,
                                  Rng& init) {
  for (std::size_t l = 0; l < cfg.layers; ++l)
    register_encoder_block(params, prefix + ".l" + std::to_string(l), width, cfg.hidden, init);
}

nn::Tensor interaction_encoder(const nn::Tensor& pair_tokens, const nn::ParamStore& params,
                               const std::string& prefix, const InteractionEncoderConfig& cfg,
                               nn::NnContext& ctx) {
  const std::size_t m = pair_tokens.rows();
  Mat full(m, m, 1.0);
  nn::Tensor x = pair_tokens;
  for (std::size_t l = 0; l < cfg.layers; ++l)
    x = encoder_block(x, full, params, prefix + ".l" + std::to_string(l), cfg.heads,
                      MaskMode::kAdditive, ctx);
  return x;
}

nn::Tensor predict_verbs(const nn::Tensor& pair_tokens, const VerbHeadWeights& w,
                         nn::NnContext& ctx) {
  return nn::sigmoid(nn::ffn(pair_tokens, w.w1, w.b1, w.w2, w.b2, ctx));
}

}  // namespace hoi

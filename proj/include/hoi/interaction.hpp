#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hoi/fnda.hpp"
#include "hoi/nn.hpp"
#include "hoi/scene.hpp"

namespace hoi {

/// Ordered candidate pairs (i, j): i ranges over human tokens, j over every
/// other token, humans included. Order is row-major in (i, j).
std::vector<std::pair<std::size_t, std::size_t>> make_pairs(const std::vector<Token>& tokens);

struct GlobalFusionWeights {
  nn::Tensor w1, b1, w2, b2;
};

/// Pair embeddings: [t_i ; t_j] plus a broadcast FFN projection of the scene
/// feature. Output is m x 2d.
nn::Tensor fuse_pairs(const nn::Tensor& tokens,
                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                      const std::vector<double>& global_feature,
                      const GlobalFusionWeights& w, nn::NnContext& ctx);

struct InteractionEncoderConfig {
  std::size_t layers = 3;
  std::size_t heads = 8;
  std::size_t hidden = 1024;
};

/// Unmasked self-attention stack over pair embeddings; same post-norm block
/// as the token encoder.
void register_interaction_encoder(nn::ParamStore& params, const std::string& prefix,
                                  std::size_t width, const InteractionEncoderConfig& cfg,
                                  Rng& init);
nn::Tensor interaction_encoder(const nn::Tensor& pair_tokens, const nn::ParamStore& params,
                               const std::string& prefix, const InteractionEncoderConfig& cfg,
                               nn::NnContext& ctx);

struct VerbHeadWeights {
  nn::Tensor w1, b1, w2, b2;
};

/// Per-pair verb probabilities: sigmoid over a two-layer MLP, m x C.
nn::Tensor predict_verbs(const nn::Tensor& pair_tokens, const VerbHeadWeights& w,
                         nn::NnContext& ctx);

}  // namespace hoi

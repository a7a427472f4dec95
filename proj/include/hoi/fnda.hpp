#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hoi/geometry.hpp"
#include "hoi/nn.hpp"

namespace hoi {

/// Far/near attention masks derived from one distance row at a time. An
/// off-diagonal entry is far when its distance strictly exceeds the row
/// median (computed over the full row, diagonal zero included; even rows use
/// the mean of the two central order statistics). Ties go to near. Both
/// diagonals are one, and off the diagonal the masks are exact complements.
struct MaskPair {
  Mat far;
  Mat near;
};

MaskPair build_masks(const DistanceMatrix& d);

/// How a mask enters the attention logits. Additive pushes masked logits to
/// -1e9 before the softmax, so masked weight is numerically zero.
/// Multiplicative zeroes the logits instead, which leaves masked entries a
/// uniform-looking residue of exp(0) in the softmax; it is kept as a faithful
/// variant, additive is the default.
enum class MaskMode { kAdditive, kMultiplicative };

enum class BlockMaskKind { kFar, kNear, kFull };

/// Head-averaged attention weights of one block, recorded before dropout.
struct BlockAttention {
  BlockMaskKind kind = BlockMaskKind::kFull;
  Mat weights;
};

struct AttentionTrace {
  std::vector<BlockAttention> blocks;
};

struct MhsaWeights {
  nn::Tensor wq, wk, wv, wo;
};

/// Multi-head self-attention with a residual connection folded in:
/// returns x + MHSA(x) under the given mask. Per-head logits are scaled by
/// 1/sqrt(d/heads). The mask diagonal must be all ones.
nn::Tensor masked_mhsa(const nn::Tensor& x, const Mat& mask, const MhsaWeights& w,
                       std::size_t heads, MaskMode mode, nn::NnContext& ctx,
                       Mat* recorded = nullptr);

/// Post-norm encoder block: masked MHSA with residual, layer norm, FFN with
/// residual, layer norm. Parameters live under "<prefix>." in the store.
void register_encoder_block(nn::ParamStore& params, const std::string& prefix,
                            std::size_t width, std::size_t hidden, Rng& init);
nn::Tensor encoder_block(const nn::Tensor& x, const Mat& mask, const nn::ParamStore& params,
                         const std::string& prefix, std::size_t heads, MaskMode mode,
                         nn::NnContext& ctx, Mat* recorded = nullptr);

struct TokenEncoderConfig {
  std::size_t layers = 3;
  std::size_t heads = 8;
  std::size_t hidden = 1024;
  MaskMode mask_mode = MaskMode::kAdditive;
  bool use_masks = true;  // false turns both blocks into plain full attention
};

/// Each layer applies a far-masked block then a near-masked block, so the two
/// distance regimes are attended in alternation. With use_masks off the same
/// stack runs with all-ones masks, which keeps parameter count and compute
/// identical for baseline comparisons.
void register_token_encoder(nn::ParamStore& params, const std::string& prefix,
                            std::size_t d, const TokenEncoderConfig& cfg, Rng& init);
nn::Tensor token_encoder(const nn::Tensor& tokens, const MaskPair& masks,
                         const nn::ParamStore& params, const std::string& prefix,
                         const TokenEncoderConfig& cfg, nn::NnContext& ctx,
                         AttentionTrace* trace = nullptr);

}  // namespace hoi

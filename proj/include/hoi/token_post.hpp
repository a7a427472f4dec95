#pragma once

#include <deque>
#include <map>
#include <string>

#include "hoi/nn.hpp"
#include "hoi/scene.hpp"

namespace hoi {

struct MemoryEntry {
  std::vector<double> feature;
  double score = 0.0;
};

/// Per-class FIFO of high-confidence token features. Tokens below min_score
/// are ignored; once a class buffer reaches capacity the oldest entry falls
/// out first.
class ClassMemory {
 public:
  explicit ClassMemory(std::size_t capacity = 64, double min_score = 0.5);

  void update(const Token& token);
  bool empty(int class_id) const;
  std::size_t size(int class_id) const;
  const std::deque<MemoryEntry>& buffer(int class_id) const;
  const std::map<int, std::deque<MemoryEntry>>& buffers() const { return buffers_; }
  std::size_t capacity() const { return capacity_; }
  double min_score() const { return min_score_; }
  void clear() { buffers_.clear(); }

  /// Up to `count` distinct entry indices, sampled without replacement; the
  /// whole buffer (in order) when it holds `count` entries or fewer.
  std::vector<std::size_t> sample_indices(int class_id, std::size_t count, Rng& rng) const;

  std::string to_json() const;
  static ClassMemory from_json(const std::string& text);

 private:
  std::size_t capacity_;
  double min_score_;
  std::map<int, std::deque<MemoryEntry>> buffers_;
};

struct IcdWeights {
  nn::Tensor wq, wk, wv;
};

/// Cross-attention from one token feature (a 1 x d row) to sampled
/// same-class memory features, added back onto the token as a residual.
/// Logits are scaled by 1/sqrt(d). The sampled features enter the graph as
/// constants so no gradient reaches the memory. An empty class buffer leaves
/// the token unchanged.
nn::Tensor icd_diversify(const nn::Tensor& token_row, int class_id, const ClassMemory& memory,
                         std::size_t sample_count, const IcdWeights& w, Rng& rng);

/// Applies icd_diversify to every row of an n x d token matrix.
nn::Tensor icd_apply_all(const nn::Tensor& tokens, const std::vector<Token>& meta,
                         const ClassMemory& memory, std::size_t sample_count,
                         const IcdWeights& w, Rng& rng);

struct SpatialFusionWeights {
  nn::Tensor w1, b1, w2, b2;
};

/// FFN over [token ; spatial descriptor] rows, back to token width.
nn::Tensor spatial_fuse(const nn::Tensor& tokens, const Mat& relations,
                        const SpatialFusionWeights& w, nn::NnContext& ctx);

}  // namespace hoi

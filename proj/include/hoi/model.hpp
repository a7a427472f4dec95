#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hoi/eval.hpp"
#include "hoi/fnda.hpp"
#include "hoi/interaction.hpp"
#include "hoi/objective.hpp"
#include "hoi/scene.hpp"
#include "hoi/token_post.hpp"

namespace hoi {

struct ModelConfig {
  std::size_t feature_dim = 256;
  std::size_t num_verbs = 117;
  std::size_t token_layers = 3;
  std::size_t interaction_layers = 3;
  std::size_t heads = 8;
  std::size_t hidden = 1024;
  double dropout = 0.1;
  MaskMode mask_mode = MaskMode::kAdditive;
  std::size_t icd_samples = 8;
  double focal_gamma = 2.0;
  double focal_balance = 0.25;
  // Component toggles. use_fnda_masks switches the token encoder between the
  // distance-masked blocks and plain full attention with identical shapes.
  bool use_token_encoder = true;
  bool use_interaction_encoder = true;
  bool use_da_loss = true;
  bool use_icd = true;
  bool use_spatial_fusion = true;
  bool use_fnda_masks = true;
  // Token filter.
  double filter_min_score = 0.2;
  std::size_t filter_min_keep = 3;
  std::size_t filter_max_keep = 15;
};

/// Hash of every architecture-relevant field; stored in checkpoints so a file
/// cannot be loaded into a differently shaped model.
std::uint64_t config_hash(const ModelConfig& cfg);

struct ScenePrediction {
  std::vector<Token> tokens;  // after filtering; all indices below refer to these
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  nn::Tensor verb_probs;      // m x C; undefined when there are no pairs
  Mat pair_distances;         // m x 1
  DistanceMatrix distances;   // n x n over filtered tokens
};

struct SceneLossTerm {
  nn::Tensor weighted_focal;  // 1 x 1 sum of w * focal over pairs and verbs
  std::size_t positives = 0;
  bool has_pairs = false;
};

class Model {
 public:
  /// Registers every parameter (toggled-off stages included, so arms that
  /// differ only in toggles share identical initialization) and initializes
  /// them from init_seed.
  Model(const ModelConfig& cfg, std::uint64_t init_seed = 1);

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  LossConfig loss_config() const;

  /// Full recognition pipeline on one scene: filter, diversify against the
  /// class memory, fuse spatial layout, encode tokens under far/near masks,
  /// form pairs with global context, encode interactions, score verbs.
  ScenePrediction forward(const Scene& scene, const ClassMemory& memory,
                          nn::NnContext& ctx, AttentionTrace* trace = nullptr) const;

  /// Distance-weighted focal sum for one scene (not yet normalized).
  SceneLossTerm scene_loss(const ScenePrediction& pred, const Scene& scene) const;

  /// Detections for every pair and every feasible verb of the pair's object
  /// class, scored with the lambda-powered detector confidences.
  std::vector<Detection> infer(const Scene& scene, const ScenePrediction& pred,
                               const FeasibilityTable& feasibility, double lambda) const;

  /// Attention records of one traced forward, suitable for distance
  /// statistics. Weights are averaged over heads and over all blocks of each
  /// reported kind; far/near blocks additionally average into kCombined. With
  /// use_fnda_masks off the records carry kBaselineMhsa instead.
  std::vector<AttentionRecord> attention_records(const Scene& scene,
                                                 const ScenePrediction& pred,
                                                 const AttentionTrace& trace) const;

 private:
  ModelConfig cfg_;
  nn::ParamStore params_;
};

void save_checkpoint(const std::string& path, const Model& model, const ClassMemory& memory);
/// Loads parameters and memory saved for exactly this configuration; throws
/// on a hash or shape mismatch.
void load_checkpoint(const std::string& path, Model& model, ClassMemory& memory);

}  // namespace hoi

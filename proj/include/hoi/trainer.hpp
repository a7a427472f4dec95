#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hoi/model.hpp"

namespace hoi {

struct TrainConfig {
  ModelConfig model;
  double lr = 2e-4;
  double weight_decay = 1e-4;
  std::size_t epochs = 20;
  std::size_t lr_drop_epoch = 10;  // epochs after this one run at lr * lr_drop_factor
  double lr_drop_factor = 0.1;
  std::size_t batch_size = 16;
  double lambda_train = 1.0;
  double lambda_infer = 2.8;
  std::uint64_t seed = 1;
  std::size_t memory_capacity = 64;
  double memory_min_score = 0.5;
  std::size_t rare_threshold = 10;
};

/// Full round trip through a flat JSON object. Loading rejects unknown keys,
/// so a typo in a config file fails loudly instead of silently using a
/// default.
std::string train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const std::string& text);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::size_t steps = 0;
  std::size_t skipped_batches = 0;  // batches whose scenes produced no pairs
  double lr = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Optimization loop over the training scenes; model and memory are updated
/// in place. Scene order is reshuffled every epoch from a dedicated stream of
/// cfg.seed, each batch normalizes the summed focal terms by the number of
/// positive pairs in the batch, and a non-finite loss aborts immediately.
std::vector<EpochStats> train_model(Model& model, ClassMemory& memory,
                                    const std::vector<Scene>& train_scenes,
                                    const TrainConfig& cfg,
                                    const EpochCallback& on_epoch = nullptr);

/// Inference over a scene list. The diversification sampler is reseeded from
/// each scene id, so detections do not depend on the order scenes arrive in.
std::vector<Detection> run_inference(const Model& model, const ClassMemory& memory,
                                     const std::vector<Scene>& scenes,
                                     const FeasibilityTable& feasibility, double lambda);

/// Traced variant of run_inference: per-pair attention records for every
/// scene, for distance statistics.
std::vector<AttentionRecord> collect_attention_records(const Model& model,
                                                       const ClassMemory& memory,
                                                       const std::vector<Scene>& scenes);

}  // namespace hoi

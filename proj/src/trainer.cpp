#include "hoi/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace hoi {

namespace {

nlohmann::json config_to_json_obj(const TrainConfig& c) {
  nlohmann::json j;
  j["feature_dim"] = c.model.feature_dim;
  j["num_verbs"] = c.model.num_verbs;
  j["token_layers"] = c.model.token_layers;
  j["interaction_layers"] = c.model.interaction_layers;
  j["heads"] = c.model.heads;
  j["hidden"] = c.model.hidden;
  j["dropout"] = c.model.dropout;
  j["mask_mode"] =
      c.model.mask_mode == MaskMode::kAdditive ? "additive" : "multiplicative";
  j["icd_samples"] = c.model.icd_samples;
  j["focal_gamma"] = c.model.focal_gamma;
  j["focal_balance"] = c.model.focal_balance;
  j["use_token_encoder"] = c.model.use_token_encoder;
  j["use_interaction_encoder"] = c.model.use_interaction_encoder;
  j["use_da_loss"] = c.model.use_da_loss;
  j["use_icd"] = c.model.use_icd;
  j["use_spatial_fusion"] = c.model.use_spatial_fusion;
  j["use_fnda_masks"] = c.model.use_fnda_masks;
  j["filter_min_score"] = c.model.filter_min_score;
  j["filter_min_keep"] = c.model.filter_min_keep;
  j["filter_max_keep"] = c.model.filter_max_keep;
  j["lr"] = c.lr;
  j["weight_decay"] = c.weight_decay;
  j["epochs"] = c.epochs;
  j["lr_drop_epoch"] = c.lr_drop_epoch;
  j["lr_drop_factor"] = c.lr_drop_factor;
  j["batch_size"] = c.batch_size;
  j["lambda_train"] = c.lambda_train;
  j["lambda_infer"] = c.lambda_infer;
  j["seed"] = c.seed;
  j["memory_capacity"] = c.memory_capacity;
  j["memory_min_score"] = c.memory_min_score;
  j["rare_threshold"] = c.rare_threshold;
  return j;
}

}  // namespace

std::string train_config_to_json(const TrainConfig& cfg) {
  return config_to_json_obj(cfg).dump(2) + "\n";
}

TrainConfig train_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: expected a JSON object");

  TrainConfig c;
  const nlohmann::json known = config_to_json_obj(c);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.contains(key)) throw std::runtime_error("config: unknown key \"" + key + "\"");
  }

  auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("feature_dim", c.model.feature_dim);
  get("num_verbs", c.model.num_verbs);
  get("token_layers", c.model.token_layers);
  get("interaction_layers", c.model.interaction_layers);
  get("heads", c.model.heads);
  get("hidden", c.model.hidden);
  get("dropout", c.model.dropout);
  if (j.contains("mask_mode")) {
    const std::string mode = j.at("mask_mode").get<std::string>();
    if (mode == "additive") {
      c.model.mask_mode = MaskMode::kAdditive;
    } else if (mode == "multiplicative") {
      c.model.mask_mode = MaskMode::kMultiplicative;
    } else {
      throw std::runtime_error("config: mask_mode must be additive or multiplicative");
    }
  }
  get("icd_samples", c.model.icd_samples);
  get("focal_gamma", c.model.focal_gamma);
  get("focal_balance", c.model.focal_balance);
  get("use_token_encoder", c.model.use_token_encoder);
  get("use_interaction_encoder", c.model.use_interaction_encoder);
  get("use_da_loss", c.model.use_da_loss);
  get("use_icd", c.model.use_icd);
  get("use_spatial_fusion", c.model.use_spatial_fusion);
  get("use_fnda_masks", c.model.use_fnda_masks);
  get("filter_min_score", c.model.filter_min_score);
  get("filter_min_keep", c.model.filter_min_keep);
  get("filter_max_keep", c.model.filter_max_keep);
  get("lr", c.lr);
  get("weight_decay", c.weight_decay);
  get("epochs", c.epochs);
  get("lr_drop_epoch", c.lr_drop_epoch);
  get("lr_drop_factor", c.lr_drop_factor);
  get("batch_size", c.batch_size);
  get("lambda_train", c.lambda_train);
  get("lambda_infer", c.lambda_infer);
  get("seed", c.seed);
  get("memory_capacity", c.memory_capacity);
  get("memory_min_score", c.memory_min_score);
  get("rare_threshold", c.rare_threshold);
  return c;
}

std::vector<EpochStats> train_model(Model& model, ClassMemory& memory,
                                    const std::vector<Scene>& train_scenes,
                                    const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
  if (train_scenes.empty()) throw std::invalid_argument("train: no training scenes");

  Rng rng(mix_seed(cfg.seed, fnv1a64("train")));
  nn::AdamW opt({cfg.lr, cfg.weight_decay});
  std::vector<std::size_t> order(train_scenes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<EpochStats> log;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr_now =
        epoch > cfg.lr_drop_epoch ? cfg.lr * cfg.lr_drop_factor : cfg.lr;
    opt.set_lr(lr_now);
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t steps = 0, skipped = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::vector<nn::Tensor> terms;
      std::size_t positives = 0;
      for (std::size_t k = start; k < stop; ++k) {
        const Scene& scene = train_scenes[order[k]];
        nn::NnContext ctx{true, model.config().dropout, &rng};
        ScenePrediction pred = model.forward(scene, memory, ctx);
        SceneLossTerm term = model.scene_loss(pred, scene);
        if (term.has_pairs) {
          terms.push_back(term.weighted_focal);
          positives += term.positives;
        }
        // The memory sees each scene's surviving tokens once per visit;
        // low-confidence tokens are rejected inside update.
        if (model.config().use_icd)
          for (const Token& t : pred.tokens) memory.update(t);
      }
      if (terms.empty()) {
        ++skipped;
        continue;
      }

      nn::Tensor total = terms[0];
      for (std::size_t k = 1; k < terms.size(); ++k) total = nn::add(total, terms[k]);
      total = nn::scale(total, 1.0 / static_cast<double>(std::max<std::size_t>(1, positives)));
      const double batch_loss = total.scalar();
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train: non-finite loss in epoch " + std::to_string(epoch));

      model.params().zero_grad();
      nn::backward(total, model.params());
      opt.step(model.params());
      loss_sum += batch_loss;
      ++steps;
    }

    EpochStats st;
    st.epoch = epoch;
    st.mean_loss = steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0;
    st.steps = steps;
    st.skipped_batches = skipped;
    st.lr = lr_now;
    log.push_back(st);
    if (on_epoch) on_epoch(st);
  }
  return log;
}

std::vector<Detection> run_inference(const Model& model, const ClassMemory& memory,
                                     const std::vector<Scene>& scenes,
                                     const FeasibilityTable& feasibility, double lambda) {
  std::vector<Detection> out;
  for (const Scene& scene : scenes) {
    Rng rng(fnv1a64(scene.id));
    nn::NnContext ctx{false, 0.0, &rng};
    ScenePrediction pred = model.forward(scene, memory, ctx);
    std::vector<Detection> dets = model.infer(scene, pred, feasibility, lambda);
    out.insert(out.end(), dets.begin(), dets.end());
  }
  return out;
}

std::vector<AttentionRecord> collect_attention_records(const Model& model,
                                                       const ClassMemory& memory,
                                                       const std::vector<Scene>& scenes) {
  std::vector<AttentionRecord> out;
  for (const Scene& scene : scenes) {
    Rng rng(fnv1a64(scene.id));
    nn::NnContext ctx{false, 0.0, &rng};
    AttentionTrace trace;
    ScenePrediction pred = model.forward(scene, memory, ctx, &trace);
    std::vector<AttentionRecord> recs = model.attention_records(scene, pred, trace);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

}  // namespace hoi

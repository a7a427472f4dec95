#include "hoi/model.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace hoi {

namespace {

void validate_model_config(const ModelConfig& cfg) {
  if (cfg.feature_dim < 2) throw std::invalid_argument("model: feature_dim must be at least 2");
  if (cfg.num_verbs < 1) throw std::invalid_argument("model: num_verbs must be positive");
  if (cfg.heads == 0 || cfg.feature_dim % cfg.heads != 0)
    throw std::invalid_argument("model: heads must divide feature_dim");
  if (cfg.hidden < 1) throw std::invalid_argument("model: hidden must be positive");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0))
    throw std::invalid_argument("model: dropout must lie in [0,1)");
  if (cfg.focal_gamma < 0.0) throw std::invalid_argument("model: focal_gamma must be non-negative");
  if (!(cfg.focal_balance >= 0.0 && cfg.focal_balance <= 1.0))
    throw std::invalid_argument("model: focal_balance must lie in [0,1]");
  if (cfg.filter_min_keep > cfg.filter_max_keep)
    throw std::invalid_argument("model: filter_min_keep exceeds filter_max_keep");
}

std::string fmt_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::uint64_t config_hash(const ModelConfig& c) {
  std::string s;
  s += "d=" + std::to_string(c.feature_dim);
  s += ";C=" + std::to_string(c.num_verbs);
  s += ";tl=" + std::to_string(c.token_layers);
  s += ";il=" + std::to_string(c.interaction_layers);
  s += ";h=" + std::to_string(c.heads);
  s += ";ff=" + std::to_string(c.hidden);
  s += ";do=" + fmt_double(c.dropout);
  s += ";mm=" + std::to_string(static_cast<int>(c.mask_mode));
  s += ";icd=" + std::to_string(c.icd_samples);
  s += ";fg=" + fmt_double(c.focal_gamma);
  s += ";fb=" + fmt_double(c.focal_balance);
  s += ";te=" + std::to_string(c.use_token_encoder);
  s += ";ie=" + std::to_string(c.use_interaction_encoder);
  s += ";da=" + std::to_string(c.use_da_loss);
  s += ";ic=" + std::to_string(c.use_icd);
  s += ";sf=" + std::to_string(c.use_spatial_fusion);
  s += ";fm=" + std::to_string(c.use_fnda_masks);
  s += ";fs=" + fmt_double(c.filter_min_score);
  s += ";fk=" + std::to_string(c.filter_min_keep);
  s += ";fx=" + std::to_string(c.filter_max_keep);
  return fnv1a64(s);
}

Model::Model(const ModelConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
  validate_model_config(cfg_);
  using namespace nn;
  Rng init(mix_seed(init_seed, fnv1a64("init")));
  const std::size_t d = cfg_.feature_dim;

  // Every stage registers its parameters regardless of the toggles, in a
  // fixed order, so configurations that differ only in toggles start from
  // identical weights.
  params_.add("icd.wq", xavier_init(init, d, d));
  params_.add("icd.wk", xavier_init(init, d, d));
  params_.add("icd.wv", xavier_init(init, d, d));

  params_.add("sf.w1", xavier_init(init, d + kSpatialRelationDim, cfg_.hidden));
  params_.add("sf.b1", zeros(1, cfg_.hidden));
  params_.add("sf.w2", xavier_init(init, cfg_.hidden, d));
  params_.add("sf.b2", zeros(1, d));

  TokenEncoderConfig tc{cfg_.token_layers, cfg_.heads, cfg_.hidden, cfg_.mask_mode,
                        cfg_.use_fnda_masks};
  register_token_encoder(params_, "tenc", d, tc, init);

  params_.add("gf.w1", xavier_init(init, d, cfg_.hidden));
  params_.add("gf.b1", zeros(1, cfg_.hidden));
  params_.add("gf.w2", xavier_init(init, cfg_.hidden, 2 * d));
  params_.add("gf.b2", zeros(1, 2 * d));

  InteractionEncoderConfig ic{cfg_.interaction_layers, cfg_.heads, cfg_.hidden};
  register_interaction_encoder(params_, "ienc", 2 * d, ic, init);

  params_.add("head.w1", xavier_init(init, 2 * d, cfg_.hidden));
  params_.add("head.b1", zeros(1, cfg_.hidden));
  params_.add("head.w2", xavier_init(init, cfg_.hidden, cfg_.num_verbs));
  params_.add("head.b2", zeros(1, cfg_.num_verbs));

  params_.add("da.alpha", Mat(1, 1, 1.0));
  params_.add("da.beta", Mat(1, 1, 0.0));
}

LossConfig Model::loss_config() const {
  return {cfg_.focal_gamma, cfg_.focal_balance, cfg_.use_da_loss};
}

ScenePrediction Model::forward(const Scene& scene, const ClassMemory& memory,
                               nn::NnContext& ctx, AttentionTrace* trace) const {
  using namespace nn;
  ScenePrediction pred;
  pred.tokens = filter_tokens(scene.tokens, cfg_.filter_min_score, cfg_.filter_min_keep,
                              cfg_.filter_max_keep);
  const std::size_t n = pred.tokens.size();
  if (n == 0) return pred;

  std::vector<Box> boxes(n);
  Mat features(n, cfg_.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const Token& t = pred.tokens[i];
    if (t.feature.size() != cfg_.feature_dim)
      throw std::invalid_argument("forward: token feature width " +
                                  std::to_string(t.feature.size()) + ", model expects " +
                                  std::to_string(cfg_.feature_dim));
    boxes[i] = t.box;
    for (std::size_t j = 0; j < cfg_.feature_dim; ++j) features(i, j) = t.feature[j];
  }
  pred.distances = pairwise_distances(boxes);

  Tensor t = Tensor::constant(std::move(features));

  if (cfg_.use_icd && cfg_.icd_samples > 0) {
    if (!ctx.rng) throw std::runtime_error("forward: memory sampling requires an rng");
    IcdWeights icd{params_.get("icd.wq"), params_.get("icd.wk"), params_.get("icd.wv")};
    t = icd_apply_all(t, pred.tokens, memory, cfg_.icd_samples, icd, *ctx.rng);
  }

  if (cfg_.use_spatial_fusion) {
    SpatialFusionWeights sf{params_.get("sf.w1"), params_.get("sf.b1"),
                            params_.get("sf.w2"), params_.get("sf.b2")};
    t = spatial_fuse(t, spatial_relation_all(boxes), sf, ctx);
  }

  if (cfg_.use_token_encoder && cfg_.token_layers > 0) {
    const MaskPair masks = build_masks(pred.distances);
    TokenEncoderConfig tc{cfg_.token_layers, cfg_.heads, cfg_.hidden, cfg_.mask_mode,
                          cfg_.use_fnda_masks};
    t = token_encoder(t, masks, params_, "tenc", tc, ctx, trace);
  }

  pred.pairs = make_pairs(pred.tokens);
  if (pred.pairs.empty()) return pred;

  pred.pair_distances = Mat(pred.pairs.size(), 1);
  for (std::size_t k = 0; k < pred.pairs.size(); ++k)
    pred.pair_distances(k, 0) = pred.distances.entries(pred.pairs[k].first,
                                                       pred.pairs[k].second);

  GlobalFusionWeights gf{params_.get("gf.w1"), params_.get("gf.b1"),
                         params_.get("gf.w2"), params_.get("gf.b2")};
  Tensor h = fuse_pairs(t, pred.pairs, scene.global_feature, gf, ctx);

  if (cfg_.use_interaction_encoder && cfg_.interaction_layers > 0) {
    InteractionEncoderConfig ic{cfg_.interaction_layers, cfg_.heads, cfg_.hidden};
    h = interaction_encoder(h, params_, "ienc", ic, ctx);
  }

  VerbHeadWeights vh{params_.get("head.w1"), params_.get("head.b1"),
                     params_.get("head.w2"), params_.get("head.b2")};
  pred.verb_probs = predict_verbs(h, vh, ctx);
  return pred;
}

SceneLossTerm Model::scene_loss(const ScenePrediction& pred, const Scene& scene) const {
  using namespace nn;
  SceneLossTerm term;
  if (pred.pairs.empty() || !pred.verb_probs.defined()) return term;
  const Mat targets =
      match_pairs_to_gt(pred.pairs, pred.tokens, scene.ground_truth, cfg_.num_verbs, 0.5);
  term.positives = count_positive_pairs(targets);
  Tensor focal = pair_focal_sums(pred.verb_probs, targets, loss_config());
  Tensor w = cfg_.use_da_loss
                 ? da_weight_column(pred.pair_distances, params_.get("da.alpha"),
                                    params_.get("da.beta"))
                 : Tensor::constant(Mat(pred.pairs.size(), 1, 1.0));
  term.weighted_focal = sum_all(hadamard(w, focal));
  term.has_pairs = true;
  return term;
}

std::vector<Detection> Model::infer(const Scene& scene, const ScenePrediction& pred,
                                    const FeasibilityTable& feasibility, double lambda) const {
  std::vector<Detection> out;
  if (!pred.verb_probs.defined()) return out;
  const Mat& probs = pred.verb_probs.value();
  for (std::size_t k = 0; k < pred.pairs.size(); ++k) {
    const Token& human = pred.tokens[pred.pairs[k].first];
    const Token& object = pred.tokens[pred.pairs[k].second];
    for (int verb : feasible_verbs(feasibility, object.class_id)) {
      if (verb < 0 || static_cast<std::size_t>(verb) >= cfg_.num_verbs)
        throw std::runtime_error("infer: feasible verb " + std::to_string(verb) +
                                 " outside the model's verb range");
      out.push_back({scene.id, human.box, object.box, object.class_id, verb,
                     final_score(human.score, object.score,
                                 probs(k, static_cast<std::size_t>(verb)), lambda)});
    }
  }
  return out;
}

std::vector<AttentionRecord> Model::attention_records(const Scene& scene,
                                                      const ScenePrediction& pred,
                                                      const AttentionTrace& trace) const {
  std::vector<AttentionRecord> out;
  if (trace.blocks.empty() || pred.tokens.empty()) return out;
  const std::size_t n = pred.tokens.size();

  Mat far_sum(n, n), near_sum(n, n), all_sum(n, n);
  std::size_t far_blocks = 0, near_blocks = 0, full_blocks = 0;
  for (const BlockAttention& b : trace.blocks) {
    if (b.weights.rows != n || b.weights.cols != n)
      throw std::runtime_error("attention_records: trace shape mismatch");
    for (std::size_t i = 0; i < n * n; ++i) all_sum.a[i] += b.weights.a[i];
    switch (b.kind) {
      case BlockMaskKind::kFar:
        for (std::size_t i = 0; i < n * n; ++i) far_sum.a[i] += b.weights.a[i];
        ++far_blocks;
        break;
      case BlockMaskKind::kNear:
        for (std::size_t i = 0; i < n * n; ++i) near_sum.a[i] += b.weights.a[i];
        ++near_blocks;
        break;
      case BlockMaskKind::kFull:
        ++full_blocks;
        break;
    }
  }
  const std::size_t total_blocks = trace.blocks.size();

  // Pairs matched to ground truth mark (human, partner) slots as interactive.
  std::map<std::pair<std::size_t, std::size_t>, bool> interactive;
  if (!pred.pairs.empty()) {
    std::vector<bool> matched;
    match_pairs_to_gt(pred.pairs, pred.tokens, scene.ground_truth, cfg_.num_verbs, 0.5,
                      &matched);
    for (std::size_t k = 0; k < pred.pairs.size(); ++k)
      interactive[pred.pairs[k]] = matched[k];
  }

  auto push = [&](AttentionKind kind, const Mat& sum, std::size_t blocks) {
    if (blocks == 0) return;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        AttentionRecord r;
        r.scene_id = scene.id;
        r.i = i;
        r.j = j;
        r.distance = pred.distances.entries(i, j);
        r.weight = sum(i, j) / static_cast<double>(blocks);
        r.kind = kind;
        auto it = interactive.find({i, j});
        r.interactive = it != interactive.end() && it->second;
        out.push_back(std::move(r));
      }
    }
  };

  if (full_blocks == total_blocks) {
    push(AttentionKind::kBaselineMhsa, all_sum, total_blocks);
  } else {
    push(AttentionKind::kFarBlock, far_sum, far_blocks);
    push(AttentionKind::kNearBlock, near_sum, near_blocks);
    push(AttentionKind::kCombined, all_sum, total_blocks);
  }
  return out;
}

void save_checkpoint(const std::string& path, const Model& model, const ClassMemory& memory) {
  nlohmann::json j;
  j["format"] = "hoi-checkpoint-v1";
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(model.config())));
  j["config_hash"] = hash;
  j["params"] = nlohmann::json::parse(nn::params_to_json(model.params()));
  j["memory"] = nlohmann::json::parse(memory.to_json());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void load_checkpoint(const std::string& path, Model& model, ClassMemory& memory) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (j.value("format", "") != "hoi-checkpoint-v1")
    throw std::runtime_error(path + ": unrecognized checkpoint format");
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(model.config())));
  if (j.at("config_hash").get<std::string>() != hash)
    throw std::runtime_error(path + ": checkpoint was written for a different configuration");
  nn::params_from_json(j.at("params").dump(), model.params());
  memory = ClassMemory::from_json(j.at("memory").dump());
}

}  // namespace hoi

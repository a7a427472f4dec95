// Command-line front end: dataset generation, training, evaluation, component
// ablations, and inspection dumps (masks, attention statistics).
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hoi/eval.hpp"
#include "hoi/fnda.hpp"
#include "hoi/model.hpp"
#include "hoi/scene.hpp"
#include "hoi/trainer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hoi;

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Per-field command-line overrides; only explicitly given flags replace the
// values loaded from --config (or the defaults).
struct TrainOverrides {
  std::optional<std::size_t> feature_dim, num_verbs, token_layers, interaction_layers;
  std::optional<std::size_t> heads, hidden, icd_samples;
  std::optional<double> dropout, focal_gamma, focal_balance;
  std::optional<std::string> mask_mode;
  std::optional<bool> use_token_encoder, use_interaction_encoder, use_da_loss;
  std::optional<bool> use_icd, use_spatial_fusion, use_fnda_masks;
  std::optional<double> filter_min_score;
  std::optional<std::size_t> filter_min_keep, filter_max_keep;
  std::optional<double> lr, weight_decay, lr_drop_factor, lambda_train, lambda_infer;
  std::optional<std::size_t> epochs, lr_drop_epoch, batch_size, memory_capacity;
  std::optional<double> memory_min_score;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> rare_threshold;
};

void add_train_flags(CLI::App* cmd, TrainOverrides& o) {
  cmd->add_option("--feature-dim", o.feature_dim, "token feature width");
  cmd->add_option("--num-verbs", o.num_verbs, "verb vocabulary size");
  cmd->add_option("--token-layers", o.token_layers, "token encoder depth");
  cmd->add_option("--interaction-layers", o.interaction_layers, "interaction encoder depth");
  cmd->add_option("--heads", o.heads, "attention heads");
  cmd->add_option("--hidden", o.hidden, "feed-forward hidden width");
  cmd->add_option("--dropout", o.dropout, "dropout probability");
  cmd->add_option("--mask-mode", o.mask_mode, "additive or multiplicative");
  cmd->add_option("--icd-samples", o.icd_samples, "memory features sampled per token");
  cmd->add_option("--focal-gamma", o.focal_gamma, "focal exponent");
  cmd->add_option("--focal-balance", o.focal_balance, "positive class balance weight");
  cmd->add_option("--use-token-encoder", o.use_token_encoder, "enable the token encoder");
  cmd->add_option("--use-interaction-encoder", o.use_interaction_encoder,
                  "enable the interaction encoder");
  cmd->add_option("--use-da-loss", o.use_da_loss, "enable distance-aware loss weights");
  cmd->add_option("--use-icd", o.use_icd, "enable memory diversification");
  cmd->add_option("--use-spatial-fusion", o.use_spatial_fusion, "enable spatial fusion");
  cmd->add_option("--use-fnda-masks", o.use_fnda_masks,
                  "far/near masks in the token encoder (off = plain attention)");
  cmd->add_option("--filter-min-score", o.filter_min_score, "token filter threshold");
  cmd->add_option("--filter-min-keep", o.filter_min_keep, "minimum tokens kept per group");
  cmd->add_option("--filter-max-keep", o.filter_max_keep, "maximum tokens kept per group");
  cmd->add_option("--lr", o.lr, "learning rate");
  cmd->add_option("--weight-decay", o.weight_decay, "decoupled weight decay");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--lr-drop-epoch", o.lr_drop_epoch, "epochs after this run at reduced lr");
  cmd->add_option("--lr-drop-factor", o.lr_drop_factor, "lr multiplier after the drop");
  cmd->add_option("--batch-size", o.batch_size, "scenes per optimizer step");
  cmd->add_option("--lambda-train", o.lambda_train, "score exponent during training eval");
  cmd->add_option("--lambda-infer", o.lambda_infer, "score exponent at inference");
  cmd->add_option("--seed", o.seed, "training and initialization seed");
  cmd->add_option("--memory-capacity", o.memory_capacity, "per-class memory capacity");
  cmd->add_option("--memory-min-score", o.memory_min_score, "memory admission threshold");
  cmd->add_option("--rare-threshold", o.rare_threshold,
                  "training instances below which a class is rare");
}

void apply_overrides(const TrainOverrides& o, TrainConfig& c) {
  auto put = [](const auto& src, auto& dst) {
    if (src) dst = *src;
  };
  put(o.feature_dim, c.model.feature_dim);
  put(o.num_verbs, c.model.num_verbs);
  put(o.token_layers, c.model.token_layers);
  put(o.interaction_layers, c.model.interaction_layers);
  put(o.heads, c.model.heads);
  put(o.hidden, c.model.hidden);
  put(o.dropout, c.model.dropout);
  if (o.mask_mode) {
    if (*o.mask_mode == "additive") {
      c.model.mask_mode = MaskMode::kAdditive;
    } else if (*o.mask_mode == "multiplicative") {
      c.model.mask_mode = MaskMode::kMultiplicative;
    } else {
      throw std::runtime_error("--mask-mode must be additive or multiplicative");
    }
  }
  put(o.icd_samples, c.model.icd_samples);
  put(o.focal_gamma, c.model.focal_gamma);
  put(o.focal_balance, c.model.focal_balance);
  put(o.use_token_encoder, c.model.use_token_encoder);
  put(o.use_interaction_encoder, c.model.use_interaction_encoder);
  put(o.use_da_loss, c.model.use_da_loss);
  put(o.use_icd, c.model.use_icd);
  put(o.use_spatial_fusion, c.model.use_spatial_fusion);
  put(o.use_fnda_masks, c.model.use_fnda_masks);
  put(o.filter_min_score, c.model.filter_min_score);
  put(o.filter_min_keep, c.model.filter_min_keep);
  put(o.filter_max_keep, c.model.filter_max_keep);
  put(o.lr, c.lr);
  put(o.weight_decay, c.weight_decay);
  put(o.epochs, c.epochs);
  put(o.lr_drop_epoch, c.lr_drop_epoch);
  put(o.lr_drop_factor, c.lr_drop_factor);
  put(o.batch_size, c.batch_size);
  put(o.lambda_train, c.lambda_train);
  put(o.lambda_infer, c.lambda_infer);
  put(o.seed, c.seed);
  put(o.memory_capacity, c.memory_capacity);
  put(o.memory_min_score, c.memory_min_score);
  put(o.rare_threshold, c.rare_threshold);
}

TrainConfig resolve_config(const std::string& config_path, const TrainOverrides& o) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = train_config_from_json(read_file(config_path));
  apply_overrides(o, cfg);
  return cfg;
}

struct Metrics {
  EvalReport report_default;
  EvalReport report_known;
  double map_distant = 0.0;
  double distant_threshold = 0.5;
  double lambda = 0.0;
  std::size_t detections = 0;
  std::size_t gt_instances = 0;
};

Metrics compute_metrics(const std::vector<Detection>& dets, const std::vector<Scene>& scenes,
                        const TrainCounts& counts, std::size_t rare_threshold, double lambda,
                        double distant_threshold) {
  Metrics m;
  const std::vector<GtInstance> gt = expand_ground_truth(scenes);
  m.report_default = evaluate(dets, gt, EvalSetting::kDefault, &counts, rare_threshold);
  m.report_known = evaluate(dets, gt, EvalSetting::kKnownObject, &counts, rare_threshold);
  m.map_distant = map_above_distance(dets, gt, distant_threshold);
  m.distant_threshold = distant_threshold;
  m.lambda = lambda;
  m.detections = dets.size();
  m.gt_instances = gt.size();
  return m;
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["map_full"] = quantize9(r.map_full);
  j["map_rare"] = quantize9(r.map_rare);
  j["map_nonrare"] = quantize9(r.map_nonrare);
  j["rare_classes"] = r.rare_classes;
  j["nonrare_classes"] = r.nonrare_classes;
  j["classes"] = r.per_class.size();
  return j;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["default"] = report_to_json(m.report_default);
  j["known_object"] = report_to_json(m.report_known);
  j["map_distant"] = quantize9(m.map_distant);
  j["distant_threshold"] = quantize9(m.distant_threshold);
  j["lambda"] = quantize9(m.lambda);
  j["detections"] = m.detections;
  j["gt_instances"] = m.gt_instances;
  return j.dump(2) + "\n";
}

void write_per_class_csv(const std::string& path, const EvalReport& r) {
  std::ostringstream out;
  out << "object_class,verb_id,gt_count,rare,ap\n";
  for (const ClassAp& c : r.per_class)
    out << c.object_class << ',' << c.verb_id << ',' << c.gt_count << ',' << (c.rare ? 1 : 0)
        << ',' << fmt9(c.ap) << '\n';
  write_file(path, out.str());
}

void write_distance_bins_csv(const std::string& path, const std::vector<DistanceBand>& bands) {
  std::ostringstream out;
  out << "bin_low,gt_count,map\n";
  for (const DistanceBand& b : bands)
    if (b.defined) out << fmt9(b.low) << ',' << b.gt_count << ',' << fmt9(b.map) << '\n';
  write_file(path, out.str());
}

void print_metrics(const Metrics& m) {
  std::cout << "default      map_full " << fmt9(m.report_default.map_full) << "  map_rare "
            << fmt9(m.report_default.map_rare) << "  map_nonrare "
            << fmt9(m.report_default.map_nonrare) << '\n';
  std::cout << "known-object map_full " << fmt9(m.report_known.map_full) << "  map_rare "
            << fmt9(m.report_known.map_rare) << "  map_nonrare "
            << fmt9(m.report_known.map_nonrare) << '\n';
  std::cout << "map_distant(>" << fmt9(m.distant_threshold) << ") " << fmt9(m.map_distant)
            << "  detections " << m.detections << "  gt " << m.gt_instances << '\n';
}

int cmd_gen(const std::string& out_dir, std::size_t train_count, std::size_t eval_count,
            SynthConfig cfg) {
  cfg.num_scenes = train_count + eval_count;
  const FeasibilityTable table = make_feasibility(cfg);
  std::vector<Scene> all = generate_scenes(cfg);
  validate_scenes(all, table, static_cast<int>(cfg.num_verbs));

  std::vector<Scene> train(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(train_count));
  std::vector<Scene> eval_split(all.begin() + static_cast<std::ptrdiff_t>(train_count),
                                all.end());
  fs::create_directories(out_dir);
  save_scenes(train, out_dir + "/train.jsonl");
  save_scenes(eval_split, out_dir + "/eval.jsonl");
  save_feasibility(table, out_dir + "/feasibility.json");

  nlohmann::json j;
  j["train_scenes"] = train_count;
  j["eval_scenes"] = eval_count;
  j["tokens_min"] = cfg.tokens_min;
  j["tokens_max"] = cfg.tokens_max;
  j["feature_dim"] = cfg.feature_dim;
  j["num_verbs"] = cfg.num_verbs;
  j["num_object_classes"] = cfg.num_object_classes;
  j["distance_exponent"] = quantize9(cfg.distance_exponent);
  j["distant_verbs"] = cfg.distant_verbs;
  j["seed"] = cfg.seed;
  write_file(out_dir + "/gen.json", j.dump(2) + "\n");

  std::cout << "wrote " << train_count << " train and " << eval_count << " eval scenes to "
            << out_dir << '\n';
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& run_dir, const TrainConfig& cfg) {
  const std::vector<Scene> train_scenes = load_scenes(data_dir + "/train.jsonl");
  const std::vector<Scene> eval_scenes = load_scenes(data_dir + "/eval.jsonl");
  const FeasibilityTable table = load_feasibility(data_dir + "/feasibility.json");
  validate_scenes(train_scenes, table, static_cast<int>(cfg.model.num_verbs));
  validate_scenes(eval_scenes, table, static_cast<int>(cfg.model.num_verbs));

  fs::create_directories(run_dir);
  write_file(run_dir + "/config.json", train_config_to_json(cfg));

  Model model(cfg.model, cfg.seed);
  ClassMemory memory(cfg.memory_capacity, cfg.memory_min_score);

  std::ostringstream epochs_csv;
  epochs_csv << "epoch,mean_loss,steps,skipped_batches,lr\n";
  train_model(model, memory, train_scenes, cfg, [&](const EpochStats& st) {
    epochs_csv << st.epoch << ',' << fmt9(st.mean_loss) << ',' << st.steps << ','
               << st.skipped_batches << ',' << fmt9(st.lr) << '\n';
    std::cout << "epoch " << st.epoch << '/' << cfg.epochs << "  loss " << fmt9(st.mean_loss)
              << "  lr " << fmt9(st.lr) << '\n';
  });
  write_file(run_dir + "/epochs.csv", epochs_csv.str());
  save_checkpoint(run_dir + "/checkpoint.json", model, memory);

  const std::vector<Detection> dets =
      run_inference(model, memory, eval_scenes, table, cfg.lambda_infer);
  const TrainCounts counts = count_train_instances(train_scenes);
  const Metrics m = compute_metrics(dets, eval_scenes, counts, cfg.rare_threshold,
                                    cfg.lambda_infer, 0.5);
  write_file(run_dir + "/metrics.json", metrics_to_json(m));
  write_per_class_csv(run_dir + "/per_class.csv", m.report_default);
  write_distance_bins_csv(run_dir + "/distance_bins.csv",
                          distance_stratified_map(dets, expand_ground_truth(eval_scenes)));
  print_metrics(m);
  return 0;
}

int cmd_eval(const std::string& data_dir, const std::string& run_dir,
             std::optional<double> lambda_flag, const std::string& out_path) {
  const TrainConfig cfg = train_config_from_json(read_file(run_dir + "/config.json"));
  const std::vector<Scene> train_scenes = load_scenes(data_dir + "/train.jsonl");
  const std::vector<Scene> eval_scenes = load_scenes(data_dir + "/eval.jsonl");
  const FeasibilityTable table = load_feasibility(data_dir + "/feasibility.json");

  Model model(cfg.model, cfg.seed);
  ClassMemory memory(cfg.memory_capacity, cfg.memory_min_score);
  load_checkpoint(run_dir + "/checkpoint.json", model, memory);

  const double lambda = lambda_flag ? *lambda_flag : cfg.lambda_infer;
  const std::vector<Detection> dets = run_inference(model, memory, eval_scenes, table, lambda);
  const TrainCounts counts = count_train_instances(train_scenes);
  const Metrics m =
      compute_metrics(dets, eval_scenes, counts, cfg.rare_threshold, lambda, 0.5);
  if (!out_path.empty()) write_file(out_path, metrics_to_json(m));
  print_metrics(m);
  return 0;
}

int cmd_ablate(const std::string& data_dir, const std::string& out_dir,
               const TrainConfig& base) {
  const std::vector<Scene> train_scenes = load_scenes(data_dir + "/train.jsonl");
  const std::vector<Scene> eval_scenes = load_scenes(data_dir + "/eval.jsonl");
  const FeasibilityTable table = load_feasibility(data_dir + "/feasibility.json");
  validate_scenes(train_scenes, table, static_cast<int>(base.model.num_verbs));
  validate_scenes(eval_scenes, table, static_cast<int>(base.model.num_verbs));
  const TrainCounts counts = count_train_instances(train_scenes);

  struct Arm {
    const char* name;
    bool token_encoder, interaction_encoder, da_loss, fnda_masks;
  };
  // Memory diversification and spatial fusion stay on in every arm; the grid
  // covers the encoder stages and the loss weighting, plus a full model whose
  // token encoder runs unmasked.
  const Arm arms[] = {
      {"baseline", false, false, false, true},
      {"t_enc", true, false, false, true},
      {"i_enc", false, true, false, true},
      {"da", false, false, true, true},
      {"t_enc+i_enc", true, true, false, true},
      {"t_enc+da", true, false, true, true},
      {"i_enc+da", false, true, true, true},
      {"full", true, true, true, true},
      {"mhsa_full", true, true, true, false},
  };

  fs::create_directories(out_dir);
  write_file(out_dir + "/config.json", train_config_to_json(base));

  std::ostringstream csv;
  csv << "arm,token_encoder,interaction_encoder,da_loss,fnda_masks,"
         "map_full,map_rare,map_nonrare,map_distant\n";
  for (const Arm& arm : arms) {
    TrainConfig cfg = base;
    cfg.model.use_token_encoder = arm.token_encoder;
    cfg.model.use_interaction_encoder = arm.interaction_encoder;
    cfg.model.use_da_loss = arm.da_loss;
    cfg.model.use_fnda_masks = arm.fnda_masks;

    Model model(cfg.model, cfg.seed);
    ClassMemory memory(cfg.memory_capacity, cfg.memory_min_score);
    train_model(model, memory, train_scenes, cfg);
    const std::vector<Detection> dets =
        run_inference(model, memory, eval_scenes, table, cfg.lambda_infer);
    const Metrics m = compute_metrics(dets, eval_scenes, counts, cfg.rare_threshold,
                                      cfg.lambda_infer, 0.5);
    csv << arm.name << ',' << arm.token_encoder << ',' << arm.interaction_encoder << ','
        << arm.da_loss << ',' << arm.fnda_masks << ',' << fmt9(m.report_default.map_full)
        << ',' << fmt9(m.report_default.map_rare) << ',' << fmt9(m.report_default.map_nonrare)
        << ',' << fmt9(m.map_distant) << '\n';
    std::cout << "arm " << arm.name << "  map_full " << fmt9(m.report_default.map_full)
              << "  map_distant " << fmt9(m.map_distant) << '\n';
  }
  write_file(out_dir + "/ablation.csv", csv.str());
  std::cout << "wrote " << out_dir << "/ablation.csv\n";
  return 0;
}

int cmd_inspect_masks(const std::string& scenes_path, const std::string& out_path,
                      double min_score, std::size_t min_keep, std::size_t max_keep) {
  const std::vector<Scene> scenes = load_scenes(scenes_path);
  std::ostringstream out;
  out << "scene_id,i,j,distance,far,near\n";
  for (const Scene& scene : scenes) {
    const std::vector<Token> kept = filter_tokens(scene.tokens, min_score, min_keep, max_keep);
    if (kept.empty()) continue;
    std::vector<Box> boxes;
    boxes.reserve(kept.size());
    for (const Token& t : kept) boxes.push_back(t.box);
    const DistanceMatrix d = pairwise_distances(boxes);
    const MaskPair masks = build_masks(d);
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = 0; j < kept.size(); ++j)
        out << scene.id << ',' << i << ',' << j << ',' << fmt9(d.entries(i, j)) << ','
            << static_cast<int>(masks.far(i, j)) << ',' << static_cast<int>(masks.near(i, j))
            << '\n';
  }
  write_file(out_path, out.str());
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int cmd_inspect_attn(const std::string& run_dir, const std::string& scenes_path,
                     const std::string& out_path, double bin_width, bool interactive_only,
                     const std::string& kind_filter) {
  const TrainConfig cfg = train_config_from_json(read_file(run_dir + "/config.json"));
  Model model(cfg.model, cfg.seed);
  ClassMemory memory(cfg.memory_capacity, cfg.memory_min_score);
  load_checkpoint(run_dir + "/checkpoint.json", model, memory);

  const std::vector<Scene> scenes = load_scenes(scenes_path);
  std::vector<AttentionRecord> records = collect_attention_records(model, memory, scenes);
  const std::vector<AttentionBinStat> stats =
      attention_distance_stats(records, bin_width, interactive_only);

  std::ostringstream out;
  out << "bin_low,mean,variance,count,attention_kind\n";
  for (const AttentionBinStat& s : stats) {
    const std::string name = attention_kind_name(s.kind);
    if (!kind_filter.empty() && name != kind_filter) continue;
    out << fmt9(s.bin_low) << ',' << fmt9(s.mean) << ',' << fmt9(s.variance) << ',' << s.count
        << ',' << name << '\n';
  }
  write_file(out_path, out.str());
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distance-aware human-object interaction engine"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  std::string gen_out;
  std::size_t gen_train = 2000, gen_eval = 400;
  SynthConfig synth;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--train", gen_train, "training scenes");
  gen->add_option("--eval", gen_eval, "evaluation scenes");
  gen->add_option("--tokens-min", synth.tokens_min, "minimum tokens per scene");
  gen->add_option("--tokens-max", synth.tokens_max, "maximum tokens per scene");
  gen->add_option("--feature-dim", synth.feature_dim, "token feature width");
  gen->add_option("--num-verbs", synth.num_verbs, "verb vocabulary size");
  gen->add_option("--object-classes", synth.num_object_classes, "object classes");
  gen->add_option("--distance-exponent", synth.distance_exponent,
                  "pair distance law r = r_max * u^exponent");
  gen->add_option("--distant-verbs", synth.distant_verbs,
                  "verbs whose pairs are drawn from the far tail");
  gen->add_option("--seed", synth.seed, "generator seed");

  // train
  auto* train = app.add_subcommand("train", "train a model and evaluate it");
  std::string train_data, train_run, train_config;
  TrainOverrides train_o;
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--run", train_run, "run output directory")->required();
  train->add_option("--config", train_config, "JSON config file");
  add_train_flags(train, train_o);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained run");
  std::string eval_data, eval_run, eval_out;
  std::optional<double> eval_lambda;
  eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
  eval_cmd->add_option("--run", eval_run, "run directory with config and checkpoint")
      ->required();
  eval_cmd->add_option("--lambda", eval_lambda, "score exponent override");
  eval_cmd->add_option("--out", eval_out, "metrics JSON output path");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "train the component ablation grid");
  std::string ab_data, ab_out, ab_config;
  TrainOverrides ab_o;
  ablate->add_option("--data", ab_data, "dataset directory")->required();
  ablate->add_option("--out", ab_out, "output directory")->required();
  ablate->add_option("--config", ab_config, "JSON config file");
  add_train_flags(ablate, ab_o);

  // inspect
  auto* inspect = app.add_subcommand("inspect", "dump internals to CSV");
  inspect->require_subcommand(1);
  auto* masks = inspect->add_subcommand("masks", "far/near masks per scene");
  std::string m_scenes, m_out;
  double m_min_score = 0.2;
  std::size_t m_min_keep = 3, m_max_keep = 15;
  masks->add_option("--scenes", m_scenes, "scene JSONL file")->required();
  masks->add_option("--out", m_out, "CSV output path")->required();
  masks->add_option("--min-score", m_min_score, "token filter threshold");
  masks->add_option("--min-keep", m_min_keep, "minimum tokens kept per group");
  masks->add_option("--max-keep", m_max_keep, "maximum tokens kept per group");

  auto* attn = inspect->add_subcommand("attn", "attention statistics by distance band");
  std::string a_run, a_scenes, a_out, a_kind;
  double a_bin_width = 0.05;
  bool a_interactive = false;
  attn->add_option("--run", a_run, "run directory with config and checkpoint")->required();
  attn->add_option("--scenes", a_scenes, "scene JSONL file")->required();
  attn->add_option("--out", a_out, "CSV output path")->required();
  attn->add_option("--bin-width", a_bin_width, "distance band width");
  attn->add_flag("--interactive-only", a_interactive, "only ground-truth-matched pairs");
  attn->add_option("--kind", a_kind,
                   "filter rows: far_block, near_block, combined or baseline_mhsa");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_out, gen_train, gen_eval, synth);
    if (train->parsed())
      return cmd_train(train_data, train_run, resolve_config(train_config, train_o));
    if (eval_cmd->parsed()) return cmd_eval(eval_data, eval_run, eval_lambda, eval_out);
    if (ablate->parsed())
      return cmd_ablate(ab_data, ab_out, resolve_config(ab_config, ab_o));
    if (masks->parsed())
      return cmd_inspect_masks(m_scenes, m_out, m_min_score, m_min_keep, m_max_keep);
    if (attn->parsed())
      return cmd_inspect_attn(a_run, a_scenes, a_out, a_bin_width, a_interactive, a_kind);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "hoi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hoi {

std::vector<Token> filter_tokens(const std::vector<Token>& tokens, double min_score,
                                 std::size_t min_keep, std::size_t max_keep) {
  if (min_keep > max_keep)
    throw std::invalid_argument("filter_tokens: min_keep exceeds max_keep");
  std::vector<bool> keep(tokens.size(), false);
  for (bool humans : {true, false}) {
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < tokens.size(); ++i)
      if (tokens[i].is_human == humans) group.push_back(i);
    if (group.empty()) continue;
    // Highest score first; stable, so ties keep original order.
    std::vector<std::size_t> ranked = group;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      return tokens[a].score > tokens[b].score;
    });
    std::size_t above = 0;
    for (std::size_t i : group)
      if (tokens[i].score >= min_score) ++above;
    // The floor applies even when it drags in below-threshold tokens.
    std::size_t k = std::clamp(above, min_keep, max_keep);
    k = std::min(k, group.size());
    for (std::size_t r = 0; r < k; ++r) keep[ranked[r]] = true;
  }
  std::vector<Token> out;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (keep[i]) out.push_back(tokens[i]);
  return out;
}

double final_score(double human_score, double object_score, double verb_prob, double lambda) {
  if (lambda == 1.0) return human_score * object_score * verb_prob;
  return std::pow(human_score, lambda) * std::pow(object_score, lambda) * verb_prob;
}

Mat match_pairs_to_gt(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                      const std::vector<Token>& tokens, const std::vector<GtTriplet>& gts,
                      std::size_t num_verbs, double iou_threshold,
                      std::vector<bool>* matched_out) {
  Mat targets(pairs.size(), num_verbs);
  if (matched_out) matched_out->assign(pairs.size(), false);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (i >= tokens.size() || j >= tokens.size())
      throw std::invalid_argument("match_pairs_to_gt: pair index out of range");
    for (const GtTriplet& g : gts) {
      if (g.object_class != tokens[j].class_id) continue;
      if (iou(tokens[i].box, g.human_box) < iou_threshold) continue;
      if (iou(tokens[j].box, g.object_box) < iou_threshold) continue;
      for (int v : g.verb_ids) {
        if (v < 0 || static_cast<std::size_t>(v) >= num_verbs)
          throw std::invalid_argument("match_pairs_to_gt: verb id out of range");
        targets(k, static_cast<std::size_t>(v)) = 1.0;
      }
      if (matched_out) (*matched_out)[k] = true;
    }
  }
  return targets;
}

std::vector<GtInstance> expand_ground_truth(const std::vector<Scene>& scenes) {
  std::vector<GtInstance> out;
  for (const Scene& s : scenes)
    for (const GtTriplet& g : s.ground_truth)
      for (int v : g.verb_ids)
        out.push_back({s.id, g.human_box, g.object_box, g.object_class, v});
  return out;
}

TrainCounts count_train_instances(const std::vector<Scene>& train_scenes) {
  TrainCounts counts;
  for (const Scene& s : train_scenes)
    for (const GtTriplet& g : s.ground_truth)
      for (int v : g.verb_ids) ++counts[{g.object_class, v}];
  return counts;
}

namespace {

// Greedy ranked matching and all-points interpolated average precision for
// one class. gts are grouped by scene before matching.
double class_ap(std::vector<const Detection*> dets,
                const std::vector<const GtInstance*>& gts) {
  if (gts.empty()) return 0.0;
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection* a, const Detection* b) { return a->score > b->score; });

  std::map<std::string, std::vector<std::size_t>> gt_by_scene;
  for (std::size_t g = 0; g < gts.size(); ++g) gt_by_scene[gts[g]->scene_id].push_back(g);
  std::vector<bool> used(gts.size(), false);

  const double total_gt = static_cast<double>(gts.size());
  std::vector<double> recall, precision;
  recall.reserve(dets.size());
  precision.reserve(dets.size());
  std::size_t tp = 0, fp = 0;
  for (const Detection* d : dets) {
    auto it = gt_by_scene.find(d->scene_id);
    double best_overlap = 0.5;  // strict: must exceed 0.5
    std::size_t best_g = gts.size();
    if (it != gt_by_scene.end()) {
      for (std::size_t g : it->second) {
        if (used[g]) continue;
        const double ov = std::min(iou(d->human_box, gts[g]->human_box),
                                   iou(d->object_box, gts[g]->object_box));
        if (ov > best_overlap) {
          best_overlap = ov;
          best_g = g;
        }
      }
    }
    if (best_g < gts.size()) {
      used[best_g] = true;
      ++tp;
    } else {
      ++fp;
    }
    recall.push_back(static_cast<double>(tp) / total_gt);
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }

  // Monotone precision envelope, integrated across every recall step.
  double ap = 0.0;
  double env = 0.0;
  for (std::size_t k = dets.size(); k-- > 0;) {
    env = std::max(env, precision[k]);
    const double r_prev = k == 0 ? 0.0 : recall[k - 1];
    if (recall[k] > r_prev) ap += (recall[k] - r_prev) * env;
  }
  return ap;
}

}  // namespace

EvalReport evaluate(const std::vector<Detection>& detections,
                    const std::vector<GtInstance>& ground_truth, EvalSetting setting,
                    const TrainCounts* train_counts, std::size_t rare_threshold) {
  std::map<ClassKey, std::vector<const GtInstance*>> gt_by_class;
  std::map<int, std::set<std::string>> scenes_with_object;
  for (const GtInstance& g : ground_truth) {
    gt_by_class[{g.object_class, g.verb_id}].push_back(&g);
    scenes_with_object[g.object_class].insert(g.scene_id);
  }
  std::map<ClassKey, std::vector<const Detection*>> det_by_class;
  for (const Detection& d : detections) {
    const ClassKey key{d.object_class, d.verb_id};
    if (gt_by_class.count(key)) det_by_class[key].push_back(&d);
  }

  EvalReport report;
  report.setting = setting;
  double sum_full = 0.0, sum_rare = 0.0, sum_nonrare = 0.0;
  for (const auto& [key, gts] : gt_by_class) {
    std::vector<const Detection*> dets;
    if (auto it = det_by_class.find(key); it != det_by_class.end()) dets = it->second;
    if (setting == EvalSetting::kKnownObject) {
      const std::set<std::string>& allowed = scenes_with_object[key.first];
      std::erase_if(dets, [&](const Detection* d) { return !allowed.count(d->scene_id); });
    }
    ClassAp entry;
    entry.object_class = key.first;
    entry.verb_id = key.second;
    entry.gt_count = gts.size();
    entry.ap = class_ap(std::move(dets), gts);
    if (train_counts) {
      auto it = train_counts->find(key);
      const std::size_t seen = it == train_counts->end() ? 0 : it->second;
      entry.rare = seen < rare_threshold;
    }
    sum_full += entry.ap;
    if (entry.rare) {
      sum_rare += entry.ap;
      ++report.rare_classes;
    } else {
      sum_nonrare += entry.ap;
      ++report.nonrare_classes;
    }
    report.per_class.push_back(std::move(entry));
  }
  const std::size_t total = report.per_class.size();
  report.map_full = total ? sum_full / static_cast<double>(total) : 0.0;
  report.map_rare =
      report.rare_classes ? sum_rare / static_cast<double>(report.rare_classes) : 0.0;
  report.map_nonrare =
      report.nonrare_classes ? sum_nonrare / static_cast<double>(report.nonrare_classes) : 0.0;
  return report;
}

namespace {

double detection_distance(const Detection& d) {
  return center_distance(d.human_box, d.object_box);
}

double instance_distance(const GtInstance& g) {
  return center_distance(g.human_box, g.object_box);
}

}  // namespace

double map_above_distance(const std::vector<Detection>& detections,
                          const std::vector<GtInstance>& ground_truth, double threshold,
                          EvalSetting setting) {
  std::vector<Detection> dets;
  std::vector<GtInstance> gts;
  for (const Detection& d : detections)
    if (detection_distance(d) > threshold) dets.push_back(d);
  for (const GtInstance& g : ground_truth)
    if (instance_distance(g) > threshold) gts.push_back(g);
  return evaluate(dets, gts, setting).map_full;
}

std::vector<DistanceBand> distance_stratified_map(const std::vector<Detection>& detections,
                                                  const std::vector<GtInstance>& ground_truth,
                                                  double bin_width, EvalSetting setting) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("distance_stratified_map: bin width must be positive");
  const double span = std::sqrt(2.0);
  const std::size_t nbins = static_cast<std::size_t>(std::ceil(span / bin_width));
  auto bin_of = [&](double d) {
    return std::min(static_cast<std::size_t>(d / bin_width), nbins - 1);
  };
  std::vector<std::vector<Detection>> det_bins(nbins);
  std::vector<std::vector<GtInstance>> gt_bins(nbins);
  for (const Detection& d : detections) det_bins[bin_of(detection_distance(d))].push_back(d);
  for (const GtInstance& g : ground_truth) gt_bins[bin_of(instance_distance(g))].push_back(g);

  std::vector<DistanceBand> bands(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    bands[b].low = static_cast<double>(b) * bin_width;
    bands[b].gt_count = gt_bins[b].size();
    if (!gt_bins[b].empty()) {
      bands[b].map = evaluate(det_bins[b], gt_bins[b], setting).map_full;
      bands[b].defined = true;
    }
  }
  return bands;
}

std::string attention_kind_name(AttentionKind kind) {
  switch (kind) {
    case AttentionKind::kFarBlock: return "far_block";
    case AttentionKind::kNearBlock: return "near_block";
    case AttentionKind::kCombined: return "combined";
    case AttentionKind::kBaselineMhsa: return "baseline_mhsa";
  }
  throw std::invalid_argument("attention_kind_name: bad kind");
}

std::vector<AttentionBinStat> attention_distance_stats(
    const std::vector<AttentionRecord>& records, double bin_width, bool interactive_only) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("attention_distance_stats: bin width must be positive");
  const double span = std::sqrt(2.0);
  const std::size_t nbins = static_cast<std::size_t>(std::ceil(span / bin_width));
  struct Acc {
    std::size_t n = 0;
    double sum = 0.0;
    double sumsq = 0.0;
  };
  std::map<std::pair<int, std::size_t>, Acc> acc;  // (kind, bin) -> stats
  for (const AttentionRecord& r : records) {
    if (interactive_only && !r.interactive) continue;
    const std::size_t b = std::min(static_cast<std::size_t>(r.distance / bin_width), nbins - 1);
    Acc& a = acc[{static_cast<int>(r.kind), b}];
    ++a.n;
    a.sum += r.weight;
    a.sumsq += r.weight * r.weight;
  }
  std::vector<AttentionBinStat> out;
  for (const auto& [key, a] : acc) {
    AttentionBinStat s;
    s.kind = static_cast<AttentionKind>(key.first);
    s.bin_low = static_cast<double>(key.second) * bin_width;
    s.count = a.n;
    s.mean = a.sum / static_cast<double>(a.n);
    s.variance = std::max(0.0, a.sumsq / static_cast<double>(a.n) - s.mean * s.mean);
    out.push_back(s);
  }
  return out;
}

}  // namespace hoi

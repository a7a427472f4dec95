#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hoi/geometry.hpp"
#include "hoi/scene.hpp"

namespace hoi {

/// Keeps humans and non-humans independently: within each group, tokens at or
/// above min_score survive, but at least min_keep of the group's tokens are
/// retained (highest score first, original order on ties) even when they fall
/// below the threshold, and never more than max_keep. Relative input order is
/// preserved in the result.
std::vector<Token> filter_tokens(const std::vector<Token>& tokens, double min_score = 0.2,
                                 std::size_t min_keep = 3, std::size_t max_keep = 15);

/// Detection confidence s_h^lambda * s_o^lambda * verb_prob. lambda = 1
/// reproduces the plain product exactly.
double final_score(double human_score, double object_score, double verb_prob, double lambda);

/// Per-pair 0/1 verb targets: row k carries the union of verb sets over all
/// ground-truth triplets whose class matches pair k's object token and whose
/// boxes both overlap the pair's token boxes with IoU >= iou_threshold.
/// matched_out (when given) flags pairs with at least one positive verb.
Mat match_pairs_to_gt(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                      const std::vector<Token>& tokens, const std::vector<GtTriplet>& gts,
                      std::size_t num_verbs, double iou_threshold = 0.5,
                      std::vector<bool>* matched_out = nullptr);

struct Detection {
  std::string scene_id;
  Box human_box;
  Box object_box;
  int object_class = 0;
  int verb_id = 0;
  double score = 0.0;
};

/// One ground-truth instance per (triplet, verb).
struct GtInstance {
  std::string scene_id;
  Box human_box;
  Box object_box;
  int object_class = 0;
  int verb_id = 0;
};

std::vector<GtInstance> expand_ground_truth(const std::vector<Scene>& scenes);

enum class EvalSetting { kDefault, kKnownObject };

using ClassKey = std::pair<int, int>;  // (object_class, verb_id)
using TrainCounts = std::map<ClassKey, std::size_t>;

/// Ground-truth instances per interaction class in a training split; drives
/// the rare / non-rare partition of the report.
TrainCounts count_train_instances(const std::vector<Scene>& train_scenes);

struct ClassAp {
  int object_class = 0;
  int verb_id = 0;
  double ap = 0.0;
  std::size_t gt_count = 0;
  bool rare = false;
};

struct EvalReport {
  EvalSetting setting = EvalSetting::kDefault;
  std::vector<ClassAp> per_class;  // ordered by (object_class, verb_id)
  double map_full = 0.0;
  double map_rare = 0.0;
  double map_nonrare = 0.0;
  std::size_t rare_classes = 0;
  std::size_t nonrare_classes = 0;
};

/// Greedy matching per class: detections in descending score (ties keep
/// submission order), a detection is a true positive when some unmatched
/// same-scene ground truth of its class has min(IoU_h, IoU_o) > 0.5. Average
/// precision integrates the monotonized precision envelope over all recall
/// points. Classes are those with at least one ground-truth instance; a class
/// with no detections scores 0. In the known-object setting each class only
/// sees detections from scenes whose ground truth contains that object class.
/// Classes with fewer than rare_threshold training instances (via
/// train_counts; 0 when absent) count as rare.
EvalReport evaluate(const std::vector<Detection>& detections,
                    const std::vector<GtInstance>& ground_truth, EvalSetting setting,
                    const TrainCounts* train_counts = nullptr,
                    std::size_t rare_threshold = 10);

/// mAP over instances and detections restricted to pair distance above the
/// threshold (distance of a pair is the center distance of its two boxes).
double map_above_distance(const std::vector<Detection>& detections,
                          const std::vector<GtInstance>& ground_truth, double threshold = 0.5,
                          EvalSetting setting = EvalSetting::kDefault);

struct DistanceBand {
  double low = 0.0;       // bin covers [low, low + width)
  std::size_t gt_count = 0;
  double map = 0.0;
  bool defined = false;   // false when the band holds no ground truth
};

/// Splits ground truth and detections into distance bands of the given width
/// covering [0, sqrt(2)] and evaluates each band separately.
std::vector<DistanceBand> distance_stratified_map(const std::vector<Detection>& detections,
                                                  const std::vector<GtInstance>& ground_truth,
                                                  double bin_width = 0.05,
                                                  EvalSetting setting = EvalSetting::kDefault);

enum class AttentionKind { kFarBlock, kNearBlock, kCombined, kBaselineMhsa };
std::string attention_kind_name(AttentionKind kind);

struct AttentionRecord {
  std::string scene_id;
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
  double weight = 0.0;
  AttentionKind kind = AttentionKind::kCombined;
  bool interactive = false;  // token i is a human and pair (i, j) matches ground truth
};

struct AttentionBinStat {
  AttentionKind kind = AttentionKind::kCombined;
  double bin_low = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // population variance
  std::size_t count = 0;
};

/// Mean and variance of attention weight per (kind, distance band); empty
/// bands are omitted. Ordered by kind then band.
std::vector<AttentionBinStat> attention_distance_stats(
    const std::vector<AttentionRecord>& records, double bin_width = 0.05,
    bool interactive_only = false);

}  // namespace hoi

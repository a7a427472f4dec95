#include "hoi/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "hoi/rng.hpp"
#include "json.hpp"

namespace hoi {

namespace {

using nlohmann::json;

// Scene layout region and sampler knobs. Centers stay inside
// [kMinCenter, kMaxCenter]^2 so boxes of reasonable size fit around them.
constexpr double kMinCenter = 0.1;
constexpr double kMaxCenter = 0.9;
constexpr double kMaxPairDistance = 0.85;
constexpr double kTailStart = 0.5;
constexpr double kFeatureNoise = 0.35;
constexpr double kGlobalNoise = 0.2;
constexpr double kSignalBase = 0.9;     // verb signature gain on a touching pair
constexpr double kSignalFade = 1.0;     // linear fade factor toward max distance
constexpr double kFarNoise = 0.3;       // extra appearance noise at max distance
constexpr double kEchoProb = 0.6;
constexpr double kSalienceBoost = 0.7;  // extra prototype gain on near clutter
constexpr double kContextSignal = 0.5;  // distant-verb signature on carrier tokens
constexpr double kContextProb = 0.85;   // chance a background token carries one
constexpr double kCarrierShare = 0.3;   // carrier split: far corroboration vs near decoy
constexpr double kDistantVerbProb = 0.15;  // long-tail share of tail-range interactions
constexpr double kConflictProb = 0.7;   // near same-class close-verb counterpart
constexpr double kConflictMaxDistance = 0.45;
constexpr double kBoxJitter = 0.008;    // detector box noise around ground truth

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Farthest distance from c to a corner of the center region.
double max_corner_reach(double cx, double cy) {
  double best = 0.0;
  for (double x : {kMinCenter, kMaxCenter}) {
    for (double y : {kMinCenter, kMaxCenter}) {
      best = std::max(best, std::hypot(x - cx, y - cy));
    }
  }
  return best;
}

bool in_region(double x, double y) {
  return x >= kMinCenter && x <= kMaxCenter && y >= kMinCenter && y <= kMaxCenter;
}

Box box_around(double cx, double cy, double w, double h) {
  const double hw = std::min({0.5 * w, cx, 1.0 - cx});
  const double hh = std::min({0.5 * h, cy, 1.0 - cy});
  return {cx - hw, cy - hh, cx + hw, cy + hh};
}

Box quantize_box(const Box& b) {
  return {quantize9(b.x1), quantize9(b.y1), quantize9(b.x2), quantize9(b.y2)};
}

Box jitter_box(const Box& b, Rng& rng) {
  Box j{b.x1 + rng.uniform(-kBoxJitter, kBoxJitter),
        b.y1 + rng.uniform(-kBoxJitter, kBoxJitter),
        b.x2 + rng.uniform(-kBoxJitter, kBoxJitter),
        b.y2 + rng.uniform(-kBoxJitter, kBoxJitter)};
  j.x1 = clamp(j.x1, 0.0, 1.0);
  j.y1 = clamp(j.y1, 0.0, 1.0);
  j.x2 = clamp(j.x2, 0.0, 1.0);
  j.y2 = clamp(j.y2, 0.0, 1.0);
  return j;
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t d, double scale) {
  std::vector<double> v(d);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

void add_scaled(std::vector<double>& dst, const std::vector<double>& src, double s) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
}

Box json_box(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 4)
    throw std::runtime_error(std::string(field) + " must be a 4-element array");
  Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!box_is_valid(b))
    throw std::runtime_error(std::string(field) + " is not a valid normalized box");
  return b;
}

json box_json(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

Scene scene_from_json(const json& j) {
  Scene s;
  s.id = j.at("id").get<std::string>();
  s.global_feature = j.at("global_feature").get<std::vector<double>>();
  if (s.global_feature.empty()) throw std::runtime_error("global_feature is empty");
  const std::size_t d = s.global_feature.size();
  for (const json& tj : j.at("tokens")) {
    Token t;
    t.feature = tj.at("feature").get<std::vector<double>>();
    if (t.feature.size() != d)
      throw std::runtime_error("token feature dimension differs from global_feature");
    t.box = json_box(tj.at("box"), "box");
    t.score = tj.at("score").get<double>();
    if (!(t.score >= 0.0 && t.score <= 1.0))
      throw std::runtime_error("token score outside [0,1]");
    t.class_id = tj.at("class_id").get<int>();
    if (t.class_id < 0) throw std::runtime_error("negative class_id");
    t.is_human = tj.at("is_human").get<bool>();
    if (t.is_human != (t.class_id == kPersonClassId))
      throw std::runtime_error("is_human inconsistent with class_id");
    s.tokens.push_back(std::move(t));
  }
  for (const json& gj : j.at("gt")) {
    GtTriplet g;
    g.human_box = json_box(gj.at("hbox"), "hbox");
    g.object_box = json_box(gj.at("obox"), "obox");
    g.object_class = gj.at("object_class").get<int>();
    if (g.object_class < 0) throw std::runtime_error("negative object_class");
    g.verb_ids = gj.at("verbs").get<std::vector<int>>();
    std::sort(g.verb_ids.begin(), g.verb_ids.end());
    g.verb_ids.erase(std::unique(g.verb_ids.begin(), g.verb_ids.end()), g.verb_ids.end());
    if (g.verb_ids.empty()) throw std::runtime_error("gt verbs is empty");
    if (g.verb_ids.front() < 0) throw std::runtime_error("negative verb id");
    s.ground_truth.push_back(std::move(g));
  }
  return s;
}

json scene_to_json(const Scene& s) {
  json j;
  j["id"] = s.id;
  j["global_feature"] = s.global_feature;
  json toks = json::array();
  for (const Token& t : s.tokens) {
    toks.push_back({{"feature", t.feature},
                    {"box", box_json(t.box)},
                    {"score", t.score},
                    {"class_id", t.class_id},
                    {"is_human", t.is_human}});
  }
  j["tokens"] = std::move(toks);
  json gts = json::array();
  for (const GtTriplet& g : s.ground_truth) {
    gts.push_back({{"hbox", box_json(g.human_box)},
                   {"obox", box_json(g.object_box)},
                   {"object_class", g.object_class},
                   {"verbs", g.verb_ids}});
  }
  j["gt"] = std::move(gts);
  return j;
}

}  // namespace

double quantize9(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return std::strtod(buf, nullptr);
}

bool operator==(const Token& a, const Token& b) {
  return a.feature == b.feature && a.box.x1 == b.box.x1 && a.box.y1 == b.box.y1 &&
         a.box.x2 == b.box.x2 && a.box.y2 == b.box.y2 && a.score == b.score &&
         a.class_id == b.class_id && a.is_human == b.is_human;
}

bool operator==(const GtTriplet& a, const GtTriplet& b) {
  return a.human_box.x1 == b.human_box.x1 && a.human_box.y1 == b.human_box.y1 &&
         a.human_box.x2 == b.human_box.x2 && a.human_box.y2 == b.human_box.y2 &&
         a.object_box.x1 == b.object_box.x1 && a.object_box.y1 == b.object_box.y1 &&
         a.object_box.x2 == b.object_box.x2 && a.object_box.y2 == b.object_box.y2 &&
         a.object_class == b.object_class && a.verb_ids == b.verb_ids;
}

bool operator==(const Scene& a, const Scene& b) {
  return a.id == b.id && a.tokens == b.tokens && a.global_feature == b.global_feature &&
         a.ground_truth == b.ground_truth;
}

const std::set<int>& feasible_verbs(const FeasibilityTable& table, int object_class) {
  auto it = table.find(object_class);
  if (it == table.end())
    throw std::runtime_error("no feasibility entry for class " + std::to_string(object_class));
  return it->second;
}

std::vector<Scene> load_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenes file: " + path);
  std::vector<Scene> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(scene_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_scenes(const std::vector<Scene>& scenes, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const Scene& s : scenes) out << scene_to_json(s).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

FeasibilityTable load_feasibility(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feasibility file: " + path);
  FeasibilityTable table;
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw std::runtime_error("top level must be an object");
    for (auto& [key, verbs] : j.items()) {
      const int cls = std::stoi(key);
      std::set<int>& s = table[cls];
      for (const json& v : verbs) {
        const int verb = v.get<int>();
        if (verb < 0) throw std::runtime_error("negative verb id");
        s.insert(verb);
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return table;
}

void save_feasibility(const FeasibilityTable& table, const std::string& path) {
  json j = json::object();
  for (const auto& [cls, verbs] : table)
    j[std::to_string(cls)] = std::vector<int>(verbs.begin(), verbs.end());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void validate_scenes(const std::vector<Scene>& scenes, const FeasibilityTable& table,
                     int num_verbs) {
  for (const Scene& s : scenes) {
    for (const Token& t : s.tokens) {
      if (!table.count(t.class_id))
        throw std::runtime_error("scene " + s.id + ": token class " +
                                 std::to_string(t.class_id) + " missing from feasibility table");
    }
    for (const GtTriplet& g : s.ground_truth) {
      const std::set<int>& fv = feasible_verbs(table, g.object_class);
      for (int v : g.verb_ids) {
        if (v >= num_verbs)
          throw std::runtime_error("scene " + s.id + ": verb id " + std::to_string(v) +
                                   " outside configured range");
        if (!fv.count(v))
          throw std::runtime_error("scene " + s.id + ": verb " + std::to_string(v) +
                                   " not feasible for class " + std::to_string(g.object_class));
      }
    }
  }
}

namespace {

void validate_config(const SynthConfig& cfg) {
  if (cfg.tokens_min < 2 || cfg.tokens_max < cfg.tokens_min)
    throw std::invalid_argument("token count range must satisfy 2 <= min <= max");
  if (cfg.feature_dim < 2) throw std::invalid_argument("feature_dim must be at least 2");
  if (cfg.num_verbs < 1) throw std::invalid_argument("num_verbs must be positive");
  if (cfg.num_object_classes < 1)
    throw std::invalid_argument("num_object_classes must be positive");
  if (!(cfg.distance_exponent > 0.0))
    throw std::invalid_argument("distance_exponent must be positive");
  for (int v : cfg.distant_verbs)
    if (v < 0 || v >= static_cast<int>(cfg.num_verbs))
      throw std::invalid_argument("distant verb id outside [0, num_verbs)");
}

struct InteractionSpec {
  std::size_t human_slot = 0;
  int object_class = 0;
  std::vector<int> verbs;
  double r = 0.0;
  bool has_distant = false;
  bool is_conflict = false;  // near close-verb counterpart of a distant pair
};

struct DraftToken {
  Box gt_box;       // exact placement; the token box is a jittered copy
  int class_id = 0;
  bool is_human = false;
  int interaction = -1;  // spec index for interactive objects
  int echo_of = -1;      // spec index for echo tokens
  int context_of = -1;   // spec index for far-field corroboration tokens
  int decoy_verb = -1;   // distant verb carried by an uncorrelated near token
};

}  // namespace

FeasibilityTable make_feasibility(const SynthConfig& cfg) {
  validate_config(cfg);
  std::vector<int> distant(cfg.distant_verbs);
  std::sort(distant.begin(), distant.end());
  distant.erase(std::unique(distant.begin(), distant.end()), distant.end());
  std::vector<int> close;
  for (int v = 0; v < static_cast<int>(cfg.num_verbs); ++v)
    if (!std::binary_search(distant.begin(), distant.end(), v)) close.push_back(v);
  if (close.empty() && distant.empty())
    throw std::invalid_argument("no verbs to assign");

  FeasibilityTable table;
  for (std::size_t k = 0; k <= cfg.num_object_classes; ++k) {
    std::set<int>& s = table[static_cast<int>(k)];
    if (!close.empty()) {
      s.insert(close[(2 * k) % close.size()]);
      s.insert(close[(2 * k + 1) % close.size()]);
    }
    if (!distant.empty()) {
      s.insert(distant[k % distant.size()]);
      s.insert(distant[(k + 1) % distant.size()]);
    }
  }
  return table;
}

std::vector<Scene> generate_scenes(const SynthConfig& cfg) {
  validate_config(cfg);
  const FeasibilityTable table = make_feasibility(cfg);

  std::vector<int> distant_sorted(cfg.distant_verbs);
  std::sort(distant_sorted.begin(), distant_sorted.end());
  distant_sorted.erase(std::unique(distant_sorted.begin(), distant_sorted.end()),
                       distant_sorted.end());
  auto is_distant = [&](int v) {
    return std::binary_search(distant_sorted.begin(), distant_sorted.end(), v);
  };
  // Classes that cannot host a verb; carriers of that verb's signature are
  // drawn from here so they never become plausible detection partners.
  auto blocked_classes = [&](const FeasibilityTable& tbl, const std::vector<int>& verbs) {
    std::vector<int> pool;
    for (int c = 1; c <= static_cast<int>(cfg.num_object_classes); ++c) {
      bool blocked = true;
      for (int v : verbs)
        if (is_distant(v) && tbl.at(c).count(v)) blocked = false;
      if (blocked) pool.push_back(c);
    }
    return pool;
  };

  // World constants shared by every scene: one prototype per class, one
  // signature per verb.
  std::vector<std::vector<double>> protos(cfg.num_object_classes + 1);
  for (std::size_t k = 0; k < protos.size(); ++k) {
    Rng r(mix_seed(mix_seed(cfg.seed, fnv1a64("proto")), k));
    protos[k] = gaussian_vector(r, cfg.feature_dim, 1.0);
  }
  std::vector<std::vector<double>> sigs(cfg.num_verbs);
  for (std::size_t v = 0; v < sigs.size(); ++v) {
    Rng r(mix_seed(mix_seed(cfg.seed, fnv1a64("verb")), v));
    sigs[v] = gaussian_vector(r, cfg.feature_dim, 1.0);
  }

  std::vector<Scene> scenes;
  scenes.reserve(cfg.num_scenes);
  for (std::size_t index = 0; index < cfg.num_scenes; ++index) {
    Rng rng(mix_seed(mix_seed(cfg.seed, fnv1a64("scene")), index));
    Scene scene;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "synth-%06zu", index);
    scene.id = idbuf;

    const std::size_t n =
        cfg.tokens_min + static_cast<std::size_t>(rng.uniform_int(cfg.tokens_max - cfg.tokens_min + 1));
    const std::size_t num_humans = (n >= 4 && rng.uniform() < 0.5) ? 2 : 1;
    const std::size_t max_inter = std::min<std::size_t>(3, n - num_humans);
    const std::size_t num_inter = 1 + static_cast<std::size_t>(rng.uniform_int(max_inter));

    // Interaction specs come first so the humans can be placed where every
    // assigned pair distance is reachable inside the center region.
    std::vector<InteractionSpec> specs(num_inter);
    for (InteractionSpec& sp : specs) {
      sp.human_slot = static_cast<std::size_t>(rng.uniform_int(num_humans));
      sp.object_class = 1 + static_cast<int>(rng.uniform_int(cfg.num_object_classes));
      const std::set<int>& fv = feasible_verbs(table, sp.object_class);
      std::vector<int> choices(fv.begin(), fv.end());
      // Tail-range verbs are the rare minority, mirroring the long-tail
      // distance histogram the exponent shapes.
      std::vector<int> close_c, dist_c;
      for (int v : choices) (is_distant(v) ? dist_c : close_c).push_back(v);
      if (!dist_c.empty() && (close_c.empty() || rng.uniform() < kDistantVerbProb)) {
        sp.verbs.push_back(dist_c[rng.uniform_int(dist_c.size())]);
      } else {
        sp.verbs.push_back(close_c[rng.uniform_int(close_c.size())]);
      }
      if (choices.size() >= 2 && rng.uniform() < 0.2) {
        int extra = choices[rng.uniform_int(choices.size())];
        if (extra != sp.verbs[0]) sp.verbs.push_back(extra);
      }
      std::sort(sp.verbs.begin(), sp.verbs.end());
      for (int v : sp.verbs)
        sp.has_distant |= std::find(cfg.distant_verbs.begin(), cfg.distant_verbs.end(), v) !=
                          cfg.distant_verbs.end();
      const double u = rng.uniform();
      if (sp.has_distant) {
        // Floor the tail a hair above the boundary so box quantization can
        // never drag a distant pair to 0.5 or below.
        sp.r = kTailStart + (kMaxPairDistance - kTailStart) * std::pow(u, cfg.distance_exponent);
        sp.r = std::max(sp.r, kTailStart + 0.002);
      } else {
        sp.r = kMaxPairDistance * std::pow(u, cfg.distance_exponent);
      }
    }

    // A distant pair often coexists with a near interaction of the same
    // class under a close verb, so class identity alone cannot separate the
    // two and range-aware evidence routing has to.
    const std::size_t base_specs = specs.size();
    for (std::size_t k = 0; k < base_specs; ++k) {
      if (!specs[k].has_distant) continue;
      if (num_humans + specs.size() >= n) break;
      if (rng.uniform() >= kConflictProb) continue;
      const std::set<int>& fv = feasible_verbs(table, specs[k].object_class);
      std::vector<int> close_choices;
      for (int v : fv)
        if (!is_distant(v) &&
            std::find(specs[k].verbs.begin(), specs[k].verbs.end(), v) == specs[k].verbs.end())
          close_choices.push_back(v);
      if (close_choices.empty()) continue;
      InteractionSpec sp;
      sp.human_slot = specs[k].human_slot;
      sp.object_class = specs[k].object_class;
      sp.verbs = {close_choices[rng.uniform_int(close_choices.size())]};
      sp.r = kConflictMaxDistance * std::pow(rng.uniform(), cfg.distance_exponent);
      sp.is_conflict = true;
      specs.push_back(sp);
    }
    const std::size_t num_pairs = specs.size();

    std::vector<std::array<double, 2>> human_centers(num_humans);
    for (std::size_t slot = 0; slot < num_humans; ++slot) {
      double need = 0.0;
      for (const InteractionSpec& sp : specs)
        if (sp.human_slot == slot) need = std::max(need, sp.r);
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        const double cx = rng.uniform(kMinCenter, kMaxCenter);
        const double cy = rng.uniform(kMinCenter, kMaxCenter);
        if (max_corner_reach(cx, cy) >= need) {
          human_centers[slot] = {cx, cy};
          placed = true;
        }
      }
      // Region corners can reach every admissible distance.
      if (!placed) human_centers[slot] = {kMinCenter, kMinCenter};
    }

    std::vector<DraftToken> drafts;
    for (std::size_t slot = 0; slot < num_humans; ++slot) {
      DraftToken t;
      t.gt_box = box_around(human_centers[slot][0], human_centers[slot][1],
                            rng.uniform(0.12, 0.28), rng.uniform(0.12, 0.28));
      t.class_id = kPersonClassId;
      t.is_human = true;
      drafts.push_back(t);
    }

    for (std::size_t k = 0; k < specs.size(); ++k) {
      const InteractionSpec& sp = specs[k];
      const auto& hc = human_centers[sp.human_slot];
      double px = 0.0, py = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
        const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        px = hc[0] + sp.r * std::cos(theta);
        py = hc[1] + sp.r * std::sin(theta);
        ok = in_region(px, py);
      }
      if (!ok) {
        // Walk toward the farthest corner; by convexity the point at
        // distance r along that ray stays inside the region.
        double bx = kMinCenter, by = kMinCenter, best = -1.0;
        for (double x : {kMinCenter, kMaxCenter}) {
          for (double y : {kMinCenter, kMaxCenter}) {
            const double d = std::hypot(x - hc[0], y - hc[1]);
            if (d > best) {
              best = d;
              bx = x;
              by = y;
            }
          }
        }
        px = hc[0] + sp.r * (bx - hc[0]) / best;
        py = hc[1] + sp.r * (by - hc[1]) / best;
      }
      DraftToken t;
      t.gt_box = box_around(px, py, rng.uniform(0.06, 0.18), rng.uniform(0.06, 0.18));
      t.class_id = sp.object_class;
      t.interaction = static_cast<int>(k);
      drafts.push_back(t);
    }

    // Background tokens. Echoes repeat an interactive object's class near a
    // human. Signature carriers come in two geometrically distinct but
    // content-identical kinds: far-field tokens corroborating a live distant
    // interaction, and near-field decoys carrying an unrelated distant verb.
    // Appearance cannot tell them apart; only range can, which is what makes
    // the far field worth attending to as a band rather than token by token.
    std::size_t background = n - num_humans - num_pairs;
    std::vector<int> echo_specs;
    for (std::size_t k = 0; k < specs.size() && echo_specs.size() < background; ++k)
      if (rng.uniform() < kEchoProb) echo_specs.push_back(static_cast<int>(k));
    std::vector<int> distant_specs;
    for (std::size_t k = 0; k < specs.size(); ++k)
      if (specs[k].has_distant) distant_specs.push_back(static_cast<int>(k));
    for (std::size_t b = 0; b < background; ++b) {
      DraftToken t;
      const bool is_echo = b < echo_specs.size();
      double px = 0.0, py = 0.0;
      if (is_echo) {
        t.echo_of = echo_specs[b];
        t.class_id = specs[t.echo_of].object_class;
        const auto& hc = human_centers[specs[t.echo_of].human_slot];
        px = clamp(hc[0] + 0.08 * rng.normal(), kMinCenter, kMaxCenter);
        py = clamp(hc[1] + 0.08 * rng.normal(), kMinCenter, kMaxCenter);
      } else if (!distant_sorted.empty() && rng.uniform() < kContextProb) {
        const bool far_true = !distant_specs.empty() && rng.uniform() < kCarrierShare;
        if (far_true) {
          const int k = distant_specs[rng.uniform_int(distant_specs.size())];
          const auto& shc = human_centers[specs[k].human_slot];
          const double reach = max_corner_reach(shc[0], shc[1]);
          bool ok = false;
          for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
            const double rr = rng.uniform(kTailStart + 0.01, reach);
            const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            px = shc[0] + rr * std::cos(theta);
            py = shc[1] + rr * std::sin(theta);
            ok = in_region(px, py);
          }
          if (!ok) {
            // Walk toward the farthest corner; by convexity every radius up
            // to the reach stays inside the region.
            double bx = kMinCenter, by = kMinCenter, best = -1.0;
            for (double x : {kMinCenter, kMaxCenter}) {
              for (double y : {kMinCenter, kMaxCenter}) {
                const double d = std::hypot(x - shc[0], y - shc[1]);
                if (d > best) {
                  best = d;
                  bx = x;
                  by = y;
                }
              }
            }
            const double rr = rng.uniform(kTailStart + 0.01, reach);
            px = shc[0] + rr * (bx - shc[0]) / best;
            py = shc[1] + rr * (by - shc[1]) / best;
          }
          const std::vector<int> pool = blocked_classes(table, specs[k].verbs);
          if (!pool.empty()) {
            t.context_of = k;
            t.class_id = pool[rng.uniform_int(pool.size())];
          } else {
            t.class_id = 1 + static_cast<int>(rng.uniform_int(cfg.num_object_classes));
          }
        } else {
          const int dv = distant_sorted[rng.uniform_int(distant_sorted.size())];
          const auto& hc = human_centers[rng.uniform_int(num_humans)];
          px = clamp(hc[0] + 0.08 * rng.normal(), kMinCenter, kMaxCenter);
          py = clamp(hc[1] + 0.08 * rng.normal(), kMinCenter, kMaxCenter);
          const std::vector<int> pool = blocked_classes(table, {dv});
          if (!pool.empty()) {
            t.decoy_verb = dv;
            t.class_id = pool[rng.uniform_int(pool.size())];
          } else {
            t.class_id = 1 + static_cast<int>(rng.uniform_int(cfg.num_object_classes));
          }
        }
      } else {
        t.class_id = 1 + static_cast<int>(rng.uniform_int(cfg.num_object_classes));
        const auto& hc = human_centers[rng.uniform_int(num_humans)];
        if (rng.uniform() < 0.5) {
          px = clamp(hc[0] + 0.08 * rng.normal(), kMinCenter, kMaxCenter);
          py = clamp(hc[1] + 0.08 * rng.normal(), kMinCenter, kMaxCenter);
        } else {
          px = rng.uniform(kMinCenter, kMaxCenter);
          py = rng.uniform(kMinCenter, kMaxCenter);
        }
      }
      t.gt_box = box_around(px, py, rng.uniform(0.06, 0.18), rng.uniform(0.06, 0.18));
      drafts.push_back(t);
    }

    for (const DraftToken& dt : drafts) {
      Token t;
      t.class_id = dt.class_id;
      t.is_human = dt.is_human;
      t.box = quantize_box(jitter_box(dt.gt_box, rng));
      t.score = quantize9(rng.uniform(0.3, 1.0));
      // Appearance carries class and verb evidence only; geometry reaches
      // the model through the boxes, not through feature dimensions.
      t.feature = protos[dt.class_id];
      add_scaled(t.feature, gaussian_vector(rng, cfg.feature_dim, 1.0), kFeatureNoise);
      if (dt.interaction >= 0) {
        const InteractionSpec& sp = specs[dt.interaction];
        const double fade = std::min(sp.r / kMaxPairDistance, 1.0);
        // Linear fade: the direct verb readout weakens with range but stays
        // above the noise floor deep into the tail, so far pairs are hard
        // rather than hopeless and reward extra attention out there.
        const double amp = kSignalBase * (1.0 - kSignalFade * fade);
        for (int v : sp.verbs) add_scaled(t.feature, sigs[v], amp);
        add_scaled(t.feature, gaussian_vector(rng, cfg.feature_dim, 1.0), kFarNoise * fade);
        if (sp.is_conflict) add_scaled(t.feature, protos[dt.class_id], kSalienceBoost);
      }
      if (dt.echo_of >= 0) {
        // Echoes are salient same-class clutter without verb evidence; they
        // reward attention that looks past the near field.
        add_scaled(t.feature, protos[dt.class_id], kSalienceBoost);
      }
      if (dt.context_of >= 0) {
        for (int v : specs[dt.context_of].verbs)
          if (is_distant(v)) add_scaled(t.feature, sigs[v], kContextSignal);
      }
      if (dt.decoy_verb >= 0) add_scaled(t.feature, sigs[dt.decoy_verb], kContextSignal);
      scene.tokens.push_back(std::move(t));
    }

    rng.shuffle(scene.tokens);

    scene.global_feature.assign(cfg.feature_dim, 0.0);
    for (const Token& t : scene.tokens) add_scaled(scene.global_feature, t.feature, 1.0);
    const double inv = 1.0 / static_cast<double>(scene.tokens.size());
    for (double& x : scene.global_feature) x *= inv;
    add_scaled(scene.global_feature, gaussian_vector(rng, cfg.feature_dim, 1.0), kGlobalNoise);

    for (std::size_t k = 0; k < specs.size(); ++k) {
      GtTriplet g;
      g.human_box = quantize_box(drafts[specs[k].human_slot].gt_box);
      g.object_box = quantize_box(drafts[num_humans + k].gt_box);
      g.object_class = specs[k].object_class;
      g.verb_ids = specs[k].verbs;
      scene.ground_truth.push_back(std::move(g));
    }

    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace hoi

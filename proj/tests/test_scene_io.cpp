#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "hoi/geometry.hpp"
#include "hoi/scene.hpp"

using namespace hoi;

namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.num_scenes = 40;
  cfg.tokens_min = 5;
  cfg.tokens_max = 9;
  cfg.feature_dim = 16;
  cfg.num_verbs = 10;
  cfg.num_object_classes = 6;
  cfg.distant_verbs = {7, 9};
  cfg.seed = 11;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("quantize9 is idempotent and keeps short decimals exact") {
  CHECK(quantize9(0.1) == 0.1);
  CHECK(quantize9(0.25) == 0.25);
  CHECK(quantize9(1.0) == 1.0);
  const double q = quantize9(1.0 / 3.0);
  CHECK(q == quantize9(q));
  CHECK(q == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(quantize9(-0.123456789123) == quantize9(quantize9(-0.123456789123)));
}

TEST_CASE("scene save and load round-trips exactly") {
  const SynthConfig cfg = small_config();
  const std::vector<Scene> scenes = generate_scenes(cfg);
  REQUIRE(scenes.size() == cfg.num_scenes);
  const std::string path = "tmp_scene_roundtrip.jsonl";
  save_scenes(scenes, path);
  const std::vector<Scene> loaded = load_scenes(path);
  REQUIRE(loaded.size() == scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) CHECK(loaded[i] == scenes[i]);
  std::remove(path.c_str());
}

TEST_CASE("loader skips blank lines and reports the failing line") {
  const std::string path = "tmp_scene_bad.jsonl";
  write_text(path,
             "\n"
             "   \n"
             "{not json\n");
  CHECK_THROWS_WITH_AS(load_scenes(path), doctest::Contains("line 3"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("loader rejects inconsistent records") {
  const std::string path = "tmp_scene_invalid.jsonl";
  const std::string base_tokens =
      R"("tokens":[{"feature":[0.0,0.0],"box":[0.1,0.1,0.4,0.4],"score":%s,"class_id":%s,"is_human":%s}])";
  auto scene_line = [&](const std::string& score, const std::string& cls,
                        const std::string& is_human, const std::string& gt) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), base_tokens.c_str(), score.c_str(), cls.c_str(),
                  is_human.c_str());
    return std::string(R"({"id":"s","global_feature":[0.0,0.0],)") + buf + R"(,"gt":)" + gt +
           "}\n";
  };

  write_text(path, scene_line("1.4", "0", "true", "[]"));
  CHECK_THROWS_WITH_AS(load_scenes(path), doctest::Contains("score"), std::runtime_error);

  write_text(path, scene_line("0.5", "3", "true", "[]"));
  CHECK_THROWS_WITH_AS(load_scenes(path), doctest::Contains("is_human"), std::runtime_error);

  write_text(path, scene_line("0.5", "0", "false", "[]"));
  CHECK_THROWS_WITH_AS(load_scenes(path), doctest::Contains("is_human"), std::runtime_error);

  // Feature width must match the scene's global feature.
  write_text(path,
             R"({"id":"s","global_feature":[0.0,0.0,0.0],"tokens":[{"feature":[0.0],)"
             R"("box":[0.1,0.1,0.4,0.4],"score":0.5,"class_id":1,"is_human":false}],"gt":[]})");
  CHECK_THROWS_WITH_AS(load_scenes(path), doctest::Contains("dimension"), std::runtime_error);

  // Degenerate box.
  write_text(path, scene_line("0.5", "1", "false",
                              R"([{"hbox":[0.5,0.1,0.5,0.4],"obox":[0.1,0.1,0.4,0.4],)"
                              R"("object_class":1,"verbs":[0]}])"));
  CHECK_THROWS_WITH_AS(load_scenes(path), doctest::Contains("box"), std::runtime_error);

  // Empty verb set.
  write_text(path, scene_line("0.5", "1", "false",
                              R"([{"hbox":[0.5,0.1,0.8,0.4],"obox":[0.1,0.1,0.4,0.4],)"
                              R"("object_class":1,"verbs":[]}])"));
  CHECK_THROWS_WITH_AS(load_scenes(path), doctest::Contains("verbs"), std::runtime_error);

  std::remove(path.c_str());
}

TEST_CASE("feasibility table round-trips and rejects unknown classes") {
  FeasibilityTable table;
  table[0] = {1, 3};
  table[2] = {0, 5, 7};
  const std::string path = "tmp_feas.json";
  save_feasibility(table, path);
  const FeasibilityTable loaded = load_feasibility(path);
  CHECK(loaded == table);
  CHECK(feasible_verbs(loaded, 2) == std::set<int>{0, 5, 7});
  CHECK_THROWS_AS(feasible_verbs(loaded, 1), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("make_feasibility spreads close and distant verbs deterministically") {
  SynthConfig cfg = small_config();
  const FeasibilityTable table = make_feasibility(cfg);
  // close = {0,1,2,3,4,5,6,8}; class k gets close[2k], close[2k+1] (mod 8)
  // and distant[k], distant[k+1] (mod 2) of {7,9}.
  REQUIRE(table.size() == cfg.num_object_classes + 1);
  CHECK(table.at(0) == std::set<int>{0, 1, 7, 9});
  CHECK(table.at(1) == std::set<int>{2, 3, 7, 9});
  CHECK(table.at(3) == std::set<int>{6, 7, 8, 9});
  // Every verb is feasible somewhere.
  std::set<int> all;
  for (const auto& [cls, verbs] : table) all.insert(verbs.begin(), verbs.end());
  CHECK(all == std::set<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("generation is deterministic in the seed") {
  const SynthConfig cfg = small_config();
  const std::vector<Scene> a = generate_scenes(cfg);
  const std::vector<Scene> b = generate_scenes(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  SynthConfig other = cfg;
  other.seed = 12;
  const std::vector<Scene> c = generate_scenes(other);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size() && !any_diff; ++i) any_diff = !(a[i] == c[i]);
  CHECK(any_diff);
}

TEST_CASE("generated scenes satisfy the structural invariants") {
  SynthConfig cfg = small_config();
  cfg.num_scenes = 200;
  const FeasibilityTable table = make_feasibility(cfg);
  const std::vector<Scene> scenes = generate_scenes(cfg);
  validate_scenes(scenes, table, static_cast<int>(cfg.num_verbs));

  std::set<std::string> ids;
  for (const Scene& s : scenes) {
    ids.insert(s.id);
    REQUIRE(s.tokens.size() >= cfg.tokens_min);
    REQUIRE(s.tokens.size() <= cfg.tokens_max);
    REQUIRE(s.global_feature.size() == cfg.feature_dim);
    std::size_t humans = 0;
    for (const Token& t : s.tokens) {
      CHECK(box_is_valid(t.box));
      CHECK(t.score >= 0.3);
      CHECK(t.score <= 1.0);
      CHECK(t.class_id >= 0);
      CHECK(t.class_id <= static_cast<int>(cfg.num_object_classes));
      CHECK(t.is_human == (t.class_id == kPersonClassId));
      CHECK(t.feature.size() == cfg.feature_dim);
      humans += t.is_human ? 1 : 0;
    }
    CHECK(humans >= 1);
    CHECK(humans <= 2);
    REQUIRE(!s.ground_truth.empty());
    // Up to three base interactions plus one near counterpart each.
    CHECK(s.ground_truth.size() <= 6);
    for (const GtTriplet& g : s.ground_truth) {
      CHECK(box_is_valid(g.human_box));
      CHECK(box_is_valid(g.object_box));
      CHECK(g.object_class >= 1);
      CHECK(std::is_sorted(g.verb_ids.begin(), g.verb_ids.end()));
    }
  }
  CHECK(ids.size() == scenes.size());
}

TEST_CASE("distant verbs force the pair beyond the far boundary") {
  SynthConfig cfg = small_config();
  cfg.num_scenes = 300;
  cfg.seed = 5;
  const std::vector<Scene> scenes = generate_scenes(cfg);

  std::size_t distant_pairs = 0;
  double close_sum = 0.0, distant_sum = 0.0;
  std::size_t close_count = 0;
  for (const Scene& s : scenes) {
    for (const GtTriplet& g : s.ground_truth) {
      const double dist = center_distance(g.human_box, g.object_box);
      CHECK(dist <= 0.85 + 1e-6);
      bool has_distant = false;
      for (int v : g.verb_ids) has_distant |= (v == 7 || v == 9);
      if (has_distant) {
        CHECK(dist > 0.5);
        distant_sum += dist;
        ++distant_pairs;
      } else {
        close_sum += dist;
        ++close_count;
      }
    }
  }
  REQUIRE(distant_pairs > 20);
  REQUIRE(close_count > 20);
  CHECK(distant_sum / static_cast<double>(distant_pairs) >
        close_sum / static_cast<double>(close_count));
}

TEST_CASE("pair distances concentrate near zero under the cubic law") {
  SynthConfig cfg = small_config();
  cfg.num_scenes = 1200;
  cfg.distant_verbs.clear();  // pure r = r_max * u^3 law
  cfg.seed = 17;
  const std::vector<Scene> scenes = generate_scenes(cfg);

  constexpr double kWidth = 0.05;
  std::vector<std::size_t> counts(20, 0);
  std::size_t total = 0;
  for (const Scene& s : scenes) {
    for (const GtTriplet& g : s.ground_truth) {
      const double dist = center_distance(g.human_box, g.object_box);
      const std::size_t bin = std::min<std::size_t>(counts.size() - 1,
                                                    static_cast<std::size_t>(dist / kWidth));
      ++counts[bin];
      ++total;
    }
  }
  REQUIRE(total > 1500);
  // The first band dominates under the cubic concentration.
  const std::size_t modal =
      static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  CHECK(modal == 0);
  CHECK(counts[0] > total / 3);
  // Beyond the modal band the histogram decays, up to sampling noise.
  for (std::size_t k = modal; k + 1 < counts.size(); ++k) {
    const double slack =
        3.0 * std::sqrt(static_cast<double>(counts[k] + counts[k + 1] + 1));
    CHECK(static_cast<double>(counts[k + 1]) <=
          static_cast<double>(counts[k]) + slack);
  }
}

TEST_CASE("validate_scenes rejects unknown classes and infeasible verbs") {
  SynthConfig cfg = small_config();
  cfg.num_scenes = 3;
  const FeasibilityTable table = make_feasibility(cfg);
  std::vector<Scene> scenes = generate_scenes(cfg);

  std::vector<Scene> unknown_class = scenes;
  unknown_class[0].tokens[0].class_id = 99;
  unknown_class[0].tokens[0].is_human = false;
  CHECK_THROWS_WITH_AS(validate_scenes(unknown_class, table, 10),
                       doctest::Contains("missing from feasibility"), std::runtime_error);

  std::vector<Scene> big_verb = scenes;
  big_verb[1].ground_truth[0].verb_ids = {42};
  CHECK_THROWS_WITH_AS(validate_scenes(big_verb, table, 10),
                       doctest::Contains("outside configured range"), std::runtime_error);

  // Pick a verb that exists globally but is not feasible for this class.
  std::vector<Scene> infeasible = scenes;
  GtTriplet& g = infeasible[2].ground_truth[0];
  const std::set<int>& fv = feasible_verbs(table, g.object_class);
  int bad = -1;
  for (int v = 0; v < 10; ++v)
    if (!fv.count(v)) bad = v;
  REQUIRE(bad >= 0);
  g.verb_ids = {bad};
  CHECK_THROWS_WITH_AS(validate_scenes(infeasible, table, 10),
                       doctest::Contains("not feasible"), std::runtime_error);
}

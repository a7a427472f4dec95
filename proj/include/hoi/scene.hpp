#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hoi/geometry.hpp"

namespace hoi {

/// Class id reserved for people. Tokens with this class are the human side of
/// candidate pairs; every other id is an object class.
inline constexpr int kPersonClassId = 0;

/// One detection token: appearance feature, box, detector confidence, class.
struct Token {
  std::vector<double> feature;
  Box box;
  double score = 0.0;
  int class_id = 0;
  bool is_human = false;
};

/// Ground-truth interaction: a human box, an object box, the object class and
/// the set of verbs that hold for the pair. verb_ids is sorted and unique.
struct GtTriplet {
  Box human_box;
  Box object_box;
  int object_class = 0;
  std::vector<int> verb_ids;
};

struct Scene {
  std::string id;
  std::vector<Token> tokens;
  std::vector<double> global_feature;
  std::vector<GtTriplet> ground_truth;
};

bool operator==(const Token& a, const Token& b);
bool operator==(const GtTriplet& a, const GtTriplet& b);
bool operator==(const Scene& a, const Scene& b);

/// Object class id -> verbs that may co-occur with it.
using FeasibilityTable = std::map<int, std::set<int>>;

/// Throws when the class is missing from the table.
const std::set<int>& feasible_verbs(const FeasibilityTable& table, int object_class);

std::vector<Scene> load_scenes(const std::string& path);
void save_scenes(const std::vector<Scene>& scenes, const std::string& path);
FeasibilityTable load_feasibility(const std::string& path);
void save_feasibility(const FeasibilityTable& table, const std::string& path);

/// Throws when a ground-truth verb is not feasible for its object class or a
/// class/verb id falls outside the configured ranges.
void validate_scenes(const std::vector<Scene>& scenes, const FeasibilityTable& table,
                     int num_verbs);

/// Knobs of the synthetic scene sampler. Object classes are 1..num_object_classes,
/// people are kPersonClassId. Pair distances follow r = r_max * u^exponent, so
/// larger exponents concentrate mass near zero; ground-truth pairs whose verb
/// set contains a distant verb are re-drawn from the tail above 0.5.
struct SynthConfig {
  std::size_t num_scenes = 0;
  std::size_t tokens_min = 5;
  std::size_t tokens_max = 9;
  std::size_t feature_dim = 256;
  std::size_t num_verbs = 10;
  std::size_t num_object_classes = 6;
  double distance_exponent = 3.0;
  std::vector<int> distant_verbs;
  std::uint64_t seed = 1;
};

/// Deterministic class -> verb table derived from the config. Every class
/// (people included) gets a mix of close and distant verbs, and every verb id
/// below num_verbs appears for at least one class when enough classes exist.
FeasibilityTable make_feasibility(const SynthConfig& cfg);

std::vector<Scene> generate_scenes(const SynthConfig& cfg);

/// Round to 9 significant digits through the shortest decimal form, so that
/// serialized values reparse bit-for-bit.
double quantize9(double x);

}  // namespace hoi

#include "hoi/token_post.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace hoi {

namespace {
const std::deque<MemoryEntry> kEmptyBuffer;
}

ClassMemory::ClassMemory(std::size_t capacity, double min_score)
    : capacity_(capacity), min_score_(min_score) {
  if (capacity_ == 0) throw std::invalid_argument("ClassMemory: capacity must be positive");
}

void ClassMemory::update(const Token& token) {
  if (token.score < min_score_) return;
  std::deque<MemoryEntry>& buf = buffers_[token.class_id];
  buf.push_back({token.feature, token.score});
  if (buf.size() > capacity_) buf.pop_front();
}

bool ClassMemory::empty(int class_id) const {
  auto it = buffers_.find(class_id);
  return it == buffers_.end() || it->second.empty();
}

std::size_t ClassMemory::size(int class_id) const {
  auto it = buffers_.find(class_id);
  return it == buffers_.end() ? 0 : it->second.size();
}

const std::deque<MemoryEntry>& ClassMemory::buffer(int class_id) const {
  auto it = buffers_.find(class_id);
  return it == buffers_.end() ? kEmptyBuffer : it->second;
}

std::vector<std::size_t> ClassMemory::sample_indices(int class_id, std::size_t count,
                                                     Rng& rng) const {
  const std::deque<MemoryEntry>& buf = buffer(class_id);
  if (buf.size() <= count) {
    std::vector<std::size_t> all(buf.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  return rng.sample_without_replacement(buf.size(), count);
}

std::string ClassMemory::to_json() const {
  nlohmann::json j;
  j["capacity"] = capacity_;
  j["min_score"] = min_score_;
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [cls, buf] : buffers_) {
    nlohmann::json entries = nlohmann::json::array();
    for (const MemoryEntry& e : buf)
      entries.push_back({{"feature", e.feature}, {"score", e.score}});
    classes[std::to_string(cls)] = std::move(entries);
  }
  j["classes"] = std::move(classes);
  return j.dump();
}

ClassMemory ClassMemory::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ClassMemory m(j.at("capacity").get<std::size_t>(), j.at("min_score").get<double>());
  for (auto& [key, entries] : j.at("classes").items()) {
    const int cls = std::stoi(key);
    std::deque<MemoryEntry>& buf = m.buffers_[cls];
    for (const nlohmann::json& e : entries) {
      buf.push_back({e.at("feature").get<std::vector<double>>(), e.at("score").get<double>()});
      if (buf.size() > m.capacity_)
        throw std::runtime_error("ClassMemory: stored buffer exceeds capacity");
    }
  }
  return m;
}

nn::Tensor icd_diversify(const nn::Tensor& token_row, int class_id, const ClassMemory& memory,
                         std::size_t sample_count, const IcdWeights& w, Rng& rng) {
  using namespace nn;
  if (token_row.rows() != 1)
    throw std::invalid_argument("icd_diversify: expected a single token row");
  if (sample_count == 0) return token_row;
  const std::deque<MemoryEntry>& buf = memory.buffer(class_id);
  if (buf.empty()) return token_row;

  const std::size_t d = token_row.cols();
  const std::vector<std::size_t> picks = memory.sample_indices(class_id, sample_count, rng);
  Mat mem(picks.size(), d);
  for (std::size_t r = 0; r < picks.size(); ++r) {
    const MemoryEntry& e = buf[picks[r]];
    if (e.feature.size() != d)
      throw std::runtime_error("icd_diversify: memory feature width mismatch");
    for (std::size_t j = 0; j < d; ++j) mem(r, j) = e.feature[j];
  }
  Tensor keys = Tensor::constant(mem);  // no gradient into stored features

  Tensor q = matmul(token_row, w.wq);
  Tensor k = matmul(keys, w.wk);
  Tensor v = matmul(keys, w.wv);
  Tensor logits = scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(d)));
  Tensor weights = softmax_rows(logits);
  return add(token_row, matmul(weights, v));
}

nn::Tensor icd_apply_all(const nn::Tensor& tokens, const std::vector<Token>& meta,
                         const ClassMemory& memory, std::size_t sample_count,
                         const IcdWeights& w, Rng& rng) {
  using namespace nn;
  if (tokens.rows() != meta.size())
    throw std::invalid_argument("icd_apply_all: token count mismatch");
  std::vector<Tensor> rows;
  rows.reserve(meta.size());
  for (std::size_t i = 0; i < meta.size(); ++i) {
    Tensor row = gather_rows(tokens, {i});
    rows.push_back(icd_diversify(row, meta[i].class_id, memory, sample_count, w, rng));
  }
  return concat_rows(rows);
}

nn::Tensor spatial_fuse(const nn::Tensor& tokens, const Mat& relations,
                        const SpatialFusionWeights& w, nn::NnContext& ctx) {
  using namespace nn;
  if (relations.rows != tokens.rows())
    throw std::invalid_argument("spatial_fuse: relation row count mismatch");
  Tensor joined = concat_cols(tokens, Tensor::constant(relations));
  return ffn(joined, w.w1, w.b1, w.w2, w.b2, ctx);
}

}  // namespace hoi

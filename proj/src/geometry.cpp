#include "hoi/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace hoi {

namespace {

double safe_log(double x) { return std::log(std::max(x, 1e-6)); }

// Directed 16-entry pair block for (a, b). The full 24-wide block appends the
// first 8 entries of the swapped direction.
void directed_pair_features(const Box& a, const Box& b, double* out) {
  const auto ca = center(a);
  const auto cb = center(b);
  const double dx = cb[0] - ca[0];
  const double dy = cb[1] - ca[1];
  const double dist = std::sqrt(dx * dx + dy * dy);
  const double inter = intersection_area(a, b);
  const Box ub = union_box(a, b);
  out[0] = dx;
  out[1] = dy;
  out[2] = dist;
  out[3] = iou(a, b);
  out[4] = inter / a.area();
  out[5] = inter / b.area();
  out[6] = safe_log(a.width() / b.width());
  out[7] = safe_log(a.height() / b.height());
  out[8] = safe_log(a.area() / b.area());
  out[9] = dist > 0.0 ? dy / dist : 0.0;
  out[10] = dist > 0.0 ? dx / dist : 0.0;
  out[11] = ub.width();
  out[12] = ub.height();
  out[13] = ub.area();
  out[14] = dx / a.width();
  out[15] = dy / a.height();
}

}  // namespace

bool box_is_valid(const Box& b) {
  return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
         std::isfinite(b.y2) && b.x1 >= 0.0 && b.y1 >= 0.0 && b.x2 <= 1.0 &&
         b.y2 <= 1.0 && b.x1 < b.x2 && b.y1 < b.y2;
}

std::array<double, 2> center(const Box& b) {
  return {0.5 * (b.x1 + b.x2), 0.5 * (b.y1 + b.y2)};
}

double intersection_area(const Box& a, const Box& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Box union_box(const Box& a, const Box& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
          std::max(a.y2, b.y2)};
}

double center_distance(const Box& a, const Box& b) {
  const auto ca = center(a);
  const auto cb = center(b);
  const double dx = cb[0] - ca[0];
  const double dy = cb[1] - ca[1];
  return std::sqrt(dx * dx + dy * dy);
}

DistanceMatrix pairwise_distances(const std::vector<Box>& boxes) {
  if (boxes.empty()) throw std::invalid_argument("pairwise_distances: no boxes");
  const std::size_t n = boxes.size();
  DistanceMatrix d;
  d.n = n;
  d.entries = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = center_distance(boxes[i], boxes[j]);
      d.entries(i, j) = v;
      d.entries(j, i) = v;
    }
  }
  return d;
}

std::vector<double> spatial_relation(std::size_t i, const std::vector<Box>& boxes) {
  if (i >= boxes.size()) throw std::invalid_argument("spatial_relation: index out of range");
  const Box& b = boxes[i];
  std::vector<double> out(kSpatialRelationDim, 0.0);
  const auto c = center(b);
  out[0] = c[0];
  out[1] = c[1];
  out[2] = b.width();
  out[3] = b.height();
  out[4] = b.area();
  out[5] = b.width() / b.height();
  out[6] = safe_log(b.width());
  out[7] = safe_log(b.height());
  out[8] = b.x1;
  out[9] = b.y1;
  out[10] = b.x2;
  out[11] = b.y2;

  if (boxes.size() < 2) return out;  // pooled pair block stays zero

  double block[kPairBlockDim];
  double fwd[16];
  double rev[16];
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    if (j == i) continue;
    directed_pair_features(b, boxes[j], fwd);
    directed_pair_features(boxes[j], b, rev);
    for (std::size_t k = 0; k < 16; ++k) block[k] = fwd[k];
    for (std::size_t k = 0; k < 8; ++k) block[16 + k] = rev[k];
    for (std::size_t k = 0; k < kPairBlockDim; ++k)
      out[kSelfFeatureDim + k] += block[k];
  }
  const double inv = 1.0 / static_cast<double>(boxes.size() - 1);
  for (std::size_t k = 0; k < kPairBlockDim; ++k) out[kSelfFeatureDim + k] *= inv;
  return out;
}

Mat spatial_relation_all(const std::vector<Box>& boxes) {
  Mat out(boxes.size(), kSpatialRelationDim);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto r = spatial_relation(i, boxes);
    for (std::size_t k = 0; k < kSpatialRelationDim; ++k) out(i, k) = r[k];
  }
  return out;
}

}  // namespace hoi

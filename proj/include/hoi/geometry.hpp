#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hoi/mat.hpp"

namespace hoi {

/// Axis-aligned box in normalized image coordinates, corners (x1,y1)-(x2,y2)
/// with 0 <= x1 < x2 <= 1 and 0 <= y1 < y2 <= 1.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
};

bool box_is_valid(const Box& b);
std::array<double, 2> center(const Box& b);
double intersection_area(const Box& a, const Box& b);
double iou(const Box& a, const Box& b);
Box union_box(const Box& a, const Box& b);

/// Euclidean distance between box centers.
double center_distance(const Box& a, const Box& b);

/// Pairwise center distances. Symmetric, zero diagonal; entries never exceed
/// sqrt(2) for valid normalized boxes.
struct DistanceMatrix {
  std::size_t n = 0;
  Mat entries;
};

DistanceMatrix pairwise_distances(const std::vector<Box>& boxes);

inline constexpr std::size_t kSelfFeatureDim = 12;
inline constexpr std::size_t kPairBlockDim = 24;
inline constexpr std::size_t kSpatialRelationDim = kSelfFeatureDim + kPairBlockDim;

/// Spatial descriptor of box i against the rest of the scene: 12 features of
/// the box itself followed by the mean over j != i of a 24-wide pairwise
/// block. With a single box the pooled block is zero.
std::vector<double> spatial_relation(std::size_t i, const std::vector<Box>& boxes);

/// All spatial descriptors stacked into an n x 36 matrix.
Mat spatial_relation_all(const std::vector<Box>& boxes);

}  // namespace hoi

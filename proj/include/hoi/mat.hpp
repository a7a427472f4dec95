#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace hoi {

/// Dense row-major matrix of doubles. Row vectors are shaped 1 x n.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), a(r * c, fill) {}

  static Mat row(std::initializer_list<double> xs) {
    Mat m(1, xs.size());
    std::size_t j = 0;
    for (double x : xs) m.a[j++] = x;
    return m;
  }

  static Mat from_row(const std::vector<double>& xs) {
    Mat m(1, xs.size());
    m.a = xs;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  std::size_t size() const { return a.size(); }
  bool empty() const { return a.empty(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
  void fill(double v) { std::fill(a.begin(), a.end(), v); }
};

Mat matmul(const Mat& x, const Mat& y);
Mat transposed(const Mat& x);
bool all_finite(const Mat& x);
double frobenius_norm(const Mat& x);

}  // namespace hoi

#include "hoi/mat.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hoi {

Mat matmul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) {
    throw std::invalid_argument("matmul: shape mismatch " + std::to_string(x.rows) +
                                "x" + std::to_string(x.cols) + " * " +
                                std::to_string(y.rows) + "x" + std::to_string(y.cols));
  }
  Mat out(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t k = 0; k < x.cols; ++k) {
      double xik = x(i, k);
      if (xik == 0.0) continue;
      const double* yrow = &y.a[k * y.cols];
      double* orow = &out.a[i * out.cols];
      for (std::size_t j = 0; j < y.cols; ++j) orow[j] += xik * yrow[j];
    }
  }
  return out;
}

Mat transposed(const Mat& x) {
  Mat out(x.cols, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  return out;
}

bool all_finite(const Mat& x) {
  for (double v : x.a)
    if (!std::isfinite(v)) return false;
  return true;
}

double frobenius_norm(const Mat& x) {
  double s = 0.0;
  for (double v : x.a) s += v * v;
  return std::sqrt(s);
}

}  // namespace hoi

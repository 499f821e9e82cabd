#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hemcnn {

// Dense row-major matrix of doubles. Rows are channels, columns time steps
// almost everywhere in this library.
struct Tensor2 {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor2() = default;
  Tensor2(int r, int c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {
    if (r < 0 || c < 0) throw std::invalid_argument("Tensor2: negative shape");
  }

  double& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  std::size_t size() const { return v.size(); }

  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

inline void require_shape(const Tensor2& t, int rows, int cols, const std::string& what) {
  if (t.rows != rows || t.cols != cols) {
    throw std::invalid_argument(what + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(t.rows) + "x" +
                                std::to_string(t.cols));
  }
}

}  // namespace hemcnn

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hemcnn {

// Solves A x = b for a small dense n x n system (row-major A) by Gaussian
// elimination with partial pivoting. A and b are taken by value; sizes here
// are at most ~13x13 (GLM normal equations, hierarchical PCA moments).
inline std::vector<double> solve_linear(std::vector<double> A, std::vector<double> b) {
  const std::size_t n = b.size();
  if (A.size() != n * n) throw std::invalid_argument("solve_linear: A must be n x n");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[pivot * n + col])) pivot = r;
    if (A[pivot * n + col] == 0.0)
      throw std::runtime_error("solve_linear: singular system");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    const double d = A[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r * n + col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= A[ri * n + c] * x[c];
    x[ri] = acc / A[ri * n + ri];
  }
  return x;
}

}  // namespace hemcnn

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/hrf.hpp"
#include "hemcnn/tensor.hpp"

namespace hemcnn {

// GLM design: five boxcar regressors, one per contiguous fifth of the trial
// window, each convolved with the canonical HRF. The five betas then form a
// chronologically ordered coarse description of the channel's time course.
struct DesignMatrix {
  Tensor2 d;                         // n_samples x 5
  std::vector<int> segment_starts;   // onset sample of each fifth (6 entries incl. end)
};

// The HRF is discretized at sample midpoints and normalized to unit sum, so
// convolution preserves the boxcar amplitude scale and a very short HRF
// degenerates to the identity.
inline std::vector<double> hrf_kernel(double fs, const HrfParams& p) {
  p.validate();
  const int len = std::max<int>(1, static_cast<int>(std::llround(p.duration * fs)));
  const double dt = 1.0 / fs;
  std::vector<double> k(len);
  double sum = 0.0;
  for (int j = 0; j < len; ++j) {
    k[j] = canonical_hrf((j + 0.5) * dt, p) * dt;
    sum += k[j];
  }
  if (!(sum > 0.0)) throw std::runtime_error("hrf_kernel: kernel sums to zero");
  for (double& v : k) v /= sum;
  return k;
}

inline DesignMatrix build_design(int n_samples, double fs, const HrfParams& p) {
  if (n_samples < 10) throw std::invalid_argument("build_design: need >= 10 samples");
  const std::vector<double> kern = hrf_kernel(fs, p);

  DesignMatrix dm;
  dm.d = Tensor2(n_samples, 5);
  for (int seg = 0; seg <= 5; ++seg)
    dm.segment_starts.push_back(static_cast<int>(
        std::floor(static_cast<double>(seg) * n_samples / 5.0 + 1e-9)));

  for (int seg = 0; seg < 5; ++seg) {
    const int lo = dm.segment_starts[seg];
    const int hi = dm.segment_starts[seg + 1];
    for (int t = 0; t < n_samples; ++t) {
      double acc = 0.0;
      for (int j = 0; j < static_cast<int>(kern.size()); ++j) {
        const int src = t - j;
        if (src < lo) break;  // kernel is causal; sources before the segment contribute 0
        if (src < hi) acc += kern[j];
      }
      dm.d(t, seg) = acc;
    }
  }

  // Full column rank check via the pivots of the 5x5 Gram matrix.
  double gram[5][5];
  double trace = 0.0;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      double s = 0.0;
      for (int t = 0; t < n_samples; ++t) s += dm.d(t, a) * dm.d(t, b);
      gram[a][b] = s;
    }
    trace += gram[a][a];
  }
  for (int col = 0; col < 5; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::fabs(gram[r][col]) > std::fabs(gram[pivot][col])) pivot = r;
    if (std::fabs(gram[pivot][col]) < 1e-12 * std::max(trace, 1.0))
      throw std::runtime_error("build_design: design matrix is rank deficient");
    if (pivot != col)
      for (int c = 0; c < 5; ++c) std::swap(gram[col][c], gram[pivot][c]);
    for (int r = col + 1; r < 5; ++r) {
      const double f = gram[r][col] / gram[col][col];
      for (int c = col; c < 5; ++c) gram[r][c] -= f * gram[col][c];
    }
  }
  return dm;
}

}  // namespace hemcnn

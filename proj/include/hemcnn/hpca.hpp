#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/glm.hpp"

namespace hemcnn {

// Two-stage hierarchical PCA over GLM features:
//   step 1: per (channel, beta index), the (HbO, HbR) 2-vector across training
//           examples is projected onto its first principal direction -> 120;
//   step 2: per (hemisphere, beta index), the 12-channel vector is projected
//           onto its first principal direction -> 10.
// Directions come from the uncentered second-moment matrix (these features
// are deviations already; centering would reintroduce a train-set offset),
// and each direction's largest-magnitude loading is made positive so fits
// are sign-deterministic. Fit on training data only; applied unchanged
// elsewhere.
struct HpcaProjection {
  std::vector<std::array<double, 2>> step1;  // 120 = 24 channels x 5 betas
  std::vector<std::array<double, 12>> step2; // 10 = 2 hemispheres x 5 betas
  bool degenerate = false;                   // any zero-variance fallback taken
};

namespace detail {

template <std::size_t N>
inline void fix_sign(std::array<double, N>& dir) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (std::fabs(dir[i]) > std::fabs(dir[imax])) imax = i;
  if (dir[imax] < 0.0)
    for (double& d : dir) d = -d;
}

// First principal direction of a 2x2 symmetric second-moment matrix
// [[p, q], [q, r]], in closed form.
inline std::array<double, 2> principal_dir_2x2(double p, double q, double r, bool& degenerate) {
  if (p == 0.0 && q == 0.0 && r == 0.0) {
    degenerate = true;
    return {1.0, 0.0};
  }
  std::array<double, 2> dir;
  if (q == 0.0) {
    dir = p >= r ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
  } else {
    const double lmax = 0.5 * ((p + r) + std::sqrt((p - r) * (p - r) + 4.0 * q * q));
    dir = {lmax - r, q};
    const double norm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1]);
    dir[0] /= norm;
    dir[1] /= norm;
  }
  fix_sign(dir);
  return dir;
}

// Top eigenvector of a small symmetric PSD matrix by power iteration,
// started from the largest-norm column.
template <std::size_t N>
inline std::array<double, N> principal_dir_power(const std::array<std::array<double, N>, N>& m,
                                                 bool& degenerate) {
  double best_norm = 0.0;
  std::array<double, N> x{};
  for (std::size_t c = 0; c < N; ++c) {
    double norm = 0.0;
    for (std::size_t r = 0; r < N; ++r) norm += m[r][c] * m[r][c];
    if (norm > best_norm) {
      best_norm = norm;
      for (std::size_t r = 0; r < N; ++r) x[r] = m[r][c];
    }
  }
  if (best_norm == 0.0) {
    degenerate = true;
    x.fill(0.0);
    x[0] = 1.0;
    return x;
  }
  double invn = 1.0 / std::sqrt(best_norm);
  for (double& v : x) v *= invn;
  for (int iter = 0; iter < 500; ++iter) {
    std::array<double, N> y{};
    for (std::size_t r = 0; r < N; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < N; ++c) s += m[r][c] * x[c];
      y[r] = s;
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      degenerate = true;
      x.fill(0.0);
      x[0] = 1.0;
      return x;
    }
    double delta = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
      y[r] /= norm;
      delta = std::max(delta, std::fabs(std::fabs(y[r]) - std::fabs(x[r])));
    }
    x = y;
    if (delta < 1e-14) break;
  }
  fix_sign(x);
  return x;
}

}  // namespace detail

// Projects one GLM feature vector through fitted step-1 directions -> 120
// values ordered channel-major ((channel position, beta) -> 5c + b).
inline std::vector<double> hpca_step1_apply(const HpcaProjection& proj,
                                            const std::vector<double>& glm240) {
  if (glm240.size() != 240)
    throw std::invalid_argument("hpca: expected a 240-dim GLM feature vector");
  std::vector<double> out(120);
  for (int c = 0; c < 24; ++c) {
    for (int b = 0; b < 5; ++b) {
      const double hbo = glm240[static_cast<std::size_t>(5) * (2 * c) + b];
      const double hbr = glm240[static_cast<std::size_t>(5) * (2 * c + 1) + b];
      const auto& dir = proj.step1[static_cast<std::size_t>(5) * c + b];
      out[static_cast<std::size_t>(5) * c + b] = dir[0] * hbo + dir[1] * hbr;
    }
  }
  return out;
}

inline HpcaProjection hpca_fit(const std::vector<FeatureVector>& train) {
  if (train.size() < 2) throw std::invalid_argument("hpca_fit: need >= 2 training vectors");
  for (const auto& fv : train)
    if (fv.kind != FeatureKind::GLM || fv.values.size() != 240)
      throw std::invalid_argument("hpca_fit: inputs must be 240-dim GLM features");

  HpcaProjection proj;
  proj.step1.resize(120);
  const double inv_n = 1.0 / static_cast<double>(train.size());

  for (int c = 0; c < 24; ++c) {
    for (int b = 0; b < 5; ++b) {
      double p = 0.0, q = 0.0, r = 0.0;
      for (const auto& fv : train) {
        const double hbo = fv.values[static_cast<std::size_t>(5) * (2 * c) + b];
        const double hbr = fv.values[static_cast<std::size_t>(5) * (2 * c + 1) + b];
        p += hbo * hbo;
        q += hbo * hbr;
        r += hbr * hbr;
      }
      proj.step1[static_cast<std::size_t>(5) * c + b] =
          detail::principal_dir_2x2(p * inv_n, q * inv_n, r * inv_n, proj.degenerate);
    }
  }

  // Step 2 operates on step-1 projections of the same training set.
  std::vector<std::vector<double>> s1;
  s1.reserve(train.size());
  for (const auto& fv : train) s1.push_back(hpca_step1_apply(proj, fv.values));

  proj.step2.resize(10);
  for (int h = 0; h < 2; ++h) {
    for (int b = 0; b < 5; ++b) {
      std::array<std::array<double, 12>, 12> m{};
      for (const auto& v : s1) {
        std::array<double, 12> u;
        for (int c = 0; c < 12; ++c)
          u[c] = v[static_cast<std::size_t>(5) * (h * 12 + c) + b];
        for (int a = 0; a < 12; ++a)
          for (int bb = 0; bb < 12; ++bb) m[a][bb] += u[a] * u[bb] * inv_n;
      }
      proj.step2[static_cast<std::size_t>(5) * h + b] =
          detail::principal_dir_power<12>(m, proj.degenerate);
    }
  }
  return proj;
}

// 10-dim projection: left hemisphere betas 0..4, then right hemisphere.
inline FeatureVector hpca_apply(const HpcaProjection& proj, const FeatureVector& glm_fv) {
  if (glm_fv.kind != FeatureKind::GLM)
    throw std::invalid_argument("hpca_apply: input must be a GLM feature vector");
  const std::vector<double> s1 = hpca_step1_apply(proj, glm_fv.values);
  FeatureVector out;
  out.kind = FeatureKind::GLMhPCA;
  out.values.resize(10);
  for (int h = 0; h < 2; ++h) {
    for (int b = 0; b < 5; ++b) {
      const auto& dir = proj.step2[static_cast<std::size_t>(5) * h + b];
      double s = 0.0;
      for (int c = 0; c < 12; ++c)
        s += dir[c] * s1[static_cast<std::size_t>(5) * (h * 12 + c) + b];
      out.values[static_cast<std::size_t>(5) * h + b] = s;
    }
  }
  out.check();
  return out;
}

}  // namespace hemcnn

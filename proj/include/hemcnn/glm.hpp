#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/design.hpp"
#include "hemcnn/linalg.hpp"
#include "hemcnn/trial.hpp"

namespace hemcnn {

enum class FeatureKind { GLM, GLMhPCA, LI, DeltaHb };

inline int feature_dim(FeatureKind k) {
  switch (k) {
    case FeatureKind::GLM: return 240;
    case FeatureKind::GLMhPCA: return 10;
    case FeatureKind::LI: return 24;
    case FeatureKind::DeltaHb: return 48;
  }
  throw std::logic_error("bad feature kind");
}

struct FeatureVector {
  FeatureKind kind = FeatureKind::GLM;
  std::vector<double> values;

  void check() const {
    if (static_cast<int>(values.size()) != feature_dim(kind))
      throw std::logic_error("FeatureVector: length does not match kind");
  }
};

// Least-squares betas of y against the design, with an intercept column
// appended internally (and discarded) so constant offsets never leak into
// the regressor coefficients. Normal equations with a tiny ridge for
// numerical safety.
inline std::vector<double> glm_betas(const std::vector<double>& y, const DesignMatrix& dm) {
  const int n = dm.d.rows;
  if (static_cast<int>(y.size()) != n)
    throw std::invalid_argument("glm_betas: series length does not match design rows");
  constexpr int p = 6;  // 5 regressors + intercept
  constexpr double ridge = 1e-10;

  auto col = [&](int c, int t) -> double { return c < 5 ? dm.d(t, c) : 1.0; };
  std::vector<double> ata(p * p, 0.0), aty(p, 0.0);
  for (int a = 0; a < p; ++a) {
    for (int b = a; b < p; ++b) {
      double s = 0.0;
      for (int t = 0; t < n; ++t) s += col(a, t) * col(b, t);
      ata[a * p + b] = s;
      ata[b * p + a] = s;
    }
    double s = 0.0;
    for (int t = 0; t < n; ++t) s += col(a, t) * y[t];
    aty[a] = s;
  }
  for (int a = 0; a < p; ++a) ata[a * p + a] += ridge;
  std::vector<double> beta = solve_linear(std::move(ata), std::move(aty));
  beta.resize(5);
  return beta;
}

// 240-dim GLM feature: five betas per row over the first 20 s of the trial,
// concatenated in row order (row r occupies positions [5r, 5r+5)).
inline FeatureVector glm_features(const TrialRecord& trial, const HrfParams& hrf) {
  require_stage(trial, Stage::Preprocessed, "glm_features");
  const int n_seg = static_cast<int>(std::llround(20.0 * trial.fs));
  if (trial.samples.cols < n_seg)
    throw std::runtime_error("glm_features: trial shorter than the 20 s GLM segment");
  const DesignMatrix dm = build_design(n_seg, trial.fs, hrf);

  FeatureVector fv;
  fv.kind = FeatureKind::GLM;
  fv.values.reserve(static_cast<std::size_t>(trial.samples.rows) * 5);
  std::vector<double> y(n_seg);
  for (int r = 0; r < trial.samples.rows; ++r) {
    for (int t = 0; t < n_seg; ++t) y[t] = trial.samples(r, t);
    const std::vector<double> beta = glm_betas(y, dm);
    fv.values.insert(fv.values.end(), beta.begin(), beta.end());
  }
  fv.check();
  return fv;
}

}  // namespace hemcnn

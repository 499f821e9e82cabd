#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/glm.hpp"
#include "hemcnn/layout.hpp"
#include "hemcnn/trial.hpp"

namespace hemcnn {

// Activation and baseline windows shared by the LI and DeltaHb features:
// activation straddles the canonical HRF peak, baseline precedes the
// response onset.
struct ActivationWindows {
  double baseline_lo_s = 0.0;
  double baseline_hi_s = 2.0;
  double active_lo_s = 5.0;
  double active_hi_s = 19.0;
};

namespace detail {

inline double row_window_mean(const TrialRecord& t, int row, double lo_s, double hi_s) {
  const int lo = static_cast<int>(std::llround(lo_s * t.fs));
  const int hi = static_cast<int>(std::llround(hi_s * t.fs));
  if (hi > t.samples.cols)
    throw std::runtime_error("features: trial shorter than the activation window");
  if (hi <= lo) throw std::logic_error("features: empty window");
  double s = 0.0;
  for (int c = lo; c < hi; ++c) s += t.samples(row, c);
  return s / static_cast<double>(hi - lo);
}

// Baseline-corrected activation of one row: mean over the active window
// minus mean over the baseline window.
inline double row_activation(const TrialRecord& t, int row, const ActivationWindows& w) {
  return row_window_mean(t, row, w.active_lo_s, w.active_hi_s) -
         row_window_mean(t, row, w.baseline_lo_s, w.baseline_hi_s);
}

}  // namespace detail

// 48-dim feature: per-row baseline-corrected concentration change.
inline FeatureVector delta_hb_features(const TrialRecord& trial,
                                       const ActivationWindows& w = {}) {
  require_stage(trial, Stage::Preprocessed, "delta_hb_features");
  FeatureVector fv;
  fv.kind = FeatureKind::DeltaHb;
  fv.values.resize(trial.samples.rows);
  for (int r = 0; r < trial.samples.rows; ++r)
    fv.values[r] = detail::row_activation(trial, r, w);
  fv.check();
  return fv;
}

// 24-dim lateralisation index: per symmetric channel pair and Hb type,
// LI = (a_R - a_L) / (|a_L| + |a_R| + 1e-12), so LI > 0 means right
// hemisphere dominance and LI is always within [-1, 1]. Output order is
// pair-major with (HbO, HbR) within each pair.
inline FeatureVector li_features(const TrialRecord& trial, const ChannelLayout& layout,
                                 const ActivationWindows& w = {}) {
  require_stage(trial, Stage::Preprocessed, "li_features");
  FeatureVector fv;
  fv.kind = FeatureKind::LI;
  fv.values.reserve(24);
  for (const auto& pair : layout.symmetric_pairs()) {
    for (HbType hb : {HbType::HbO, HbType::HbR}) {
      const double a_l = detail::row_activation(trial, layout.row_of(pair.first, hb), w);
      const double a_r = detail::row_activation(trial, layout.row_of(pair.second, hb), w);
      fv.values.push_back((a_r - a_l) / (std::fabs(a_l) + std::fabs(a_r) + 1e-12));
    }
  }
  fv.check();
  return fv;
}

}  // namespace hemcnn

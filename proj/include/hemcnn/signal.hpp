#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/filter.hpp"
#include "hemcnn/mbll.hpp"
#include "hemcnn/trial.hpp"

namespace hemcnn {

struct PreprocessConfig {
  double lowpass_cutoff = 0.25;   // Hz
  double detrend_window_s = 10.0; // seconds
  double fs_out = 2.0;            // Hz
  double zscore_epsilon = 1e-8;

  void validate(double fs_native) const {
    if (!(lowpass_cutoff > 0.0))
      throw std::invalid_argument("preprocess: lowpass_cutoff must be > 0");
    if (!(lowpass_cutoff < fs_out / 2.0))
      throw std::invalid_argument("preprocess: lowpass_cutoff must be below fs_out/2");
    if (!(fs_out / 2.0 <= fs_native / 2.0))
      throw std::invalid_argument("preprocess: fs_out must not exceed the native rate");
    if (!(detrend_window_s > 0.0))
      throw std::invalid_argument("preprocess: detrend_window_s must be > 0");
    if (!(zscore_epsilon > 0.0))
      throw std::invalid_argument("preprocess: zscore_epsilon must be > 0");
  }
};

// Removes the least-squares line from consecutive windows of
// round(window_s*fs) samples. The last window may be shorter; a 1-sample
// remainder is merged into the previous window so every fit has >= 2 points.
inline std::vector<double> detrend(const std::vector<double>& x, double fs, double window_s) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("detrend: series shorter than 2 samples");
  int w = static_cast<int>(std::llround(window_s * fs));
  if (w < 2) w = 2;

  std::vector<double> y = x;
  int start = 0;
  while (start < n) {
    int len = std::min(w, n - start);
    if (n - (start + len) == 1) len += 1;  // absorb 1-sample tail
    // least-squares line over local indices 0..len-1
    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    for (int i = 0; i < len; ++i) {
      const double t = static_cast<double>(i);
      sum_t += t;
      sum_y += y[start + i];
      sum_tt += t * t;
      sum_ty += t * y[start + i];
    }
    const double m = static_cast<double>(len);
    const double denom = m * sum_tt - sum_t * sum_t;
    const double b = denom != 0.0 ? (m * sum_ty - sum_t * sum_y) / denom : 0.0;
    const double a = (sum_y - b * sum_t) / m;
    for (int i = 0; i < len; ++i) y[start + i] -= a + b * static_cast<double>(i);
    start += len;
  }
  return y;
}

// Linear interpolation onto the k/fs_out grid. Output length is
// floor((n-1)*fs_out/fs_in)+1 so the last output time never exceeds the
// input span.
inline std::vector<double> resample(const std::vector<double>& x, double fs_in, double fs_out) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw std::invalid_argument("resample: empty input");
  if (!(fs_in > fs_out)) throw std::invalid_argument("resample: fs_in must exceed fs_out");
  if (n == 1) return {x[0]};
  const int count =
      static_cast<int>(std::floor(static_cast<double>(n - 1) * fs_out / fs_in + 1e-9)) + 1;
  std::vector<double> y(count);
  for (int k = 0; k < count; ++k) {
    const double p = static_cast<double>(k) * fs_in / fs_out;
    int i0 = static_cast<int>(std::floor(p));
    if (i0 >= n - 1) i0 = n - 2;
    const double frac = p - i0;
    y[k] = x[i0] + frac * (x[i0 + 1] - x[i0]);
  }
  return y;
}

// Z-scores the rows of a matrix with one (mean, sd) pair per row group;
// group_of_row returns a small non-negative group id per row. Population sd,
// epsilon-guarded denominator.
template <typename GroupFn>
inline void zscore_rows_grouped(Tensor2& x, double epsilon, GroupFn group_of_row) {
  int n_groups = 0;
  for (int r = 0; r < x.rows; ++r) n_groups = std::max(n_groups, group_of_row(r) + 1);
  std::vector<double> sum(n_groups, 0.0), sumsq(n_groups, 0.0);
  std::vector<long> count(n_groups, 0);
  for (int r = 0; r < x.rows; ++r) {
    const int g = group_of_row(r);
    for (int c = 0; c < x.cols; ++c) {
      const double v = x(r, c);
      sum[g] += v;
      sumsq[g] += v * v;
      ++count[g];
    }
  }
  std::vector<double> mean(n_groups, 0.0), sd(n_groups, 0.0);
  for (int g = 0; g < n_groups; ++g) {
    if (count[g] == 0) continue;
    mean[g] = sum[g] / count[g];
    const double var = std::max(0.0, sumsq[g] / count[g] - mean[g] * mean[g]);
    sd[g] = std::sqrt(var);
  }
  for (int r = 0; r < x.rows; ++r) {
    const int g = group_of_row(r);
    for (int c = 0; c < x.cols; ++c) x(r, c) = (x(r, c) - mean[g]) / (sd[g] + epsilon);
  }
}

// Per-trial z-score with one statistic pair over all HbO rows jointly and one
// over all HbR rows jointly (even rows HbO, odd rows HbR by the layout's
// row-order contract).
inline TrialRecord zscore_trial(const TrialRecord& trial, double epsilon) {
  require_stage(trial, Stage::Preprocessed, "zscore_trial");
  TrialRecord out = trial;
  zscore_rows_grouped(out.samples, epsilon, [](int r) { return r % 2; });
  out.stage = Stage::Normalized;
  return out;
}

// Contiguous column slice [start_s, start_s + len_s) in seconds.
inline Tensor2 crop_window(const TrialRecord& trial, double start_s, double len_s) {
  if (start_s < 0.0) throw std::out_of_range("crop_window: start before trial onset");
  const int start = static_cast<int>(std::llround(start_s * trial.fs));
  const int len = static_cast<int>(std::llround(len_s * trial.fs));
  if (len <= 0) throw std::out_of_range("crop_window: empty window");
  if (start + len > trial.samples.cols)
    throw std::out_of_range("crop_window: window extends past trial end");
  Tensor2 out(trial.samples.rows, len);
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < len; ++c) out(r, c) = trial.samples(r, start + c);
  return out;
}

// Full chain: MBLL (for raw optical density input) -> zero-phase lowpass ->
// windowed linear detrend -> linear resample, applied per row. MBLL output is
// converted from the extinction table's mM to uM so concentration amplitudes
// are O(1).
inline TrialRecord preprocess(const TrialRecord& raw, const MbllParams& mbll_params,
                              const PreprocessConfig& cfg) {
  if (raw.stage != Stage::RawOD && raw.stage != Stage::Hb)
    throw std::runtime_error("preprocess: trial is at stage '" + to_string(raw.stage) +
                             "', expected 'raw_od' or 'hb'");
  cfg.validate(raw.fs);
  if (!raw.samples.all_finite()) throw std::runtime_error("preprocess: non-finite samples");

  Tensor2 conc = raw.samples;
  if (raw.stage == Stage::RawOD) {
    if (raw.samples.rows % 2 != 0)
      throw std::runtime_error("preprocess: raw optical density needs wavelength row pairs");
    for (int pair = 0; pair < raw.samples.rows / 2; ++pair) {
      Tensor2 od(2, raw.samples.cols);
      for (int l = 0; l < 2; ++l)
        for (int c = 0; c < raw.samples.cols; ++c) od(l, c) = raw.samples(2 * pair + l, c);
      Tensor2 hb = mbll(od, mbll_params);
      for (int l = 0; l < 2; ++l)
        for (int c = 0; c < raw.samples.cols; ++c)
          conc(2 * pair + l, c) = hb(l, c) * 1000.0;  // mM -> uM
    }
  }

  int out_cols = -1;
  Tensor2 out;
  for (int r = 0; r < conc.rows; ++r) {
    std::vector<double> row(conc.cols);
    for (int c = 0; c < conc.cols; ++c) row[c] = conc(r, c);
    row = lowpass(row, raw.fs, cfg.lowpass_cutoff);
    row = detrend(row, raw.fs, cfg.detrend_window_s);
    row = resample(row, raw.fs, cfg.fs_out);
    if (out_cols < 0) {
      out_cols = static_cast<int>(row.size());
      out = Tensor2(conc.rows, out_cols);
    }
    for (int c = 0; c < out_cols; ++c) out(r, c) = row[c];
  }

  TrialRecord result = raw;
  result.fs = cfg.fs_out;
  result.stage = Stage::Preprocessed;
  result.samples = std::move(out);
  return result;
}

}  // namespace hemcnn

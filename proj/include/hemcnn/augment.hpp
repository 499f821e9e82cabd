#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/rng.hpp"
#include "hemcnn/signal.hpp"
#include "hemcnn/trial.hpp"

namespace hemcnn {

struct AugmentConfig {
  int folds = 5;
  double crop_len_s = 19.0;
  std::array<double, 2> crop_source_window_s{0.0, 35.0};
  std::array<double, 2> scale_range{0.5, 1.0};

  void validate() const {
    if (folds < 1) throw std::invalid_argument("augment: folds must be >= 1");
    if (!(scale_range[0] > 0.0) || !(scale_range[0] <= scale_range[1]))
      throw std::invalid_argument("augment: scale_range must satisfy 0 < min <= max");
    if (!(crop_source_window_s[0] >= 0.0) ||
        !(crop_source_window_s[0] + crop_len_s <= crop_source_window_s[1]))
      throw std::invalid_argument("augment: crop must fit inside the source window");
  }
};

// One model-ready example: a z-scored crop plus its label.
struct Example {
  Tensor2 x;
  Hand label = Hand::Left;
};

// Z-scores a both-Hb crop with per-Hb-type statistics (even rows HbO, odd
// HbR). This is the final input-formation step for every example.
inline void zscore_example(Tensor2& x, double epsilon) {
  zscore_rows_grouped(x, epsilon, [](int r) { return r % 2; });
}

// Emits folds x |trials| examples. Per example: a random crop_len_s-column
// window from inside the source window, multiplied by a random gain from
// scale_range, then z-scored. The z-score comes last, so a pure global gain
// cancels; the scaling still matters through its interaction with dropout
// during training. Draw order is fold-major and, within a fold, trial order.
inline std::vector<Example> augment(const std::vector<const TrialRecord*>& trials,
                                    const AugmentConfig& cfg, double zscore_epsilon, Rng& rng) {
  cfg.validate();
  std::vector<Example> out;
  out.reserve(static_cast<std::size_t>(cfg.folds) * trials.size());
  for (int fold = 0; fold < cfg.folds; ++fold) {
    for (const TrialRecord* trial : trials) {
      require_stage(*trial, Stage::Preprocessed, "augment");
      const int src_lo = static_cast<int>(std::llround(cfg.crop_source_window_s[0] * trial->fs));
      const int src_hi = static_cast<int>(std::llround(cfg.crop_source_window_s[1] * trial->fs));
      const int n_crop = static_cast<int>(std::llround(cfg.crop_len_s * trial->fs));
      if (src_hi > trial->samples.cols)
        throw std::runtime_error("augment: trial shorter than the crop source window");
      const int max_start = src_hi - n_crop;
      const int start =
          src_lo + (max_start > src_lo
                        ? static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(max_start - src_lo) + 1))
                        : 0);
      const double scale = rng.uniform(cfg.scale_range[0], cfg.scale_range[1]);
      Example ex;
      ex.label = trial->label;
      ex.x = Tensor2(trial->samples.rows, n_crop);
      for (int r = 0; r < ex.x.rows; ++r)
        for (int c = 0; c < n_crop; ++c) ex.x(r, c) = scale * trial->samples(r, start + c);
      zscore_example(ex.x, zscore_epsilon);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

// The evaluation-time input: crop at the trial onset, no gain, z-scored.
inline Tensor2 eval_input(const TrialRecord& trial, double crop_len_s, double zscore_epsilon) {
  require_stage(trial, Stage::Preprocessed, "eval_input");
  Tensor2 x = crop_window(trial, 0.0, crop_len_s);
  zscore_example(x, zscore_epsilon);
  return x;
}

}  // namespace hemcnn

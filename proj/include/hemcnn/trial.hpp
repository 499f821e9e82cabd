#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hemcnn/layout.hpp"
#include "hemcnn/tensor.hpp"

namespace hemcnn {

// Processing stage a trial's samples are in. Stages only advance; every op
// checks the stage it requires so that e.g. z-scoring raw optical density or
// preprocessing twice fails loudly instead of silently corrupting data.
//
//   RawOD        optical density changes, 2 wavelengths per channel (48 rows)
//   Hb           HbO/HbR concentration changes after MBLL (48 rows, uM)
//   Preprocessed filtered + detrended + resampled to the analysis rate
//   Normalized   per-trial z-scored (model input space)
enum class Stage { RawOD, Hb, Preprocessed, Normalized };

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::RawOD: return "raw_od";
    case Stage::Hb: return "hb";
    case Stage::Preprocessed: return "preprocessed";
    case Stage::Normalized: return "normalized";
  }
  throw std::logic_error("bad stage");
}

inline Stage stage_from_string(const std::string& s) {
  for (Stage st : {Stage::RawOD, Stage::Hb, Stage::Preprocessed, Stage::Normalized})
    if (to_string(st) == s) return st;
  throw std::runtime_error("unknown stage '" + s + "'");
}

// One grip trial: a rows x samples matrix plus identity and bookkeeping.
// At Hb and later stages rows follow ChannelLayout::row_order() (48 rows);
// at RawOD each channel contributes two consecutive wavelength rows in the
// same channel order.
struct TrialRecord {
  int subject = 0;
  int trial_index = 0;
  Hand label = Hand::Left;
  double fs = 0.0;  // sampling rate of `samples` [Hz]
  Stage stage = Stage::RawOD;
  Tensor2 samples;

  TrialRecord() = default;
  TrialRecord(int subj, int idx, Hand lbl, double fs_, Stage st, Tensor2 data)
      : subject(subj), trial_index(idx), label(lbl), fs(fs_), stage(st),
        samples(std::move(data)) {
    if (fs <= 0.0) throw std::invalid_argument("TrialRecord: fs must be positive");
  }

  double duration_s() const {
    return samples.cols > 0 ? static_cast<double>(samples.cols - 1) / fs : 0.0;
  }
};

inline void require_stage(const TrialRecord& t, Stage expected, const std::string& op) {
  if (t.stage != expected)
    throw std::runtime_error(op + ": trial is at stage '" + to_string(t.stage) +
                             "', expected '" + to_string(expected) + "'");
}

struct Dataset {
  std::vector<TrialRecord> trials;

  std::vector<int> subjects() const {
    std::vector<int> out;
    for (const auto& t : trials)
      if (std::find(out.begin(), out.end(), t.subject) == out.end())
        out.push_back(t.subject);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> indices_of_subject(int subject) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(trials.size()); ++i)
      if (trials[i].subject == subject) out.push_back(i);
    return out;
  }
};

}  // namespace hemcnn

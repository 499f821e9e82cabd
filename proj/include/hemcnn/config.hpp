#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemcnn/eval.hpp"
#include "hemcnn/mbll.hpp"
#include "hemcnn/signal.hpp"
#include "hemcnn/synthetic.hpp"

namespace hemcnn {

namespace detail {

// Unknown keys are configuration mistakes, not extensions; reject them with
// the offending name.
inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
  if (!j.is_object())
    throw std::runtime_error("config: '" + context + "' must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw std::runtime_error("config: unknown key '" + key + "' in " + context);
  }
}

inline std::array<double, 2> pair_field(const nlohmann::json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2)
    throw std::runtime_error("config: '" + context + "' must be a [min, max] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

struct RunConfig {
  std::optional<std::string> manifest_path;
  std::optional<SyntheticConfig> synthetic;
  bool synthetic_has_seed = false;

  PreprocessConfig preprocess;
  MbllParams mbll;
  std::vector<Method> methods{kAllMethods, kAllMethods + 7};
  EvalConfig eval;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

inline SyntheticConfig parse_synthetic_config(const nlohmann::json& j, bool& has_seed) {
  detail::check_keys(j,
                     {"n_subjects", "trials_per_hand", "fs", "trial_len_s", "rest_range_s",
                      "hrf_amplitude_active", "hrf_amplitude_other", "laterality", "noise_sd",
                      "drift_slope_sd", "gain_range", "seed"},
                     "dataset.synthetic");
  SyntheticConfig c;
  c.n_subjects = j.value("n_subjects", c.n_subjects);
  c.trials_per_hand = j.value("trials_per_hand", c.trials_per_hand);
  c.fs = j.value("fs", c.fs);
  c.trial_len_s = j.value("trial_len_s", c.trial_len_s);
  if (j.contains("rest_range_s"))
    c.rest_range_s = detail::pair_field(j["rest_range_s"], "dataset.synthetic.rest_range_s");
  c.hrf_amplitude_active = j.value("hrf_amplitude_active", c.hrf_amplitude_active);
  c.hrf_amplitude_other = j.value("hrf_amplitude_other", c.hrf_amplitude_other);
  if (j.contains("laterality"))
    c.laterality = laterality_from_string(j["laterality"].get<std::string>());
  c.noise_sd = j.value("noise_sd", c.noise_sd);
  c.drift_slope_sd = j.value("drift_slope_sd", c.drift_slope_sd);
  if (j.contains("gain_range"))
    c.gain_range = detail::pair_field(j["gain_range"], "dataset.synthetic.gain_range");
  has_seed = j.contains("seed");
  if (has_seed) c.seed = j["seed"].get<std::uint64_t>();
  return c;
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
  detail::check_keys(j,
                     {"dataset", "preprocess", "mbll", "methods", "schedule", "augment",
                      "dropout", "hrf", "windows", "loso", "seed", "jobs", "out"},
                     "top level");
  RunConfig c;

  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    detail::check_keys(d, {"manifest", "synthetic"}, "dataset");
    if (d.contains("manifest") == d.contains("synthetic"))
      throw std::runtime_error(
          "config: dataset needs exactly one of 'manifest' or 'synthetic'");
    if (d.contains("manifest")) c.manifest_path = d["manifest"].get<std::string>();
    if (d.contains("synthetic"))
      c.synthetic = parse_synthetic_config(d["synthetic"], c.synthetic_has_seed);
  }

  if (j.contains("preprocess")) {
    const auto& p = j["preprocess"];
    detail::check_keys(p, {"lowpass_cutoff", "detrend_window_s", "fs_out", "zscore_epsilon"},
                       "preprocess");
    c.preprocess.lowpass_cutoff = p.value("lowpass_cutoff", c.preprocess.lowpass_cutoff);
    c.preprocess.detrend_window_s = p.value("detrend_window_s", c.preprocess.detrend_window_s);
    c.preprocess.fs_out = p.value("fs_out", c.preprocess.fs_out);
    c.preprocess.zscore_epsilon = p.value("zscore_epsilon", c.preprocess.zscore_epsilon);
  }

  if (j.contains("mbll")) {
    const auto& m = j["mbll"];
    detail::check_keys(m, {"extinction", "dpf", "distance"}, "mbll");
    if (m.contains("extinction")) {
      const auto& e = m["extinction"];
      if (!e.is_array() || e.size() != 2 || !e[0].is_array() || e[0].size() != 2 ||
          !e[1].is_array() || e[1].size() != 2)
        throw std::runtime_error("config: mbll.extinction must be a 2x2 matrix");
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c.mbll.extinction[a][b] = e[a][b].get<double>();
    }
    if (m.contains("dpf")) c.mbll.dpf = detail::pair_field(m["dpf"], "mbll.dpf");
    c.mbll.distance = m.value("distance", c.mbll.distance);
  }

  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j["methods"]) c.methods.push_back(method_from_string(m.get<std::string>()));
    if (c.methods.empty()) throw std::runtime_error("config: methods list is empty");
  }

  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    detail::check_keys(s, {"lr0", "decay_per_epoch", "epochs", "batch_size"}, "schedule");
    c.eval.schedule.lr0 = s.value("lr0", c.eval.schedule.lr0);
    c.eval.schedule.decay_per_epoch = s.value("decay_per_epoch", c.eval.schedule.decay_per_epoch);
    c.eval.schedule.epochs = s.value("epochs", c.eval.schedule.epochs);
    c.eval.schedule.batch_size = s.value("batch_size", c.eval.schedule.batch_size);
  }

  if (j.contains("augment")) {
    const auto& a = j["augment"];
    detail::check_keys(a, {"folds", "crop_len_s", "crop_source_window_s", "scale_range"},
                       "augment");
    c.eval.augment.folds = a.value("folds", c.eval.augment.folds);
    c.eval.augment.crop_len_s = a.value("crop_len_s", c.eval.augment.crop_len_s);
    if (a.contains("crop_source_window_s"))
      c.eval.augment.crop_source_window_s =
          detail::pair_field(a["crop_source_window_s"], "augment.crop_source_window_s");
    if (a.contains("scale_range"))
      c.eval.augment.scale_range = detail::pair_field(a["scale_range"], "augment.scale_range");
  }

  if (j.contains("dropout")) {
    const auto& d = j["dropout"];
    detail::check_keys(d, {"apply_probability"}, "dropout");
    c.eval.dropout.apply_probability = d.value("apply_probability", 0.5);
  }

  if (j.contains("hrf")) {
    const auto& h = j["hrf"];
    detail::check_keys(h, {"shape", "scale", "duration"}, "hrf");
    c.eval.hrf.shape = h.value("shape", c.eval.hrf.shape);
    c.eval.hrf.scale = h.value("scale", c.eval.hrf.scale);
    c.eval.hrf.duration = h.value("duration", c.eval.hrf.duration);
  }

  if (j.contains("windows")) {
    const auto& w = j["windows"];
    detail::check_keys(w, {"baseline", "active"}, "windows");
    if (w.contains("baseline")) {
      const auto b = detail::pair_field(w["baseline"], "windows.baseline");
      c.eval.windows.baseline_lo_s = b[0];
      c.eval.windows.baseline_hi_s = b[1];
    }
    if (w.contains("active")) {
      const auto a = detail::pair_field(w["active"], "windows.active");
      c.eval.windows.active_lo_s = a[0];
      c.eval.windows.active_hi_s = a[1];
    }
  }

  if (j.contains("loso")) {
    const auto& l = j["loso"];
    detail::check_keys(l, {"runs_per_subject", "train_fraction"}, "loso");
    c.eval.runs_per_subject = l.value("runs_per_subject", c.eval.runs_per_subject);
    c.eval.train_fraction = l.value("train_fraction", c.eval.train_fraction);
  }

  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  if (j.contains("out")) c.out_dir = j["out"].get<std::string>();

  c.eval.zscore_epsilon = c.preprocess.zscore_epsilon;
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace hemcnn

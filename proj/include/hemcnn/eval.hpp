#pragma once

#include <atomic>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hemcnn/augment.hpp"
#include "hemcnn/features.hpp"
#include "hemcnn/glm.hpp"
#include "hemcnn/hpca.hpp"
#include "hemcnn/model.hpp"
#include "hemcnn/rng.hpp"
#include "hemcnn/stats.hpp"
#include "hemcnn/train.hpp"
#include "hemcnn/tree.hpp"

namespace hemcnn {

enum class Method { HemCNN, HemCNNo, HemCNNr, GLM, GLMhPCA, DeltaHb, LI };

inline constexpr Method kAllMethods[] = {Method::HemCNN, Method::HemCNNo, Method::HemCNNr,
                                         Method::GLM,    Method::GLMhPCA, Method::DeltaHb,
                                         Method::LI};

inline std::string to_string(Method m) {
  switch (m) {
    case Method::HemCNN: return "HemCNN";
    case Method::HemCNNo: return "HemCNNo";
    case Method::HemCNNr: return "HemCNNr";
    case Method::GLM: return "GLM";
    case Method::GLMhPCA: return "GLMhPCA";
    case Method::DeltaHb: return "DeltaHb";
    case Method::LI: return "LI";
  }
  throw std::logic_error("bad method");
}

inline Method method_from_string(const std::string& s) {
  for (Method m : kAllMethods)
    if (to_string(m) == s) return m;
  throw std::runtime_error("unknown method '" + s + "'");
}

inline bool is_cnn(Method m) {
  return m == Method::HemCNN || m == Method::HemCNNo || m == Method::HemCNNr;
}

inline Variant variant_of(Method m) {
  switch (m) {
    case Method::HemCNN: return Variant::Both;
    case Method::HemCNNo: return Variant::HbOOnly;
    case Method::HemCNNr: return Variant::HbROnly;
    default: throw std::logic_error("variant_of: not a network method");
  }
}

struct EvalConfig {
  TrainSchedule schedule;
  DropoutConfig dropout;
  AugmentConfig augment;
  HrfParams hrf;
  ActivationWindows windows;
  TreeConfig tree;
  double zscore_epsilon = 1e-8;
  int runs_per_subject = 10;
  double train_fraction = 0.55;

  void validate() const {
    schedule.validate();
    dropout.validate();
    augment.validate();
    hrf.validate();
    if (runs_per_subject < 1)
      throw std::invalid_argument("eval: runs_per_subject must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      throw std::invalid_argument("eval: train_fraction must be in (0, 1)");
  }
};

struct SplitResult {
  std::vector<int> train, val;  // dataset trial indices
};

// Random trial-level partition with |train| = round(fraction * |pool|); both
// classes must appear on both sides, reshuffling up to 100 times before
// giving up.
inline SplitResult split_train_val(const Dataset& ds, const std::vector<int>& pool,
                                   double fraction, Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("split_train_val: empty pool");
  const int n_train = static_cast<int>(std::llround(fraction * static_cast<double>(pool.size())));
  std::vector<int> shuffled = pool;
  for (int attempt = 0; attempt < 100; ++attempt) {
    rng.shuffle(shuffled);
    SplitResult s;
    s.train.assign(shuffled.begin(), shuffled.begin() + n_train);
    s.val.assign(shuffled.begin() + n_train, shuffled.end());
    auto both_classes = [&ds](const std::vector<int>& part) {
      bool l = false, r = false;
      for (int i : part) (ds.trials[i].label == Hand::Left ? l : r) = true;
      return l && r;
    };
    if (both_classes(s.train) && both_classes(s.val)) return s;
  }
  throw std::runtime_error(
      "split_train_val: could not place both classes in both parts after 100 attempts");
}

inline double accuracy(const std::vector<Hand>& preds, const std::vector<Hand>& labels) {
  if (preds.empty() || preds.size() != labels.size())
    throw std::invalid_argument("accuracy: need equal-length non-empty inputs");
  int correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

struct RunRecord {
  Method method = Method::HemCNN;
  int subject = 0;
  int run = 0;
  std::uint64_t seed = 0;
  double val_accuracy = -1.0;
  bool selected = false;
  bool failed = false;
  std::string error;
  std::vector<double> epoch_loss;  // network runs only
};

struct LosoReport {
  std::vector<Method> methods;
  std::vector<int> subjects;
  std::vector<std::vector<double>> accuracy;  // [method][subject position]
  std::vector<RunRecord> runs;                // ordered by (method, subject, run)
};

namespace detail {

// Everything a finished run needs to be scored on held-out trials.
struct RunArtifact {
  std::optional<HemCNNModel> model;
  std::optional<TreeModel> tree;
  std::optional<HpcaProjection> hpca;
};

inline std::vector<double> feature_values(Method m, const TrialRecord& t,
                                          const ChannelLayout& layout, const EvalConfig& cfg) {
  switch (m) {
    case Method::GLM:
    case Method::GLMhPCA:
      return glm_features(t, cfg.hrf).values;
    case Method::DeltaHb:
      return delta_hb_features(t, cfg.windows).values;
    case Method::LI:
      return li_features(t, layout, cfg.windows).values;
    default:
      throw std::logic_error("feature_values: not a feature method");
  }
}

inline Hand run_predict(Method m, const RunArtifact& art, const TrialRecord& t,
                        const ChannelLayout& layout, const EvalConfig& cfg) {
  if (is_cnn(m)) {
    const Tensor2 x48 = eval_input(t, cfg.augment.crop_len_s, cfg.zscore_epsilon);
    return predict(*art.model, select_variant_rows(x48, variant_of(m)));
  }
  std::vector<double> fv = feature_values(m, t, layout, cfg);
  if (m == Method::GLMhPCA) {
    FeatureVector glm_fv;
    glm_fv.kind = FeatureKind::GLM;
    glm_fv.values = std::move(fv);
    fv = hpca_apply(*art.hpca, glm_fv).values;
  }
  return tree_predict(*art.tree, fv);
}

// One (method, subject, run) task: split, fit, score on validation.
inline RunArtifact execute_run(Method m, const Dataset& ds, const ChannelLayout& layout,
                               const std::vector<int>& pool, const EvalConfig& cfg,
                               RunRecord& rec) {
  Rng rng(rec.seed);
  const SplitResult split = split_train_val(ds, pool, cfg.train_fraction, rng);

  RunArtifact art;
  if (is_cnn(m)) {
    HemCNNModel model = build(variant_of(m), layout, rng);
    std::vector<const TrialRecord*> train_trials;
    train_trials.reserve(split.train.size());
    for (int i : split.train) train_trials.push_back(&ds.trials[i]);
    std::vector<Example> examples = augment(train_trials, cfg.augment, cfg.zscore_epsilon, rng);
    if (model.variant != Variant::Both)
      for (Example& ex : examples) ex.x = select_variant_rows(ex.x, model.variant);
    const TrainResult tr = train(model, examples, cfg.schedule, cfg.dropout, rng);
    rec.epoch_loss = tr.epoch_loss;
    art.model = std::move(model);
  } else {
    std::vector<std::vector<double>> x;
    std::vector<Hand> y;
    x.reserve(split.train.size());
    for (int i : split.train) {
      x.push_back(feature_values(m, ds.trials[i], layout, cfg));
      y.push_back(ds.trials[i].label);
    }
    if (m == Method::GLMhPCA) {
      std::vector<FeatureVector> glm_fvs(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        glm_fvs[i].kind = FeatureKind::GLM;
        glm_fvs[i].values = x[i];
      }
      art.hpca = hpca_fit(glm_fvs);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = hpca_apply(*art.hpca, glm_fvs[i]).values;
    }
    art.tree = tree_fit(x, y, cfg.tree);
  }

  std::vector<Hand> preds, labels;
  preds.reserve(split.val.size());
  for (int i : split.val) {
    preds.push_back(run_predict(m, art, ds.trials[i], layout, cfg));
    labels.push_back(ds.trials[i].label);
  }
  rec.val_accuracy = accuracy(preds, labels);
  return art;
}

}  // namespace detail

// Full leave-one-subject-out protocol. For every method and every left-out
// subject: runs_per_subject independent (split, fit) runs on the pooled
// remaining subjects, selection of the best validation accuracy (ties to the
// lower run index), and a single evaluation of the selected model on the
// left-out subject's trials. Each run draws from a seed derived from
// (root_seed, method, subject, run), so the report is a pure function of
// (dataset, config, root_seed) regardless of how many worker threads
// execute it.
inline LosoReport run_loso(const Dataset& ds, const ChannelLayout& layout,
                           const std::vector<Method>& methods, const EvalConfig& cfg,
                           std::uint64_t root_seed, int jobs = 1) {
  cfg.validate();
  if (methods.empty()) throw std::invalid_argument("run_loso: no methods requested");
  for (const TrialRecord& t : ds.trials) require_stage(t, Stage::Preprocessed, "run_loso");
  const std::vector<int> subjects = ds.subjects();
  if (subjects.size() < 2) throw std::invalid_argument("run_loso: need >= 2 subjects");
  if (jobs < 1) throw std::invalid_argument("run_loso: jobs must be >= 1");

  struct Task {
    Method method;
    int subject;
    int run;
  };
  std::vector<Task> tasks;
  for (Method m : methods)
    for (int s : subjects)
      for (int r = 0; r < cfg.runs_per_subject; ++r) tasks.push_back({m, s, r});

  std::vector<RunRecord> records(tasks.size());
  std::vector<detail::RunArtifact> artifacts(tasks.size());

  // Per-subject pools, shared across tasks; leakage is checked here once.
  std::vector<std::vector<int>> pools(subjects.size());
  for (std::size_t si = 0; si < subjects.size(); ++si) {
    for (int i = 0; i < static_cast<int>(ds.trials.size()); ++i)
      if (ds.trials[i].subject != subjects[si]) pools[si].push_back(i);
    if (pools[si].empty()) throw std::runtime_error("run_loso: empty training pool");
    for (int i : pools[si])
      if (ds.trials[i].subject == subjects[si])
        throw std::logic_error("run_loso: left-out subject leaked into the pool");
  }
  auto subject_pos = [&subjects](int s) {
    for (std::size_t i = 0; i < subjects.size(); ++i)
      if (subjects[i] == s) return i;
    throw std::logic_error("run_loso: unknown subject");
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      RunRecord& rec = records[i];
      rec.method = t.method;
      rec.subject = t.subject;
      rec.run = t.run;
      rec.seed = derive_seed(root_seed,
                             {static_cast<std::uint64_t>(t.method),
                              static_cast<std::uint64_t>(t.subject),
                              static_cast<std::uint64_t>(t.run)});
      try {
        artifacts[i] =
            detail::execute_run(t.method, ds, layout, pools[subject_pos(t.subject)], cfg, rec);
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }

  // Deterministic reduce: per (method, subject) select the best validation
  // run and score it on the left-out trials.
  LosoReport report;
  report.methods = methods;
  report.subjects = subjects;
  report.accuracy.assign(methods.size(), std::vector<double>(subjects.size(), 0.0));
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t si = 0; si < subjects.size(); ++si) {
      const std::size_t base = (mi * subjects.size() + si) * cfg.runs_per_subject;
      std::size_t best = tasks.size();
      for (int r = 0; r < cfg.runs_per_subject; ++r) {
        const std::size_t i = base + r;
        if (records[i].failed) continue;
        if (best == tasks.size() || records[i].val_accuracy > records[best].val_accuracy)
          best = i;
      }
      if (best == tasks.size())
        throw std::runtime_error("run_loso: all runs failed for method " +
                                 to_string(methods[mi]) + ", subject " +
                                 std::to_string(subjects[si]) + " (first error: " +
                                 records[base].error + ")");
      records[best].selected = true;

      std::vector<Hand> preds, labels;
      for (int i : ds.indices_of_subject(subjects[si])) {
        preds.push_back(detail::run_predict(methods[mi], artifacts[best], ds.trials[i], layout, cfg));
        labels.push_back(ds.trials[i].label);
      }
      report.accuracy[mi][si] = accuracy(preds, labels);
    }
  }
  report.runs = std::move(records);
  return report;
}

// Label-shuffle control: permutes the hand labels across the whole dataset,
// preserving the overall class balance but destroying any real structure.
inline Dataset shuffle_labels(Dataset ds, std::uint64_t seed) {
  std::vector<Hand> labels;
  labels.reserve(ds.trials.size());
  for (const TrialRecord& t : ds.trials) labels.push_back(t.label);
  Rng rng(seed);
  rng.shuffle(labels);
  for (std::size_t i = 0; i < ds.trials.size(); ++i) ds.trials[i].label = labels[i];
  return ds;
}

}  // namespace hemcnn

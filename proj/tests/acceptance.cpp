// Acceptance gate. Each criterion prints one [PASS]/[FAIL]/[SKIP] line; the
// exit code is the number of failures. Runs standalone (no test framework) so
// the output doubles as a release checklist.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "hemcnn/hemcnn.hpp"

using namespace hemcnn;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Outcome {
  bool pass = false;
  bool skip = false;
  std::string detail;
};

Outcome pass(std::string detail) { return {true, false, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, false, std::move(detail)}; }
Outcome skip(std::string detail) { return {false, true, std::move(detail)}; }

void run_criterion(int n, const std::function<Outcome()>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    out = body();
  } catch (const std::exception& e) {
    out = fail(std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const char* tag = out.skip ? "SKIP" : out.pass ? "PASS" : "FAIL";
  std::printf("[%s] criterion %d: %s (%.1f s)\n", tag, n, out.detail.c_str(), secs);
  std::fflush(stdout);
  if (!out.pass && !out.skip) ++g_failures;
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Dataset preprocessed_synthetic(SyntheticConfig cfg) {
  Dataset ds = generate_synthetic(cfg);
  for (TrialRecord& t : ds.trials) t = preprocess(t, MbllParams{}, PreprocessConfig{});
  return ds;
}

std::vector<double> method_row(const LosoReport& rep, Method m) {
  for (std::size_t i = 0; i < rep.methods.size(); ++i)
    if (rep.methods[i] == m) return rep.accuracy[i];
  throw std::runtime_error("method missing from report");
}

std::string format_secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", s);
  return buf;
}

// --------------------------------------------------------------------------

Outcome c1_geometry() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  const HemCNNModel m = build(Variant::Both, ChannelLayout::standard(), rng);
  if (m.param_count() != 94)
    return fail("expected 94 parameters, got " + std::to_string(m.param_count()));
  Tensor2 x(48, 38, 0.25);
  const ForwardTrace t = forward(m, x);
  const bool shapes = t.z1.rows == 24 && t.z1.cols == 29 && t.z2.rows == 24 &&
                      t.z2.cols == 13 && t.z3.rows == 24 && t.z3.cols == 5;
  if (!shapes) return fail("layer chain is not 24x29 -> 24x13 -> 24x5");
  if (!std::isfinite(t.logits[0]) || !std::isfinite(t.logits[1]))
    return fail("non-finite logits");
  const double secs = elapsed_since(t0);
  if (secs >= 1.0) return fail("took " + format_secs(secs) + " s (budget 1 s)");
  return pass("94 params, 48x38 -> 24x29 -> 24x13 -> 24x5 -> 2x1");
}

Outcome c2_traceability() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(202);
  const HemCNNModel m = build(Variant::Both, ChannelLayout::standard(), rng);
  for (int i = 0; i < 1000; ++i) {
    Tensor2 x(48, 38);
    for (double& v : x.v) v = rng.normal(0.0, 1.0);
    const ForwardTrace base = forward(m, x);

    Tensor2 pert = x;  // disturb the right hemisphere; the left logit must not move
    for (int r = 24; r < 48; ++r)
      for (int c = 0; c < 38; ++c) pert(r, c) += rng.normal(0.0, 1.0);
    if (forward(m, pert).logits[0] != base.logits[0])
      return fail("left logit moved when the right hemisphere changed (input " +
                  std::to_string(i) + ")");

    Tensor2 zl = x;  // erase the left hemisphere; the right logit must not move
    zero_hemisphere(zl, Hemisphere::Left);
    if (forward(m, zl).logits[1] != base.logits[1])
      return fail("right logit moved when the left hemisphere was zeroed (input " +
                  std::to_string(i) + ")");
  }
  const double secs = elapsed_since(t0);
  if (secs >= 5.0) return fail("took " + format_secs(secs) + " s (budget 5 s)");
  return pass("1000 inputs, cross-hemisphere logits bit-identical");
}

Outcome c3_gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(303);
  const double h = 1e-5;
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const Variant variant = inst % 3 == 0   ? Variant::HbOOnly
                            : inst % 3 == 1 ? Variant::HbROnly
                                            : Variant::Both;
    HemCNNModel m = build(variant, ChannelLayout::standard(), rng);
    Tensor2 x(m.input_rows(), HemCNNModel::kInputCols);
    for (double& v : x.v) v = rng.normal(0.0, 1.0);
    const int label = inst % 2;

    const ForwardTrace t = forward(m, x);
    std::vector<double> analytic(m.param_count(), 0.0);
    backward_accumulate(m, x, t, label, 1.0, analytic);

    std::vector<double> p = get_params(m);
    std::vector<double> fd(p.size(), 0.0);
    std::vector<double> diff(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double orig = p[i];
      p[i] = orig + h;
      set_params(m, p);
      const double lp = nll_loss(forward(m, x).logp, label);
      p[i] = orig - h;
      set_params(m, p);
      const double lm = nll_loss(forward(m, x).logp, label);
      p[i] = orig;
      fd[i] = (lp - lm) / (2.0 * h);
      diff[i] = analytic[i] - fd[i];
    }
    set_params(m, p);
    const double rel = l2(diff) / std::max({l2(analytic), l2(fd), 1e-12});
    worst = std::max(worst, rel);
  }
  if (worst >= 1e-5)
    return fail("worst relative gradient error " + std::to_string(worst) + " >= 1e-5");
  const double secs = elapsed_since(t0);
  if (secs >= 30.0) return fail("took " + format_secs(secs) + " s (budget 30 s)");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "20 instances, worst relative error %.2e", worst);
  return pass(buf);
}

Outcome c4_optimizer() {
  std::vector<double> theta{0.0};
  const std::vector<double> grad{1.0};
  AdamState st(1);
  adam_step(theta, grad, st, 0.03);
  if (std::abs(theta[0] + 0.03) > 1e-6)
    return fail("first Adam step gave " + format_double(theta[0]));
  const TrainSchedule s;
  const double want = 0.03 * std::pow(0.9, 14.0);
  if (std::abs(lr_at_epoch(s, 14) - want) > 1e-12)
    return fail("lr_at_epoch(14) = " + format_double(lr_at_epoch(s, 14)));
  return pass("first Adam step -0.03, lr_at_epoch(14) = 0.03*0.9^14");
}

Outcome c5_protocol() {
  SyntheticConfig sc;
  sc.noise_sd = 0.1;
  sc.seed = 505;
  const Dataset ds = preprocessed_synthetic(sc);
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(ds.trials.size()); ++i)
    if (ds.trials[i].subject != 1) pool.push_back(i);
  if (pool.size() != 220) return fail("pool has " + std::to_string(pool.size()) + " trials");

  Rng rng(derive_seed(505, {0}));
  const SplitResult split = split_train_val(ds, pool, EvalConfig{}.train_fraction, rng);
  if (split.train.size() != 121 || split.val.size() != 99)
    return fail("split " + std::to_string(split.train.size()) + "/" +
                std::to_string(split.val.size()));

  std::vector<const TrialRecord*> train_trials;
  for (int i : split.train) train_trials.push_back(&ds.trials[i]);
  const std::vector<Example> ex =
      augment(train_trials, AugmentConfig{}, PreprocessConfig{}.zscore_epsilon, rng);
  if (ex.size() != 605)
    return fail("augmentation yielded " + std::to_string(ex.size()) + " examples");
  return pass("pool 220, split 121/99, augmented 605");
}

Outcome c6_synthetic_loso() {
  const auto t0 = std::chrono::steady_clock::now();
  SyntheticConfig sc;  // defaults: 12 subjects, contrast 1.0 vs 0.2, noise 0.5
  sc.seed = 606;
  const Dataset ds = preprocessed_synthetic(sc);
  const ChannelLayout layout = ChannelLayout::standard();
  const EvalConfig cfg;

  const LosoReport rep = run_loso(ds, layout, {Method::HemCNN}, cfg, 6001);
  const double med = median(method_row(rep, Method::HemCNN));

  const Dataset shuffled = shuffle_labels(ds, derive_seed(6001, {99}));
  const LosoReport ctrl = run_loso(shuffled, layout, {Method::HemCNN}, cfg, 6002);
  const double med_ctrl = median(method_row(ctrl, Method::HemCNN));

  const double secs = elapsed_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "median %.3f (need >= 0.90), shuffled %.3f (need 0.30..0.70)",
                med, med_ctrl);
  if (med < 0.90 || med_ctrl < 0.30 || med_ctrl > 0.70) return fail(buf);
  if (secs >= 600.0) return fail("took " + format_secs(secs) + " s (budget 600 s)");
  return pass(buf);
}

Outcome c7_statistics() {
  const KruskalResult kw = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
  if (std::abs(kw.h - 3.857) > 1e-3 || std::abs(kw.p - 0.0495) > 1e-3) {
    return fail("kruskal_wallis({1,2,3},{4,5,6}) gave H=" + format_double(kw.h) +
                ", p=" + format_double(kw.p));
  }
  Rng rng(707);
  for (int cse = 0; cse < 100; ++cse) {
    std::vector<std::vector<double>> groups(2 + rng.uniform_int(3));
    for (auto& g : groups) {
      g.resize(3 + rng.uniform_int(6));
      for (double& v : g) v = rng.normal(0.0, 2.0);
    }
    const KruskalResult base = kruskal_wallis(groups);
    auto transformed = groups;
    for (auto& g : transformed)
      for (double& v : g) v = 4.0 * v + 3.0;  // strictly increasing map
    const KruskalResult lin = kruskal_wallis(transformed);
    transformed = groups;
    for (auto& g : transformed)
      for (double& v : g) v = std::atan(v);
    const KruskalResult mono = kruskal_wallis(transformed);
    if (lin.h != base.h || lin.p != base.p || mono.h != base.h || mono.p != base.p)
      return fail("monotone transform changed the statistic (case " + std::to_string(cse) + ")");
  }
  return pass("H = 3.857, p = 0.0495; rank invariance exact on 100 cases");
}

Outcome c8_baselines() {
  const ChannelLayout layout = ChannelLayout::standard();
  const EvalConfig cfg;

  SyntheticConfig clean;
  clean.noise_sd = 0.05;
  clean.seed = 808;
  const Dataset ds_clean = preprocessed_synthetic(clean);
  const LosoReport rep_clean =
      run_loso(ds_clean, layout, {Method::GLM, Method::DeltaHb}, cfg, 8001);
  const double med_glm = median(method_row(rep_clean, Method::GLM));
  const double med_dhb = median(method_row(rep_clean, Method::DeltaHb));
  if (med_glm < 0.9 || med_dhb < 0.9) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "clean data: GLM %.3f, DeltaHb %.3f (need >= 0.9)",
                  med_glm, med_dhb);
    return fail(buf);
  }

  SyntheticConfig messy;  // per-trial gain and slow drift on top of noise
  messy.noise_sd = 0.3;
  messy.gain_range = {0.5, 2.0};
  messy.drift_slope_sd = 0.05;
  messy.seed = 809;
  const Dataset ds_messy = preprocessed_synthetic(messy);
  const LosoReport rep_messy =
      run_loso(ds_messy, layout, {Method::HemCNN, Method::GLM}, cfg, 8002);
  const double med_cnn = median(method_row(rep_messy, Method::HemCNN));
  const double med_glm2 = median(method_row(rep_messy, Method::GLM));
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "clean GLM %.3f / DeltaHb %.3f; gain+drift HemCNN %.3f vs GLM %.3f", med_glm,
                med_dhb, med_cnn, med_glm2);
  if (med_cnn - med_glm2 < 0.0) return fail(buf);
  return pass(buf);
}

Outcome c9_signal_chain() {
  const double fs = 12.6;
  {
    const int n = 2520;  // 200 s
    std::vector<double> tone(n), slow(n);
    for (int i = 0; i < n; ++i) {
      tone[i] = std::sin(2.0 * std::numbers::pi * 2.0 * i / fs);
      slow[i] = std::sin(2.0 * std::numbers::pi * 0.05 * i / fs);
    }
    const std::vector<double> y_tone = lowpass(tone, fs, 0.25);
    const std::vector<double> y_slow = lowpass(slow, fs, 0.25);
    double amp_tone = 0.0, amp_slow = 0.0;
    for (int i = n / 4; i < 3 * n / 4; ++i) {
      amp_tone = std::max(amp_tone, std::abs(y_tone[i]));
      amp_slow = std::max(amp_slow, std::abs(y_slow[i]));
    }
    if (amp_tone >= 0.01) return fail("2 Hz tone leaked amplitude " + format_double(amp_tone));
    if (std::abs(amp_slow - 1.0) > 0.02)
      return fail("0.05 Hz passband amplitude " + format_double(amp_slow));
  }
  {
    Rng rng(909);
    Tensor2 conc(2, 64);
    for (double& v : conc.v) v = rng.uniform(-2.0, 2.0);
    const Tensor2 back = mbll(mbll_forward(conc, MbllParams{}), MbllParams{});
    std::vector<double> diff(conc.v.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = back.v[i] - conc.v[i];
    const double rel = l2(diff) / l2(conc.v);
    if (rel >= 1e-10) return fail("MBLL round-trip relative error " + format_double(rel));
  }
  {
    SyntheticConfig sc;
    sc.n_subjects = 2;
    sc.seed = 910;
    Dataset ds = preprocessed_synthetic(sc);
    for (const TrialRecord& t : ds.trials) {
      const TrialRecord z = zscore_trial(t, PreprocessConfig{}.zscore_epsilon);
      for (int parity = 0; parity < 2; ++parity) {
        double sum = 0.0, sq = 0.0;
        int count = 0;
        for (int r = parity; r < z.samples.rows; r += 2)
          for (int c = 0; c < z.samples.cols; ++c) {
            sum += z.samples(r, c);
            sq += z.samples(r, c) * z.samples(r, c);
            ++count;
          }
        const double mean = sum / count;
        const double sd = std::sqrt(std::max(0.0, sq / count - mean * mean));
        if (std::abs(mean) > 1e-9) return fail("z-scored mean " + format_double(mean));
        if (std::abs(sd - 1.0) > 1e-6) return fail("z-scored sd " + format_double(sd));
      }
    }
  }
  return pass("lowpass stop/pass bands, MBLL round-trip, per-Hb z-scoring");
}

std::string cli_path() {
  if (const char* env = std::getenv("HEMCNN_CLI_PATH")) return env;
#ifdef HEMCNN_CLI_PATH
  return HEMCNN_CLI_PATH;
#else
  return std::string();
#endif
}

Outcome c10_determinism() {
  const std::string exe = cli_path();
  if (exe.empty()) return fail("HEMCNN_CLI_PATH is not set; cannot spawn the CLI");

  const fs::path dir = fs::temp_directory_path() / "hemcnn_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const nlohmann::json cfg = {
      {"dataset",
       {{"synthetic", {{"n_subjects", 3}, {"trials_per_hand", 3}, {"noise_sd", 0.2}}}}},
      {"methods", {"HemCNN", "DeltaHb"}},
      {"schedule", {{"epochs", 2}}},
      {"loso", {{"runs_per_subject", 2}}}};
  {
    std::ofstream out(dir / "config.json");
    out << cfg.dump(2) << "\n";
  }

  auto invoke = [&](const std::string& out_name, int jobs) {
    const std::string cmd = "\"" + exe + "\" evaluate --config \"" +
                            (dir / "config.json").string() + "\" --seed 1010 --jobs " +
                            std::to_string(jobs) + " --out \"" + (dir / out_name).string() +
                            "\" > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  if (invoke("a", 1) != 0) return fail("evaluate --jobs 1 exited nonzero");
  if (invoke("b", 8) != 0) return fail("evaluate --jobs 8 exited nonzero");

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(dir / "a" / "summary.json");
  const std::string b = slurp(dir / "b" / "summary.json");
  fs::remove_all(dir);
  if (a.empty() || a != b) return fail("summary.json differs between --jobs 1 and --jobs 8");
  return pass("summary.json byte-identical at --jobs 1 and --jobs 8");
}

Outcome c11_real_dataset() {
  const char* manifest = std::getenv("HYGRIP_MANIFEST");
  if (manifest == nullptr)
    return skip("set HYGRIP_MANIFEST to a dataset manifest to enable this check");
  LoadedDataset ld = load_dataset(manifest);
  if (ld.stage == Stage::Hb || ld.stage == Stage::RawOD) {
    for (TrialRecord& t : ld.data.trials) t = preprocess(t, MbllParams{}, PreprocessConfig{});
    ld.stage = Stage::Preprocessed;
  }
  const LosoReport rep =
      run_loso(ld.data, ld.layout, {Method::HemCNN, Method::GLM}, EvalConfig{}, 1111);
  const double med_cnn = median(method_row(rep, Method::HemCNN));
  const double med_glm = median(method_row(rep, Method::GLM));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "HemCNN median %.3f (need 0.65..0.90), GLM %.3f", med_cnn,
                med_glm);
  if (med_cnn < 0.65 || med_cnn > 0.90 || med_cnn <= med_glm) return fail(buf);
  return pass(buf);
}

}  // namespace

int main() {
  run_criterion(1, c1_geometry);
  run_criterion(2, c2_traceability);
  run_criterion(3, c3_gradients);
  run_criterion(4, c4_optimizer);
  run_criterion(5, c5_protocol);
  run_criterion(6, c6_synthetic_loso);
  run_criterion(7, c7_statistics);
  run_criterion(8, c8_baselines);
  run_criterion(9, c9_signal_chain);
  run_criterion(10, c10_determinism);
  run_criterion(11, c11_real_dataset);
  std::printf("acceptance: %d criteria failed\n", g_failures);
  return g_failures;
}

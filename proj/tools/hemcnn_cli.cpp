// Command-line front end: synth | preprocess | train | evaluate | stats |
// report. Every command takes its randomness from an explicit seed (flag or
// config) and writes deterministic artifacts, so runs are reproducible byte
// for byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hemcnn/hemcnn.hpp"

namespace fs = std::filesystem;
using namespace hemcnn;

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string methods_csv;
  int jobs = 0;  // 0 = not set on the command line
  std::string out;
};

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_run_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (!args.out.empty()) cfg.out_dir = args.out;
  if (!args.methods_csv.empty()) {
    cfg.methods.clear();
    std::string cur;
    auto flush = [&cfg, &cur]() {
      if (cur.empty()) return;
      if (cur == "all") {
        cfg.methods.assign(kAllMethods, kAllMethods + 7);
      } else {
        cfg.methods.push_back(method_from_string(cur));
      }
      cur.clear();
    };
    for (char ch : args.methods_csv) {
      if (ch == ',') {
        flush();
      } else if (ch != ' ') {
        cur.push_back(ch);
      }
    }
    flush();
    if (cfg.methods.empty()) throw std::runtime_error("--methods resolved to an empty list");
  }
  return cfg;
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed)
    throw std::runtime_error(
        "an explicit seed is required for reproducibility; pass --seed or set \"seed\" in the "
        "config");
  return *cfg.seed;
}

fs::path require_out(const RunConfig& cfg) {
  if (!cfg.out_dir || cfg.out_dir->empty())
    throw std::runtime_error("an output location is required; pass --out or set \"out\"");
  return fs::path(*cfg.out_dir);
}

// Loads the configured dataset and brings it to the Preprocessed stage.
LoadedDataset acquire_preprocessed(const RunConfig& cfg, std::uint64_t seed) {
  LoadedDataset ld;
  if (cfg.manifest_path) {
    ld = load_dataset(*cfg.manifest_path);
  } else if (cfg.synthetic) {
    SyntheticConfig sc = *cfg.synthetic;
    if (!cfg.synthetic_has_seed) sc.seed = seed;
    ld.data = generate_synthetic(sc);
    ld.layout = ChannelLayout::standard();
    ld.fs_native = sc.fs;
    ld.stage = Stage::Hb;
  } else {
    throw std::runtime_error("config needs a dataset (manifest or synthetic)");
  }
  if (ld.stage == Stage::Preprocessed) return ld;
  if (ld.stage == Stage::Normalized)
    throw std::runtime_error("dataset is already normalized; evaluation expects the "
                             "preprocessed stage");
  for (TrialRecord& t : ld.data.trials) t = preprocess(t, cfg.mbll, cfg.preprocess);
  ld.fs_native = cfg.preprocess.fs_out;
  ld.stage = Stage::Preprocessed;
  return ld;
}

int cmd_synth(const CommonArgs& args) {
  RunConfig cfg = resolve_config(args);
  const std::uint64_t seed = require_seed(cfg);
  const fs::path out = require_out(cfg);
  SyntheticConfig sc = cfg.synthetic ? *cfg.synthetic : SyntheticConfig{};
  if (!cfg.synthetic || !cfg.synthetic_has_seed) sc.seed = seed;
  const Dataset ds = generate_synthetic(sc);
  const fs::path manifest =
      export_dataset(ds, ChannelLayout::standard(), sc.fs, Stage::Hb, out);
  std::cout << "wrote " << ds.trials.size() << " trials to " << manifest.string() << "\n";
  return 0;
}

int cmd_preprocess(const CommonArgs& args, const std::string& manifest_path) {
  RunConfig cfg = resolve_config(args);
  const fs::path out = require_out(cfg);
  const std::string src = !manifest_path.empty()
                              ? manifest_path
                              : (cfg.manifest_path ? *cfg.manifest_path : std::string());
  if (src.empty())
    throw std::runtime_error("preprocess needs a manifest; pass --manifest or configure one");
  LoadedDataset ld = load_dataset(src);
  if (ld.stage == Stage::Preprocessed || ld.stage == Stage::Normalized)
    throw std::runtime_error("dataset at '" + src + "' is already preprocessed");
  for (TrialRecord& t : ld.data.trials) t = preprocess(t, cfg.mbll, cfg.preprocess);
  const fs::path manifest =
      export_dataset(ld.data, ld.layout, cfg.preprocess.fs_out, Stage::Preprocessed, out);
  std::cout << "wrote " << ld.data.trials.size() << " preprocessed trials to "
            << manifest.string() << "\n";
  return 0;
}

int cmd_train(const CommonArgs& args, const std::string& method_name) {
  RunConfig cfg = resolve_config(args);
  const std::uint64_t seed = require_seed(cfg);
  const fs::path out = require_out(cfg);
  const Method method = method_from_string(method_name);
  if (!is_cnn(method))
    throw std::runtime_error("train fits the network variants; evaluate handles " + method_name);

  LoadedDataset ld = acquire_preprocessed(cfg, seed);
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(method)}));
  HemCNNModel model = build(variant_of(method), ld.layout, rng);
  std::vector<const TrialRecord*> trials;
  for (const TrialRecord& t : ld.data.trials) trials.push_back(&t);
  std::vector<Example> examples =
      augment(trials, cfg.eval.augment, cfg.eval.zscore_epsilon, rng);
  if (model.variant != Variant::Both)
    for (Example& ex : examples) ex.x = select_variant_rows(ex.x, model.variant);
  const TrainResult tr = train(model, examples, cfg.eval.schedule, cfg.eval.dropout, rng);

  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_model(model, out.string());
  std::cout << "trained " << to_string(method) << " on " << examples.size() << " examples; "
            << "final epoch loss " << format_double(tr.epoch_loss.back()) << "; model at "
            << out.string() << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  RunConfig cfg = resolve_config(args);
  const std::uint64_t seed = require_seed(cfg);
  const fs::path out = require_out(cfg);
  LoadedDataset ld = acquire_preprocessed(cfg, seed);
  const LosoReport report =
      run_loso(ld.data, ld.layout, cfg.methods, cfg.eval, seed, cfg.jobs);
  emit_report(report, out);
  std::cout << "evaluated " << cfg.methods.size() << " method(s) over "
            << report.subjects.size() << " subjects; report in " << out.string() << "\n";
  return 0;
}

int cmd_stats(const std::string& in_path, const std::string& out_path) {
  const AccuracyTable table = read_accuracies_csv(in_path);
  if (table.methods.size() < 2)
    throw std::runtime_error("stats needs >= 2 method columns to compare");
  const nlohmann::json j = summary_json(table);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    out << j.dump(2) << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_report(const std::string& in_dir) {
  const fs::path summary_path = fs::path(in_dir) / "summary.json";
  std::ifstream in(summary_path);
  if (!in) throw std::runtime_error("cannot open '" + summary_path.string() + "'");
  nlohmann::json j;
  in >> j;

  std::cout << "method            median accuracy\n";
  for (const auto& name : j.at("methods")) {
    const double med = j.at("medians").at(name.get<std::string>()).get<double>();
    char line[64];
    std::snprintf(line, sizeof(line), "%-17s %.3f\n", name.get<std::string>().c_str(), med);
    std::cout << line;
  }
  if (!j.at("stats").is_null()) {
    const auto& kw = j["stats"]["kruskal_wallis"];
    char line[96];
    std::snprintf(line, sizeof(line), "Kruskal-Wallis H = %.4f, p = %.4g\n",
                  kw.at("H").get<double>(), kw.at("p").get<double>());
    std::cout << line;
    for (const auto& pr : j["stats"]["pairwise"]) {
      if (pr.at("significant").get<bool>()) {
        std::cout << "  significant at 0.05: " << pr.at("a").get<std::string>() << " vs "
                  << pr.at("b").get<std::string>() << "\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fNIRS hand-grip decoding: data synthesis, preprocessing, training and "
               "leave-one-subject-out evaluation"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string manifest_path, method_name = "HemCNN", stats_in, stats_out, report_in;

  auto add_common = [&args](CLI::App* cmd, bool with_methods = false) {
    cmd->add_option("--config", args.config_path, "JSON run configuration");
    cmd->add_option("--seed", args.seed, "root seed (required unless set in the config)");
    cmd->add_option("--out", args.out, "output directory or file");
    if (with_methods)
      cmd->add_option("--methods", args.methods_csv,
                      "comma-separated method list, or 'all'");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic lateralized dataset");
  add_common(synth);

  CLI::App* prep = app.add_subcommand("preprocess", "run the signal chain over a dataset");
  add_common(prep);
  prep->add_option("--manifest", manifest_path, "dataset manifest to preprocess");

  CLI::App* train_cmd = app.add_subcommand("train", "train one network on a whole dataset");
  add_common(train_cmd);
  train_cmd->add_option("--method", method_name, "HemCNN | HemCNNo | HemCNNr");

  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "leave-one-subject-out evaluation of the chosen methods");
  add_common(eval_cmd, true);
  eval_cmd->add_option("--jobs", args.jobs, "worker threads (output is independent of this)");

  CLI::App* stats_cmd =
      app.add_subcommand("stats", "rank statistics over an accuracies.csv table");
  stats_cmd->add_option("--in", stats_in, "accuracies.csv path")->required();
  stats_cmd->add_option("--out", stats_out, "summary.json path (stdout if omitted)");

  CLI::App* report_cmd = app.add_subcommand("report", "print a text summary of a report dir");
  report_cmd->add_option("--in", report_in, "directory containing summary.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(args);
    if (prep->parsed()) return cmd_preprocess(args, manifest_path);
    if (train_cmd->parsed()) return cmd_train(args, method_name);
    if (eval_cmd->parsed()) return cmd_evaluate(args);
    if (stats_cmd->parsed()) return cmd_stats(stats_in, stats_out);
    if (report_cmd->parsed()) return cmd_report(report_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}

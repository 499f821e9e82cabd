#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemcnn/csv.hpp"
#include "hemcnn/layout.hpp"
#include "hemcnn/trial.hpp"

namespace hemcnn {

struct LoadedDataset {
  Dataset data;
  ChannelLayout layout = ChannelLayout::standard();
  double fs_native = 0.0;
  Stage stage = Stage::Hb;
};

// Writes one CSV per trial plus a manifest.json that indexes them. File names
// are derived from (subject, trial index) so repeated exports are
// byte-stable.
inline std::filesystem::path export_dataset(const Dataset& ds, const ChannelLayout& layout,
                                            double fs_native, Stage stage,
                                            const std::filesystem::path& dir) {
  if (ds.trials.empty()) throw std::runtime_error("export_dataset: dataset is empty");
  std::filesystem::create_directories(dir);

  nlohmann::json manifest;
  manifest["format"] = "hemcnn-dataset-v1";
  manifest["fs_native"] = fs_native;
  manifest["stage"] = to_string(stage);
  manifest["layout"] = layout.to_json();

  std::map<int, nlohmann::json> by_subject;
  for (const TrialRecord& t : ds.trials) {
    if (t.stage != stage)
      throw std::runtime_error("export_dataset: trial stage differs from dataset stage");
    char name[64];
    std::snprintf(name, sizeof(name), "s%02d_trial%02d.csv", t.subject, t.trial_index);
    export_trial_csv(t, layout, (dir / name).string());
    nlohmann::json entry;
    entry["file"] = name;
    entry["hand"] = to_string(t.label);
    by_subject[t.subject]["trials"].push_back(entry);
    by_subject[t.subject]["id"] = t.subject;
  }
  manifest["subjects"] = nlohmann::json::array();
  for (auto& [id, subj] : by_subject) manifest["subjects"].push_back(subj);

  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw std::runtime_error("export_dataset: cannot write " + manifest_path.string());
  out << manifest.dump(2) << "\n";
  return manifest_path;
}

inline LoadedDataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in)
    throw std::runtime_error("load_dataset: cannot open manifest '" + manifest_path.string() +
                             "'");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_dataset: '" + manifest_path.string() +
                             "' is not valid JSON: " + e.what());
  }
  if (manifest.value("format", "") != std::string("hemcnn-dataset-v1"))
    throw std::runtime_error("load_dataset: unknown manifest format in '" +
                             manifest_path.string() + "'");

  LoadedDataset out;
  out.layout = ChannelLayout::from_json(manifest.at("layout"));
  out.fs_native = manifest.at("fs_native").get<double>();
  out.stage = stage_from_string(manifest.at("stage").get<std::string>());
  if (!(out.fs_native > 0.0)) throw std::runtime_error("load_dataset: fs_native must be > 0");

  const auto& subjects = manifest.at("subjects");
  if (!subjects.is_array() || subjects.empty())
    throw std::runtime_error("load_dataset: manifest lists no subjects");

  const std::filesystem::path base = manifest_path.parent_path();
  for (const auto& subj : subjects) {
    const int id = subj.at("id").get<int>();
    int per_hand[2] = {0, 0};
    const auto& trials = subj.at("trials");
    if (!trials.is_array() || trials.empty())
      throw std::runtime_error("load_dataset: subject " + std::to_string(id) + " has no trials");
    for (const auto& entry : trials) {
      const std::string file = entry.at("file").get<std::string>();
      const Hand hand = hand_from_string(entry.at("hand").get<std::string>());
      const std::filesystem::path path = base / file;
      if (!std::filesystem::exists(path))
        throw std::runtime_error("load_dataset: missing trial file '" + path.string() + "'");
      TrialRecord t = import_trial_csv(path.string());
      if (t.samples.rows != out.layout.n_rows())
        throw std::runtime_error("load_dataset: '" + path.string() + "' has " +
                                 std::to_string(t.samples.rows) + " channel columns, layout " +
                                 "requires " + std::to_string(out.layout.n_rows()));
      if (t.subject != id)
        throw std::runtime_error("load_dataset: '" + path.string() +
                                 "' subject metadata disagrees with the manifest");
      if (t.label != hand)
        throw std::runtime_error("load_dataset: '" + path.string() +
                                 "' hand metadata disagrees with the manifest");
      if (t.stage != out.stage)
        throw std::runtime_error("load_dataset: '" + path.string() +
                                 "' stage disagrees with the manifest");
      if (std::fabs(t.fs - out.fs_native) > 1e-9 * std::max(1.0, out.fs_native))
        throw std::runtime_error("load_dataset: '" + path.string() +
                                 "' sample rate disagrees with fs_native");
      ++per_hand[hand == Hand::Left ? 0 : 1];
      out.data.trials.push_back(std::move(t));
    }
    if (per_hand[0] < 2 || per_hand[1] < 2)
      throw std::runtime_error("load_dataset: subject " + std::to_string(id) +
                               " needs >= 2 trials per hand");
  }
  return out;
}

}  // namespace hemcnn

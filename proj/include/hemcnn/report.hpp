#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemcnn/csv.hpp"
#include "hemcnn/eval.hpp"
#include "hemcnn/stats.hpp"

namespace hemcnn {

// Per-method accuracy table, the exchange format between `evaluate`,
// `stats` and external plotting.
struct AccuracyTable {
  std::vector<std::string> methods;
  std::vector<int> subjects;
  std::vector<std::vector<double>> accuracy;  // [method][subject position]
};

inline AccuracyTable table_from_report(const LosoReport& report) {
  AccuracyTable t;
  for (Method m : report.methods) t.methods.push_back(to_string(m));
  t.subjects = report.subjects;
  t.accuracy = report.accuracy;
  return t;
}

inline void write_accuracies_csv(const AccuracyTable& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_accuracies_csv: cannot open '" + path.string() + "'");
  out << "subject";
  for (const auto& m : t.methods) out << "," << m;
  out << "\n";
  for (std::size_t si = 0; si < t.subjects.size(); ++si) {
    out << t.subjects[si];
    for (std::size_t mi = 0; mi < t.methods.size(); ++mi)
      out << "," << format_double(t.accuracy[mi][si]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_accuracies_csv: write failed");
}

inline AccuracyTable read_accuracies_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_accuracies_csv: cannot open '" + path.string() + "'");
  AccuracyTable t;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_accuracies_csv: empty file '" + path.string() + "'");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "subject")
    throw std::runtime_error("read_accuracies_csv: header must be 'subject,<method>...'");
  t.methods.assign(header.begin() + 1, header.end());
  t.accuracy.assign(t.methods.size(), {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("read_accuracies_csv: ragged row in '" + path.string() + "'");
    t.subjects.push_back(static_cast<int>(parse_double(cells[0], path.string())));
    for (std::size_t mi = 0; mi < t.methods.size(); ++mi)
      t.accuracy[mi].push_back(parse_double(cells[mi + 1], path.string()));
  }
  if (t.subjects.empty())
    throw std::runtime_error("read_accuracies_csv: no data rows in '" + path.string() + "'");
  return t;
}

// Medians plus the rank-test block. With a single method there is nothing to
// compare and the stats block is null.
inline nlohmann::json summary_json(const AccuracyTable& t) {
  nlohmann::json j;
  j["methods"] = t.methods;
  j["subjects"] = t.subjects;
  for (std::size_t mi = 0; mi < t.methods.size(); ++mi) {
    j["accuracies"][t.methods[mi]] = t.accuracy[mi];
    j["medians"][t.methods[mi]] = median(t.accuracy[mi]);
  }
  if (t.methods.size() >= 2) {
    const KruskalResult kw = kruskal_wallis(t.accuracy);
    nlohmann::json stats;
    stats["kruskal_wallis"]["H"] = kw.h;
    stats["kruskal_wallis"]["p"] = kw.p;
    stats["pairwise"] = nlohmann::json::array();
    for (const PosthocPair& pr : pairwise_posthoc(t.accuracy)) {
      nlohmann::json e;
      e["a"] = t.methods[pr.a];
      e["b"] = t.methods[pr.b];
      e["mean_rank_diff"] = pr.mean_rank_diff;
      e["critical"] = pr.critical;
      e["significant"] = pr.significant;
      stats["pairwise"].push_back(e);
    }
    j["stats"] = stats;
  } else {
    j["stats"] = nullptr;
  }
  return j;
}

inline nlohmann::json run_record_json(const RunRecord& r) {
  nlohmann::json j;
  j["method"] = to_string(r.method);
  j["subject"] = r.subject;
  j["run"] = r.run;
  j["seed"] = r.seed;
  j["val_accuracy"] = r.val_accuracy;
  j["selected"] = r.selected;
  j["failed"] = r.failed;
  if (r.failed) j["error"] = r.error;
  if (!r.epoch_loss.empty()) j["epoch_loss"] = r.epoch_loss;
  return j;
}

// Writes accuracies.csv, summary.json and runs.jsonl. No timestamps or host
// details anywhere, so rerunning with the same seed reproduces the files
// byte for byte.
inline void emit_report(const LosoReport& report, const std::filesystem::path& dir) {
  if (report.methods.empty() || report.subjects.empty())
    throw std::runtime_error("emit_report: empty report");
  std::filesystem::create_directories(dir);
  const AccuracyTable t = table_from_report(report);
  write_accuracies_csv(t, dir / "accuracies.csv");

  std::ofstream summary(dir / "summary.json");
  if (!summary) throw std::runtime_error("emit_report: cannot write summary.json");
  summary << summary_json(t).dump(2) << "\n";

  std::ofstream runs(dir / "runs.jsonl");
  if (!runs) throw std::runtime_error("emit_report: cannot write runs.jsonl");
  for (const RunRecord& r : report.runs) runs << run_record_json(r).dump() << "\n";
}

}  // namespace hemcnn

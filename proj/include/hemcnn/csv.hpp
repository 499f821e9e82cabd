#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemcnn/layout.hpp"
#include "hemcnn/trial.hpp"

namespace hemcnn {

// Shortest 17-significant-digit form; round-trips exactly through
// from_chars.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::runtime_error(context + ": cannot parse number '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

// One trial per CSV file. Metadata rides in leading comment lines, then a
// header row and one data row per time sample (column 0 = time in seconds,
// columns 1..48 per the layout row order):
//
//   # subject: 3
//   # trial: 7
//   # hand: left
//   # fs: 12.6
//   # stage: hb
//   t,ch01_hbo,ch01_hbr,...,ch24_hbr
//   0,...
inline void export_trial_csv(const TrialRecord& trial, const ChannelLayout& layout,
                             const std::string& path) {
  if (trial.samples.rows != layout.n_rows())
    throw std::runtime_error("export_trial_csv: trial rows do not match the layout");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_trial_csv: cannot open '" + path + "'");
  out << "# subject: " << trial.subject << "\n";
  out << "# trial: " << trial.trial_index << "\n";
  out << "# hand: " << to_string(trial.label) << "\n";
  out << "# fs: " << format_double(trial.fs) << "\n";
  out << "# stage: " << to_string(trial.stage) << "\n";
  out << "t";
  for (int r = 0; r < layout.n_rows(); ++r) {
    const RowDesc& rd = layout.row_order()[r];
    char name[32];
    if (trial.stage == Stage::RawOD) {
      std::snprintf(name, sizeof(name), ",ch%02d_wl%d", rd.channel + 1,
                    rd.hb == HbType::HbO ? 1 : 2);
    } else {
      std::snprintf(name, sizeof(name), ",ch%02d_%s", rd.channel + 1,
                    rd.hb == HbType::HbO ? "hbo" : "hbr");
    }
    out << name;
  }
  out << "\n";
  for (int c = 0; c < trial.samples.cols; ++c) {
    out << format_double(static_cast<double>(c) / trial.fs);
    for (int r = 0; r < trial.samples.rows; ++r) out << "," << format_double(trial.samples(r, c));
    out << "\n";
  }
  if (!out) throw std::runtime_error("export_trial_csv: write failed for '" + path + "'");
}

inline TrialRecord import_trial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import_trial_csv: cannot open '" + path + "'");

  TrialRecord trial;
  bool have_subject = false, have_trial = false, have_hand = false, have_fs = false,
       have_stage = false;
  std::string line;
  int n_cols = -1;
  std::vector<std::vector<double>> rows;

  auto fail = [&path](const std::string& msg) -> std::runtime_error {
    return std::runtime_error("import_trial_csv: " + path + ": " + msg);
  };

  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) throw fail("malformed metadata line '" + line + "'");
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      auto strip = [](std::string& s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
      };
      strip(key);
      strip(value);
      if (key == "subject") {
        trial.subject = static_cast<int>(parse_double(value, path));
        have_subject = true;
      } else if (key == "trial") {
        trial.trial_index = static_cast<int>(parse_double(value, path));
        have_trial = true;
      } else if (key == "hand") {
        trial.label = hand_from_string(value);
        have_hand = true;
      } else if (key == "fs") {
        trial.fs = parse_double(value, path);
        have_fs = true;
      } else if (key == "stage") {
        trial.stage = stage_from_string(value);
        have_stage = true;
      } else {
        throw fail("unknown metadata key '" + key + "'");
      }
      continue;
    }
    if (!header_seen) {
      const auto cells = split_csv_line(line);
      if (cells.empty() || cells[0] != "t") throw fail("header row must start with 't'");
      n_cols = static_cast<int>(cells.size());
      if (n_cols < 2) throw fail("header has no channel columns");
      header_seen = true;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != n_cols)
      throw fail("data row has " + std::to_string(cells.size()) + " cells, expected " +
                 std::to_string(n_cols));
    std::vector<double> vals(cells.size() - 1);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      vals[i - 1] = parse_double(cells[i], path);
      if (!std::isfinite(vals[i - 1])) throw fail("non-finite sample value");
    }
    rows.push_back(std::move(vals));
  }

  if (!have_hand) throw fail("missing 'hand' metadata");
  if (!have_fs) throw fail("missing 'fs' metadata");
  if (!have_stage) throw fail("missing 'stage' metadata");
  if (!have_subject) throw fail("missing 'subject' metadata");
  if (!have_trial) throw fail("missing 'trial' metadata");
  if (!header_seen || rows.empty()) throw fail("no data rows");
  if (!(trial.fs > 0.0)) throw fail("fs must be positive");

  const int n_channels = n_cols - 1;
  trial.samples = Tensor2(n_channels, static_cast<int>(rows.size()));
  for (int c = 0; c < static_cast<int>(rows.size()); ++c)
    for (int r = 0; r < n_channels; ++r) trial.samples(r, c) = rows[c][r];
  return trial;
}

}  // namespace hemcnn

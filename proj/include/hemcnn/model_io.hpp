#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hemcnn/model.hpp"

namespace hemcnn {

inline nlohmann::json filter_to_json(const ConvFilter& f) {
  nlohmann::json j;
  std::vector<std::vector<double>> k(f.kernel.rows, std::vector<double>(f.kernel.cols));
  for (int r = 0; r < f.kernel.rows; ++r)
    for (int c = 0; c < f.kernel.cols; ++c) k[r][c] = f.kernel(r, c);
  j["kernel"] = k;
  j["bias"] = f.bias;
  j["stride"] = {f.stride_r, f.stride_c};
  return j;
}

inline ConvFilter filter_from_json(const nlohmann::json& j) {
  const auto& k = j.at("kernel");
  if (!k.is_array() || k.empty() || !k[0].is_array())
    throw std::runtime_error("model file: kernel must be a nested array");
  const int rows = static_cast<int>(k.size());
  const int cols = static_cast<int>(k[0].size());
  Tensor2 kernel(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(k[r].size()) != cols)
      throw std::runtime_error("model file: ragged kernel rows");
    for (int c = 0; c < cols; ++c) kernel(r, c) = k[r][c].get<double>();
  }
  const auto& s = j.at("stride");
  if (!s.is_array() || s.size() != 2)
    throw std::runtime_error("model file: stride must be [rows, cols]");
  return ConvFilter(std::move(kernel), j.at("bias").get<double>(), s[0].get<int>(),
                    s[1].get<int>());
}

inline nlohmann::json model_to_json(const HemCNNModel& m) {
  nlohmann::json j;
  j["format"] = "hemcnn-model-v1";
  j["variant"] = to_string(m.variant);
  j["layout_fingerprint"] = m.layout_fingerprint;
  j["filters"]["cf1"] = filter_to_json(m.cf1);
  j["filters"]["cf2"] = filter_to_json(m.cf2);
  j["filters"]["cf3"] = filter_to_json(m.cf3);
  j["filters"]["cf4"] = filter_to_json(m.cf4);
  return j;
}

inline HemCNNModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != std::string("hemcnn-model-v1"))
    throw std::runtime_error("model file: unknown format tag");
  HemCNNModel m;
  m.variant = variant_from_string(j.at("variant").get<std::string>());
  m.layout_fingerprint = j.at("layout_fingerprint").get<std::string>();
  m.cf1 = filter_from_json(j.at("filters").at("cf1"));
  m.cf2 = filter_from_json(j.at("filters").at("cf2"));
  m.cf3 = filter_from_json(j.at("filters").at("cf3"));
  m.cf4 = filter_from_json(j.at("filters").at("cf4"));
  return m;
}

inline void save_model(const HemCNNModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "' for writing");
  out << model_to_json(m).dump(2) << "\n";
  if (!out) throw std::runtime_error("save_model: write failed for '" + path + "'");
}

inline HemCNNModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_model: '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

// Loading against a concrete dataset layout: a model trained under a
// different channel wiring must not be silently applied.
inline HemCNNModel load_model(const std::string& path, const ChannelLayout& layout) {
  HemCNNModel m = load_model(path);
  if (m.layout_fingerprint != layout.fingerprint())
    throw std::runtime_error("load_model: layout fingerprint mismatch (model " +
                             m.layout_fingerprint + ", dataset " + layout.fingerprint() + ")");
  return m;
}

}  // namespace hemcnn

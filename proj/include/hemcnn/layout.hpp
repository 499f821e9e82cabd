#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hemcnn {

enum class Hand { Left, Right };
enum class Hemisphere { Left, Right };
enum class HbType { HbO, HbR };

inline std::string to_string(Hand h) { return h == Hand::Left ? "left" : "right"; }

inline Hand hand_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "left") return Hand::Left;
  if (t == "right") return Hand::Right;
  throw std::runtime_error("unknown hand label '" + s + "'");
}

struct RowDesc {
  int channel = 0;
  HbType hb = HbType::HbO;
};

// Row ordering contract for the 48-row concentration matrices: left-hemisphere
// channels occupy rows 0..23, right-hemisphere channels rows 24..47, and each
// channel contributes an (HbO, HbR) pair of consecutive rows. The network
// architecture depends on this ordering, so it is validated once here and
// everything downstream indexes through it.
class ChannelLayout {
 public:
  static constexpr int kChannels = 24;
  static constexpr int kHbPerChannel = 2;
  static constexpr int kRows = kChannels * kHbPerChannel;

  ChannelLayout(std::vector<Hemisphere> hemisphere_of_channel,
                std::vector<std::pair<int, int>> symmetric_pairs)
      : hemi_(std::move(hemisphere_of_channel)), pairs_(std::move(symmetric_pairs)) {
    validate();
    build_row_order();
  }

  // Channels 0..11 left, 12..23 right, pair i <-> i+12.
  static ChannelLayout standard() {
    std::vector<Hemisphere> hemi(kChannels);
    std::vector<std::pair<int, int>> pairs;
    for (int c = 0; c < kChannels; ++c)
      hemi[c] = c < kChannels / 2 ? Hemisphere::Left : Hemisphere::Right;
    for (int c = 0; c < kChannels / 2; ++c) pairs.emplace_back(c, c + kChannels / 2);
    return ChannelLayout(std::move(hemi), std::move(pairs));
  }

  int n_channels() const { return kChannels; }
  int n_rows() const { return kRows; }

  Hemisphere hemisphere_of_channel(int c) const { return hemi_.at(c); }
  const std::vector<std::pair<int, int>>& symmetric_pairs() const { return pairs_; }
  const std::vector<RowDesc>& row_order() const { return rows_; }

  // Row index of (channel, hb) under this layout.
  int row_of(int channel, HbType hb) const {
    for (int r = 0; r < kRows; ++r)
      if (rows_[r].channel == channel && rows_[r].hb == hb) return r;
    throw std::logic_error("ChannelLayout: channel not in row order");
  }

  Hemisphere hemisphere_of_row(int row) const { return hemi_[rows_.at(row).channel]; }
  HbType hb_of_row(int row) const { return rows_.at(row).hb; }

  // FNV-1a over the canonical serialization; embedded in model files so a
  // trained model refuses to run against a differently wired dataset.
  std::string fingerprint() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](std::uint64_t x) {
      for (int i = 0; i < 8; ++i) {
        h ^= (x >> (8 * i)) & 0xFF;
        h *= 0x100000001B3ULL;
      }
    };
    for (auto he : hemi_) mix(he == Hemisphere::Left ? 1 : 2);
    for (auto& p : pairs_) {
      mix(static_cast<std::uint64_t>(p.first));
      mix(static_cast<std::uint64_t>(p.second) + 1000);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n_optode_channels"] = kChannels;
    j["hb_per_channel"] = kHbPerChannel;
    std::vector<std::string> hemi;
    for (auto h : hemi_) hemi.push_back(h == Hemisphere::Left ? "L" : "R");
    j["hemisphere_of_channel"] = hemi;
    std::vector<std::vector<int>> pairs;
    for (auto& p : pairs_) pairs.push_back({p.first, p.second});
    j["symmetric_pairs"] = pairs;
    return j;
  }

  static ChannelLayout from_json(const nlohmann::json& j) {
    if (j.value("n_optode_channels", kChannels) != kChannels)
      throw std::runtime_error("layout: n_optode_channels must be 24");
    if (j.value("hb_per_channel", kHbPerChannel) != kHbPerChannel)
      throw std::runtime_error("layout: hb_per_channel must be 2");
    std::vector<Hemisphere> hemi;
    for (const auto& s : j.at("hemisphere_of_channel")) {
      const std::string v = s.get<std::string>();
      if (v == "L")
        hemi.push_back(Hemisphere::Left);
      else if (v == "R")
        hemi.push_back(Hemisphere::Right);
      else
        throw std::runtime_error("layout: hemisphere entries must be 'L' or 'R'");
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& p : j.at("symmetric_pairs")) {
      if (!p.is_array() || p.size() != 2)
        throw std::runtime_error("layout: symmetric_pairs entries must be [left, right]");
      pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
    return ChannelLayout(std::move(hemi), std::move(pairs));
  }

 private:
  void validate() const {
    if (static_cast<int>(hemi_.size()) != kChannels)
      throw std::runtime_error("layout: expected 24 channels, got " +
                               std::to_string(hemi_.size()));
    int left = 0;
    for (auto h : hemi_)
      if (h == Hemisphere::Left) ++left;
    if (left != kChannels / 2)
      throw std::runtime_error("layout: expected 12 channels per hemisphere, got " +
                               std::to_string(left) + " left");
    if (static_cast<int>(pairs_.size()) != kChannels / 2)
      throw std::runtime_error("layout: expected 12 symmetric pairs");
    std::vector<int> seen(kChannels, 0);
    for (auto& p : pairs_) {
      if (p.first < 0 || p.first >= kChannels || p.second < 0 || p.second >= kChannels)
        throw std::runtime_error("layout: pair channel index out of range");
      if (hemi_[p.first] != Hemisphere::Left || hemi_[p.second] != Hemisphere::Right)
        throw std::runtime_error("layout: pairs must be (left, right)");
      ++seen[p.first];
      ++seen[p.second];
    }
    for (int c = 0; c < kChannels; ++c)
      if (seen[c] != 1)
        throw std::runtime_error("layout: symmetric pairs are not a perfect matching");
  }

  void build_row_order() {
    rows_.clear();
    for (auto side : {Hemisphere::Left, Hemisphere::Right}) {
      for (int c = 0; c < kChannels; ++c) {
        if (hemi_[c] != side) continue;
        rows_.push_back({c, HbType::HbO});
        rows_.push_back({c, HbType::HbR});
      }
    }
  }

  std::vector<Hemisphere> hemi_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<RowDesc> rows_;
};

}  // namespace hemcnn

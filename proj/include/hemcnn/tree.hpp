#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

#include "hemcnn/layout.hpp"

namespace hemcnn {

struct TreeConfig {
  int min_samples_split = 2;
  int max_depth = -1;  // < 0 means unlimited
};

// Plain CART for two classes with Gini impurity. Thresholds are midpoints of
// consecutive distinct sorted feature values; impurity-gain ties go to the
// lower feature index and then the lower threshold; leaves predict their
// majority class (tie -> Left). Samples with value <= threshold go left.
struct TreeNode {
  bool is_leaf = true;
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Hand leaf_class = Hand::Left;
  std::array<int, 2> counts{0, 0};  // [Left, Right] training examples at the node
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // node 0 is the root
  int n_features = 0;
};

namespace detail {

inline double gini(int n_left_class, int n_right_class) {
  const double n = static_cast<double>(n_left_class + n_right_class);
  if (n == 0.0) return 0.0;
  const double pl = n_left_class / n;
  const double pr = n_right_class / n;
  return 1.0 - pl * pl - pr * pr;
}

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

inline Split best_split(const std::vector<std::vector<double>>& x, const std::vector<Hand>& y,
                        const std::vector<int>& idx, int n_features) {
  std::array<int, 2> total{0, 0};
  for (int i : idx) ++total[y[i] == Hand::Left ? 0 : 1];
  const double parent = gini(total[0], total[1]);
  const double n = static_cast<double>(idx.size());

  Split best;
  std::vector<std::pair<double, int>> order(idx.size());
  for (int f = 0; f < n_features; ++f) {
    for (std::size_t k = 0; k < idx.size(); ++k)
      order[k] = {x[idx[k]][f], y[idx[k]] == Hand::Left ? 0 : 1};
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::array<int, 2> below{0, 0};
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      ++below[order[k].second];
      if (order[k].first == order[k + 1].first) continue;
      const double thr = order[k].first + (order[k + 1].first - order[k].first) / 2.0;
      const double nb = static_cast<double>(k + 1);
      const double gain =
          parent - (nb / n) * gini(below[0], below[1]) -
          ((n - nb) / n) * gini(total[0] - below[0], total[1] - below[1]);
      // strict improvement => earlier feature / lower threshold wins ties
      if (gain > best.gain + 1e-15 ||
          (!best.found && gain > 1e-15)) {
        best.found = true;
        best.feature = f;
        best.threshold = thr;
        best.gain = gain;
      }
    }
  }
  return best;
}

inline int grow(TreeModel& model, const std::vector<std::vector<double>>& x,
                const std::vector<Hand>& y, std::vector<int> idx, const TreeConfig& cfg,
                int depth) {
  TreeNode node;
  for (int i : idx) ++node.counts[y[i] == Hand::Left ? 0 : 1];
  node.leaf_class = node.counts[1] > node.counts[0] ? Hand::Right : Hand::Left;

  const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
  const bool too_small = static_cast<int>(idx.size()) < cfg.min_samples_split;
  const bool too_deep = cfg.max_depth >= 0 && depth >= cfg.max_depth;
  if (!pure && !too_small && !too_deep) {
    const detail::Split split = detail::best_split(x, y, idx, model.n_features);
    if (split.found) {
      std::vector<int> left_idx, right_idx;
      for (int i : idx) (x[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);
      node.is_leaf = false;
      node.feature = split.feature;
      node.threshold = split.threshold;
      const int self = static_cast<int>(model.nodes.size());
      model.nodes.push_back(node);
      model.nodes[self].left = grow(model, x, y, std::move(left_idx), cfg, depth + 1);
      model.nodes[self].right = grow(model, x, y, std::move(right_idx), cfg, depth + 1);
      return self;
    }
  }
  model.nodes.push_back(node);
  return static_cast<int>(model.nodes.size()) - 1;
}

}  // namespace detail

inline TreeModel tree_fit(const std::vector<std::vector<double>>& x, const std::vector<Hand>& y,
                          const TreeConfig& cfg = {}) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("tree_fit: need >= 2 examples with matching labels");
  bool has_left = false, has_right = false;
  for (Hand h : y) (h == Hand::Left ? has_left : has_right) = true;
  if (!has_left || !has_right)
    throw std::invalid_argument("tree_fit: both classes must be present");
  const int n_features = static_cast<int>(x[0].size());
  for (const auto& row : x)
    if (static_cast<int>(row.size()) != n_features)
      throw std::invalid_argument("tree_fit: ragged feature matrix");

  TreeModel model;
  model.n_features = n_features;
  std::vector<int> idx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) idx[i] = static_cast<int>(i);
  detail::grow(model, x, y, std::move(idx), cfg, 0);
  return model;
}

inline Hand tree_predict(const TreeModel& model, const std::vector<double>& fv) {
  if (static_cast<int>(fv.size()) != model.n_features)
    throw std::invalid_argument("tree_predict: feature length mismatch");
  int at = 0;
  while (!model.nodes[at].is_leaf)
    at = fv[model.nodes[at].feature] <= model.nodes[at].threshold ? model.nodes[at].left
                                                                  : model.nodes[at].right;
  return model.nodes[at].leaf_class;
}

}  // namespace hemcnn

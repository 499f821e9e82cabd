#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/special.hpp"

namespace hemcnn {

struct KruskalResult {
  double h = 0.0;
  double p = 1.0;
};

namespace detail {

// Mid-ranks of the pooled sample (ties share the average of their rank run).
// Returns per-group rank sums, group sizes, the tie correction factor and N.
struct RankSummary {
  std::vector<double> rank_sum;
  std::vector<std::size_t> n;
  double tie_correction = 1.0;
  std::size_t total = 0;
};

inline RankSummary rank_groups(const std::vector<std::vector<double>>& groups) {
  RankSummary rs;
  rs.rank_sum.assign(groups.size(), 0.0);
  rs.n.resize(groups.size());
  std::vector<std::pair<double, std::size_t>> pooled;  // (value, group)
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw std::invalid_argument("rank test: empty group");
    rs.n[g] = groups[g].size();
    for (double v : groups[g]) {
      if (!std::isfinite(v)) throw std::invalid_argument("rank test: non-finite value");
      pooled.emplace_back(v, g);
    }
  }
  rs.total = pooled.size();
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n = static_cast<double>(rs.total);
  double tie_sum = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1].first == pooled[i].first) ++j;
    const double run = static_cast<double>(j - i + 1);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rs.rank_sum[pooled[k].second] += midrank;
    tie_sum += run * run * run - run;
    i = j + 1;
  }
  rs.tie_correction = 1.0 - tie_sum / (n * n * n - n);
  return rs;
}

}  // namespace detail

// Kruskal-Wallis H with tie correction; p from the chi-squared survival
// function with k-1 degrees of freedom. All values identical degenerates to
// (H = 0, p = 1).
inline KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis: need >= 2 groups");
  const detail::RankSummary rs = detail::rank_groups(groups);
  const double n = static_cast<double>(rs.total);
  if (n < 2.0) throw std::invalid_argument("kruskal_wallis: need >= 2 observations");

  double h = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    h += rs.rank_sum[g] * rs.rank_sum[g] / static_cast<double>(rs.n[g]);
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

  KruskalResult out;
  if (rs.tie_correction <= 0.0) return out;  // every value identical
  out.h = h / rs.tie_correction;
  if (out.h <= 0.0) {
    out.h = std::max(out.h, 0.0);
    out.p = 1.0;
    return out;
  }
  out.p = chi2_sf(out.h, static_cast<double>(groups.size()) - 1.0);
  return out;
}

struct PosthocPair {
  std::size_t a = 0, b = 0;
  double mean_rank_diff = 0.0;
  double critical = 0.0;
  bool significant = false;
};

// Critical values q(0.05, k, inf) of the studentized range, k = 2..20.
inline double studentized_range_q05(std::size_t k) {
  static constexpr double q[] = {2.772, 3.314, 3.633, 3.858, 4.030, 4.170, 4.286,
                                 4.387, 4.474, 4.552, 4.622, 4.685, 4.743, 4.796,
                                 4.845, 4.891, 4.934, 4.974, 5.012};
  if (k < 2 || k > 20)
    throw std::invalid_argument("studentized_range_q05: k must be in 2..20");
  return q[k - 2];
}

// Nemenyi-type pairwise comparison after Kruskal-Wallis: mean-rank
// differences against the Tukey/studentized-range critical value at
// alpha = 0.05.
inline std::vector<PosthocPair> pairwise_posthoc(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("pairwise_posthoc: need >= 2 groups");
  const detail::RankSummary rs = detail::rank_groups(groups);
  const double n = static_cast<double>(rs.total);
  const double q = studentized_range_q05(groups.size());

  std::vector<double> mean_rank(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    mean_rank[g] = rs.rank_sum[g] / static_cast<double>(rs.n[g]);

  std::vector<PosthocPair> out;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      PosthocPair pr;
      pr.a = a;
      pr.b = b;
      pr.mean_rank_diff = std::fabs(mean_rank[a] - mean_rank[b]);
      pr.critical = q / std::sqrt(2.0) *
                    std::sqrt(n * (n + 1.0) / 12.0 *
                              (1.0 / static_cast<double>(rs.n[a]) +
                               1.0 / static_cast<double>(rs.n[b])));
      pr.significant = pr.mean_rank_diff > pr.critical;
      out.push_back(pr);
    }
  }
  return out;
}

// Median with the usual even-length average of the central pair.
inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace hemcnn

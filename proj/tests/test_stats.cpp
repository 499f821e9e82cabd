#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hemcnn/rng.hpp"
#include "hemcnn/special.hpp"
#include "hemcnn/stats.hpp"

using namespace hemcnn;

// ---------------------------------------------------------------------------
// Special functions

TEST_CASE("regularized incomplete gamma halves sum to one") {
  for (double a : {0.5, 1.0, 3.0, 6.0, 10.5}) {
    for (double x : {0.1, 1.0, 3.0, 8.0, 25.0}) {
      CHECK_THAT(gamma_p(a, x) + gamma_q(a, x), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
  }
  CHECK(gamma_p(3.0, 0.0) == 0.0);
  CHECK(gamma_p(3.0, 1e6) > 1.0 - 1e-12);
}

TEST_CASE("chi-squared survival function matches reference values") {
  // Reference values computed with an independent implementation.
  CHECK_THAT(chi2_sf(3.857142857142857, 1.0),
             Catch::Matchers::WithinAbs(0.04953461343562649, 1e-10));
  CHECK_THAT(chi2_sf(5.0, 4.0), Catch::Matchers::WithinAbs(0.2872974951836458, 1e-10));
  CHECK_THAT(chi2_sf(0.5, 2.0), Catch::Matchers::WithinAbs(0.7788007830714049, 1e-10));
  CHECK_THAT(chi2_sf(10.0, 3.0), Catch::Matchers::WithinAbs(0.01856613546304325, 1e-10));
  CHECK_THAT(chi2_sf(25.0, 6.0), Catch::Matchers::WithinAbs(0.00034145459689170836, 1e-10));
  CHECK(chi2_sf(0.0, 2.0) == 1.0);
}

TEST_CASE("gamma_cdf matches reference values and is monotone") {
  CHECK_THAT(gamma_cdf(5.0, 6.0, 1.0), Catch::Matchers::WithinAbs(0.384039345166937, 1e-10));
  CHECK_THAT(gamma_cdf(1.3, 2.5, 1.0),
             Catch::Matchers::WithinAbs(0.23863473215498604, 1e-10));
  // Scale parameter: cdf(t, k, tau) = cdf(t/tau, k, 1).
  CHECK_THAT(gamma_cdf(10.0, 6.0, 2.0), Catch::Matchers::WithinAbs(gamma_cdf(5.0, 6.0, 1.0), 1e-12));
  double prev = -1.0;
  for (double t = 0.0; t <= 30.0; t += 0.5) {
    const double v = gamma_cdf(t, 6.0, 1.0);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(gamma_cdf(100.0, 6.0, 1.0) > 1.0 - 1e-12);
}

// ---------------------------------------------------------------------------
// Kruskal-Wallis

TEST_CASE("kruskal_wallis on the textbook two-group case") {
  const KruskalResult r = kruskal_wallis({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
  // Rank sums 6 and 15 over N=6: H = 12/(6*7) * (36/3 + 225/3) - 21 = 27/7.
  CHECK_THAT(r.h, Catch::Matchers::WithinAbs(27.0 / 7.0, 1e-10));
  CHECK_THAT(r.p, Catch::Matchers::WithinAbs(0.04953461343562649, 1e-10));
}

TEST_CASE("kruskal_wallis applies the tie correction") {
  const KruskalResult r = kruskal_wallis({{1.0, 1.0, 2.0}, {1.0, 2.0, 2.0}});
  CHECK_THAT(r.h, Catch::Matchers::WithinAbs(0.5555555555555536, 1e-9));
  CHECK_THAT(r.p, Catch::Matchers::WithinAbs(0.4560565402502569, 1e-9));
}

TEST_CASE("kruskal_wallis handles three groups") {
  const KruskalResult r = kruskal_wallis({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}, {7.0, 8.0, 9.0}});
  CHECK_THAT(r.h, Catch::Matchers::WithinAbs(7.2, 1e-9));
  CHECK_THAT(r.p, Catch::Matchers::WithinAbs(0.02732372244729252, 1e-9));
}

TEST_CASE("identical values collapse to H = 0, p = 1") {
  const KruskalResult r = kruskal_wallis({{0.5, 0.5, 0.5}, {0.5, 0.5}});
  CHECK(r.h == 0.0);
  CHECK(r.p == 1.0);
}

TEST_CASE("kruskal_wallis rejects malformed input") {
  CHECK_THROWS_AS(kruskal_wallis({{1.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(kruskal_wallis({{1.0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(kruskal_wallis({{1.0}, {std::nan("")}}), std::invalid_argument);
}

TEST_CASE("H is exactly invariant under monotone transforms") {
  // A rank statistic only sees the ordering, so any strictly increasing map
  // must reproduce H bit for bit.
  Rng rng(29);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 2 + rng.uniform_int(3);
    std::vector<std::vector<double>> groups(k);
    for (auto& g : groups) {
      const std::size_t n = 3 + rng.uniform_int(8);
      for (std::size_t i = 0; i < n; ++i) g.push_back(rng.uniform01());
    }
    const KruskalResult base = kruskal_wallis(groups);

    auto transformed = [&groups](auto&& f) {
      std::vector<std::vector<double>> out = groups;
      for (auto& g : out)
        for (double& v : g) v = f(v);
      return out;
    };
    const auto affine = transformed([](double v) { return 4.0 * v + 3.0; });
    const auto cubic = transformed([](double v) { return v * v * v + 2.0 * v; });
    const auto expo = transformed([](double v) { return std::exp(v); });
    const auto arctan = transformed([](double v) { return std::atan(v); });
    for (const auto& g : {affine, cubic, expo, arctan}) {
      const KruskalResult r = kruskal_wallis(g);
      CHECK(r.h == base.h);
      CHECK(r.p == base.p);
    }
  }
}

// ---------------------------------------------------------------------------
// Post-hoc comparisons

TEST_CASE("studentized range table covers k = 2..20") {
  CHECK(studentized_range_q05(2) == 2.772);
  CHECK(studentized_range_q05(3) == 3.314);
  CHECK(studentized_range_q05(7) == 4.170);
  CHECK(studentized_range_q05(20) == 5.012);
  CHECK_THROWS_AS(studentized_range_q05(1), std::invalid_argument);
  CHECK_THROWS_AS(studentized_range_q05(21), std::invalid_argument);
}

TEST_CASE("pairwise_posthoc computes Nemenyi-style critical differences") {
  // Two disjoint groups of five: mean ranks 3 and 8, difference 5.
  const std::vector<std::vector<double>> groups{{1.0, 2.0, 3.0, 4.0, 5.0},
                                               {6.0, 7.0, 8.0, 9.0, 10.0}};
  const auto pairs = pairwise_posthoc(groups);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].a == 0);
  CHECK(pairs[0].b == 1);
  CHECK_THAT(pairs[0].mean_rank_diff, Catch::Matchers::WithinAbs(5.0, 1e-12));
  CHECK_THAT(pairs[0].critical, Catch::Matchers::WithinAbs(3.7533057429418135, 1e-9));
  CHECK(pairs[0].significant);
}

TEST_CASE("pairwise_posthoc enumerates k(k-1)/2 pairs") {
  Rng rng(31);
  std::vector<std::vector<double>> groups(7);
  for (auto& g : groups)
    for (int i = 0; i < 12; ++i) g.push_back(rng.uniform01());
  const auto pairs = pairwise_posthoc(groups);
  CHECK(pairs.size() == 21);
  for (const auto& p : pairs) {
    CHECK(p.a < p.b);
    CHECK(p.critical > 0.0);
    CHECK(p.significant == (p.mean_rank_diff > p.critical));
  }
  // Identical groups: nothing can be significant.
  std::vector<std::vector<double>> same(3, groups[0]);
  for (const auto& p : pairwise_posthoc(same)) CHECK_FALSE(p.significant);
}

TEST_CASE("median averages the central pair on even lengths") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ganen/error.hpp"
#include "ganen/metrics.hpp"
#include "oracle.hpp"

using namespace ganen;

TEST(Auroc, HandExamples) {
  EXPECT_EQ(auroc(std::vector<double>{0.1, 0.9}, std::vector<int>{0, 1}), 1.0);
  EXPECT_EQ(auroc(std::vector<double>{0.1, 0.9}, std::vector<int>{1, 0}), 0.0);
  EXPECT_EQ(auroc(std::vector<double>{1, 2, 3, 4}, std::vector<int>{0, 1, 0, 1}), 0.75);
  EXPECT_EQ(auroc(std::vector<double>{1, 1}, std::vector<int>{0, 1}), 0.5);
}

TEST(Auroc, SingleClassThrows) {
  EXPECT_THROW(auroc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), ValidationError);
  EXPECT_THROW(roc_curve(std::vector<double>{1, 2}, std::vector<int>{0, 0}), ValidationError);
}

TEST(Auroc, MatchesPairCountingWithTies) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    std::uniform_int_distribution<int> n_dist(2, 50), level(0, 6);
    const int n = n_dist(rng);
    std::vector<double> s(n);
    std::vector<int> l(n);
    for (int k = 0; k < n; ++k) {
      s[k] = level(rng) * 0.5;
      l[k] = static_cast<int>(rng() % 2);
    }
    l[0] = 0;
    l[1] = 1;
    const double a = auroc(s, l);
    EXPECT_NEAR(a, oracle::auroc(s, l), 1e-12);
    EXPECT_NEAR(roc_curve(s, l).area(), a, 1e-12);
  }
}

TEST(Auroc, RankInvarianceAndComplement) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> s(40), e(40), neg(40);
  std::vector<int> l(40);
  for (int k = 0; k < 40; ++k) {
    s[k] = g(rng);
    e[k] = std::exp(3 * s[k]) + 1;
    neg[k] = -s[k];
    l[k] = k % 3 == 0;
  }
  EXPECT_DOUBLE_EQ(auroc(s, l), auroc(e, l));
  EXPECT_NEAR(auroc(s, l) + auroc(neg, l), 1.0, 1e-12);
}

TEST(RocCurve, ShapeAndEndpoints) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> l{0, 0, 1, 1};
  const RocCurve c = roc_curve(s, l);
  EXPECT_EQ(c.points.front(), (std::pair<double, double>{0, 0}));
  EXPECT_EQ(c.points.back(), (std::pair<double, double>{1, 1}));
  for (std::size_t k = 1; k < c.points.size(); ++k) {
    EXPECT_GE(c.points[k].first, c.points[k - 1].first);
    EXPECT_GE(c.points[k].second, c.points[k - 1].second);
  }
  const RocCurve perfect = roc_curve(std::vector<double>{0, 1, 2}, std::vector<int>{0, 1, 1});
  EXPECT_NE(std::find(perfect.points.begin(), perfect.points.end(), std::pair<double, double>{0, 1}),
            perfect.points.end());
  const RocCurve flat = roc_curve(std::vector<double>{3, 3, 3}, std::vector<int>{0, 1, 0});
  EXPECT_EQ(flat.points, (std::vector<std::pair<double, double>>{{0, 0}, {1, 1}}));
}

TEST(Prf, Examples) {
  const std::vector<double> s{1, 2, 3, 4};
  const std::vector<int> l{0, 0, 1, 1};
  ClassificationSummary a = prf_at_threshold(s, l, 2.5);
  EXPECT_EQ(a.precision, 1.0);
  EXPECT_EQ(a.recall, 1.0);
  EXPECT_EQ(a.f1, 1.0);
  ClassificationSummary low = prf_at_threshold(s, l, 0.0);
  EXPECT_EQ(low.recall, 1.0);
  EXPECT_EQ(low.precision, 0.5);
  ClassificationSummary high = prf_at_threshold(s, l, 10.0);
  EXPECT_EQ(high.precision, 0.0);
  EXPECT_EQ(high.recall, 0.0);
  EXPECT_EQ(high.f1, 0.0);
  ClassificationSummary mid = prf_at_threshold(s, std::vector<int>{0, 1, 0, 1}, 2.0);
  EXPECT_NEAR(mid.f1, 2 * mid.precision * mid.recall / (mid.precision + mid.recall), 1e-15);
}

TEST(Prf, PermutationInvariant) {
  const std::vector<double> s{0.3, 0.9, 0.1, 0.7, 0.5};
  const std::vector<int> l{0, 1, 0, 1, 1};
  const std::vector<double> sp{0.5, 0.1, 0.9, 0.7, 0.3};
  const std::vector<int> lp{1, 0, 1, 1, 0};
  const auto a = prf_at_threshold(s, l, 0.5), b = prf_at_threshold(sp, lp, 0.5);
  EXPECT_EQ(a.precision, b.precision);
  EXPECT_EQ(a.recall, b.recall);
}

TEST(Contamination, Examples) {
  const std::vector<double> s{4, 1, 3, 2};
  const double t = threshold_by_contamination(s, 0.5);
  EXPECT_EQ(std::count_if(s.begin(), s.end(), [&](double v) { return v >= t; }), 2);
  const double t0 = threshold_by_contamination(s, 1e-9);
  EXPECT_EQ(std::count_if(s.begin(), s.end(), [&](double v) { return v >= t0; }), 1);
  EXPECT_THROW(threshold_by_contamination(s, 0.0), ValidationError);
  EXPECT_THROW(threshold_by_contamination(s, 1.0), ValidationError);
  EXPECT_THROW(threshold_by_contamination(std::vector<double>{}, 0.5), ValidationError);
}

TEST(Contamination, FlaggedCountMatchesCeilingOnDistinctScores) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<double> s(n);
    for (double& v : s) v = u(rng);
    const double q = 0.01 + 0.98 * u(rng);
    const double th = threshold_by_contamination(s, q);
    const auto flagged = std::count_if(s.begin(), s.end(), [&](double v) { return v >= th; });
    const auto want = std::clamp<long>(static_cast<long>(std::ceil(q * n - 1e-9)), 1, static_cast<long>(n));
    EXPECT_EQ(flagged, want);
  }
}

TEST(Contamination, TiesFlagFewer) {
  const std::vector<double> s{5, 3, 3, 3, 1};
  const double t = threshold_by_contamination(s, 0.4);
  EXPECT_EQ(std::count_if(s.begin(), s.end(), [&](double v) { return v >= t; }), 1);
  const std::vector<double> pair{0.3, 0.3, 0.1};
  const double exact = threshold_by_contamination(pair, 0.5);
  EXPECT_EQ(std::count_if(pair.begin(), pair.end(), [&](double v) { return v >= exact; }), 2);
}

TEST(RocCsv, Layout) {
  RocCurve c{{{0, 0}, {0.5, 1}, {1, 1}}};
  std::ostringstream out;
  write_roc_csv(out, c);
  EXPECT_EQ(out.str(), "fpr,tpr\n0,0\n0.5,1\n1,1\n");
  EXPECT_EQ(c.area(), 0.75);
}

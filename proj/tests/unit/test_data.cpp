#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ganen/data.hpp"
#include "ganen/error.hpp"

using namespace ganen;

TEST(Synthetic, NoAnomaliesMeansAllNormal) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kTwoMoons, 50, 0, 2, 1});
  EXPECT_EQ(d.size(), 50u);
  for (int l : d.labels) EXPECT_EQ(l, 0);
}

TEST(Synthetic, DeterministicPerSeed) {
  for (SyntheticKind k : {SyntheticKind::kRing, SyntheticKind::kTwoMoons, SyntheticKind::kGaussianMixture}) {
    const LabeledDataset a = make_synthetic({k, 100, 20, 3, 7});
    const LabeledDataset b = make_synthetic({k, 100, 20, 3, 7});
    const LabeledDataset c = make_synthetic({k, 100, 20, 3, 8});
    EXPECT_EQ(a.rows, b.rows);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NE(a.rows, c.rows);
    EXPECT_EQ(a.width(), 3u);
  }
}

TEST(Synthetic, RingRadiusConcentrates) {
  const std::size_t n = 2000;
  const LabeledDataset d = make_synthetic({SyntheticKind::kRing, n, 0, 2, 3});
  double mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) mean += std::hypot(d.rows.at(r, 0), d.rows.at(r, 1));
  mean /= static_cast<double>(n);
  EXPECT_LT(std::fabs(mean - kRingRadius), 3 * kRingRadialStd / std::sqrt(static_cast<double>(n)) + 1e-3);
}

TEST(Synthetic, RingAnomaliesOffTheRing) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kRing, 10, 200, 2, 4});
  for (std::size_t r = 0; r < d.size(); ++r) {
    if (!d.labels[r]) continue;
    const double rad = std::hypot(d.rows.at(r, 0), d.rows.at(r, 1));
    EXPECT_TRUE(rad <= 0.5 || rad >= 1.5) << rad;
  }
}

TEST(Synthetic, RejectsBadSpecAndNames) {
  EXPECT_THROW(make_synthetic({SyntheticKind::kRing, 10, 0, 1, 0}), ValidationError);
  EXPECT_THROW(parse_synthetic_kind("spiral"), ValidationError);
  EXPECT_EQ(parse_synthetic_kind("two-moons"), SyntheticKind::kTwoMoons);
}

TEST(Delimited, HandWrittenFile) {
  std::istringstream in("a,b,label\n1.5,2,0\n-3,4e2,1\n0,0.25,0\n");
  const LabeledDataset d = read_delimited(in, {});
  EXPECT_EQ(d.rows, Tensor::matrix(3, 2, {1.5, 2, -3, 400, 0, 0.25}));
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
}

TEST(Delimited, IndexedLabelWithoutHeader) {
  std::istringstream in("1;9;2\n0;8;3\n");
  const LabeledDataset d = read_delimited(in, {"0", ';'});
  EXPECT_EQ(d.rows, Tensor::matrix(2, 2, {9, 2, 8, 3}));
  EXPECT_EQ(d.labels, (std::vector<int>{1, 0}));
}

TEST(Delimited, Errors) {
  std::istringstream missing("a,b\n1,2\n");
  try {
    read_delimited(missing, {});
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("'label'"), std::string::npos);
  }
  std::istringstream bad("a,label\n1,0\nx,1\n");
  try {
    read_delimited(bad, {});
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream badlabel("a,label\n1,2\n");
  EXPECT_THROW(read_delimited(badlabel, {}), FormatError);
  std::istringstream ragged("a,label\n1,0\n1,0,3\n");
  EXPECT_THROW(read_delimited(ragged, {}), FormatError);
}

TEST(Delimited, RoundTripIsExact) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kGaussianMixture, 40, 10, 4, 5});
  std::stringstream buf;
  write_delimited(buf, d);
  const LabeledDataset back = read_delimited(buf, {});
  EXPECT_EQ(back.rows, d.rows);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(Scaler, MinMaxAndConstantFeature) {
  LabeledDataset d{Tensor::matrix(3, 2, {0, 7, 5, 7, 10, 7}), {0, 0, 0}, {}};
  auto [scaled, s] = normalize(d, ScalerMethod::kMinMax01);
  EXPECT_EQ(scaled.rows, Tensor::matrix(3, 2, {0, 0, 0.5, 0, 1, 0}));
  EXPECT_EQ(s.apply(Tensor::matrix(1, 2, {20, 9})), Tensor::matrix(1, 2, {2, 0}));
}

TEST(Scaler, ZScoreMoments) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kTwoMoons, 300, 0, 3, 6});
  auto [scaled, s] = normalize(d, ScalerMethod::kZScore);
  for (std::size_t c = 0; c < 3; ++c) {
    double m = 0, v = 0;
    for (std::size_t r = 0; r < 300; ++r) m += scaled.rows.at(r, c);
    m /= 300;
    for (std::size_t r = 0; r < 300; ++r) v += (scaled.rows.at(r, c) - m) * (scaled.rows.at(r, c) - m);
    EXPECT_NEAR(m, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(v / 300), 1.0, 1e-9);
  }
}

TEST(Scaler, InvertIdentityAndNonIdempotent) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kRing, 50, 5, 2, 7});
  auto [scaled, s] = normalize(d, ScalerMethod::kZScore);
  const Tensor back = s.invert(scaled.rows);
  for (std::size_t k = 0; k < back.size(); ++k) EXPECT_NEAR(back[k], d.rows[k], 1e-9);
  EXPECT_EQ(apply_scaler(d, Scaler::identity(2)).rows, d.rows);
  EXPECT_EQ(apply_scaler(d, s).rows, scaled.rows);
  EXPECT_NE(apply_scaler(scaled, s).rows, scaled.rows);
  EXPECT_THROW(apply_scaler(d, Scaler::identity(3)), ShapeError);
}

TEST(Split, ThreeQuartersOfNormals) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kRing, 100, 20, 2, 8});
  const Split s = anomaly_split(d, 0.75, 1);
  EXPECT_EQ(s.train.size(), 75u);
  EXPECT_EQ(s.test.size(), 45u);
  for (int l : s.train.labels) EXPECT_EQ(l, 0);
  EXPECT_EQ(std::count(s.test.labels.begin(), s.test.labels.end(), 1), 20);
}

TEST(Split, DisjointAndDeterministic) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kTwoMoons, 60, 10, 2, 9});
  const Split a = anomaly_split(d, 0.5, 3), b = anomaly_split(d, 0.5, 3);
  EXPECT_EQ(a.train.rows, b.train.rows);
  std::set<std::vector<double>> train_rows;
  for (std::size_t r = 0; r < a.train.size(); ++r) train_rows.insert({a.train.rows.at(r, 0), a.train.rows.at(r, 1)});
  for (std::size_t r = 0; r < a.test.size(); ++r) {
    EXPECT_FALSE(train_rows.count({a.test.rows.at(r, 0), a.test.rows.at(r, 1)}));
  }
  EXPECT_EQ(a.train.size() + a.test.size(), d.size());
}

TEST(Split, ScalerIgnoresTestRows) {
  LabeledDataset d = make_synthetic({SyntheticKind::kRing, 40, 10, 2, 10});
  const Split a = anomaly_split(d, 0.5, 4);
  for (std::size_t r = 0; r < d.size(); ++r) {
    if (d.labels[r]) d.rows.at(r, 0) += 100.0;
  }
  const Split b = anomaly_split(d, 0.5, 4);
  EXPECT_EQ(normalize(a.train, ScalerMethod::kMinMax01).second, normalize(b.train, ScalerMethod::kMinMax01).second);
}

TEST(Split, Errors) {
  const LabeledDataset d = make_synthetic({SyntheticKind::kRing, 0, 10, 2, 11});
  EXPECT_THROW(anomaly_split(d, 0.5, 0), ValidationError);
  const LabeledDataset ok = make_synthetic({SyntheticKind::kRing, 10, 1, 2, 11});
  EXPECT_THROW(anomaly_split(ok, 1.0, 0), ValidationError);
}

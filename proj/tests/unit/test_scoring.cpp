#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ganen/checkpoint.hpp"
#include "ganen/scoring.hpp"
#include "oracle.hpp"

using namespace ganen;

namespace {

EnsembleModel trained_model(Variant v, std::size_t I, std::size_t J, std::uint64_t seed) {
  EnsembleModel m = make_ensemble(v, fixture::small_arch(), I, J, default_weights(v), seed);
  std::mt19937_64 rng(seed);
  TrainConfig c;
  c.max_iter = 20;
  c.batch_size = 8;
  c.lr_generator = c.lr_discriminator = 1e-3;
  c.stop_on_plateau = false;
  c.seed = seed;
  train(m, fixture::random_batch(30, 3, rng), c);
  return m;
}

Tensor row_of(const Tensor& x, std::size_t r) { return x.slice_rows(r, 1); }

}  // namespace

TEST(PairScore, MatchesIndependentTerms) {
  std::mt19937_64 rng(1);
  for (Variant v : {Variant::kFAnoGan, Variant::kEgbad, Variant::kGanomaly}) {
    EnsembleModel m = trained_model(v, 1, 1, 2);
    for (double beta : {0.0, 0.5, 39.0}) {
      LossWeights w = m.weights;
      w.beta = beta;
      const Tensor x = fixture::random_batch(5, 3, rng);
      const auto scores = pair_scores(x, m.generators[0], m.discriminators[0], w, v);
      const auto rows = oracle::rows_of(x);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        double want;
        if (v == Variant::kGanomaly) {
          want = oracle::enc_row(rows[r], m.generators[0], w.ell);
        } else {
          const double lr = oracle::norm_pow(rows[r], oracle::reconstruct(m.generators[0], rows[r]), w.ell);
          want = lr + beta * oracle::disc_row(rows[r], m.generators[0], m.discriminators[0], w.ell, v == Variant::kEgbad);
        }
        EXPECT_NEAR(scores[r], want, 1e-12);
        EXPECT_NEAR(pair_score(row_of(x, r), m.generators[0], m.discriminators[0], w, v), want, 1e-12);
        EXPECT_GE(scores[r], 0.0);
      }
    }
  }
}

TEST(PairScore, BetaZeroIsReconstruction) {
  std::mt19937_64 rng(3);
  EnsembleModel m = trained_model(Variant::kFAnoGan, 1, 1, 4);
  LossWeights w = m.weights;
  w.beta = 0.0;
  const Tensor x = fixture::random_batch(4, 3, rng);
  const auto s = pair_scores(x, m.generators[0], m.discriminators[0], w, Variant::kFAnoGan);
  const auto rows = oracle::rows_of(x);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_NEAR(s[r], oracle::norm_pow(rows[r], oracle::reconstruct(m.generators[0], rows[r]), 2), 1e-12);
  }
}

TEST(PairScore, StrictlyIncreasingInBeta) {
  std::mt19937_64 rng(5);
  EnsembleModel m = trained_model(Variant::kEgbad, 1, 1, 6);
  const Tensor x = fixture::random_batch(1, 3, rng);
  double prev = -1.0;
  for (double beta : {0.0, 0.1, 1.0, 9.0}) {
    LossWeights w = m.weights;
    w.beta = beta;
    const double s = pair_score(x, m.generators[0], m.discriminators[0], w, Variant::kEgbad);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(EnsembleScore, MeanOfPairScores) {
  std::mt19937_64 rng(7);
  EnsembleModel m = trained_model(Variant::kFAnoGan, 3, 3, 8);
  const Tensor x = fixture::random_batch(6, 3, rng);
  const AnomalyReport rep = score_dataset(x, m);
  ASSERT_EQ(rep.pair_scores.size(), 9u);
  for (std::size_t r = 0; r < 6; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        s += pair_score(row_of(x, r), m.generators[i], m.discriminators[j], m.weights, m.variant);
    EXPECT_NEAR(rep.scores[r], s / 9.0, 1e-12);
    EXPECT_NEAR(ensemble_score(row_of(x, r), m), rep.scores[r], 1e-12);
  }
}

TEST(EnsembleScore, SinglePairEqualsPairScore) {
  std::mt19937_64 rng(9);
  EnsembleModel m = trained_model(Variant::kGanomaly, 1, 1, 10);
  const Tensor x = fixture::random_batch(1, 3, rng);
  EXPECT_EQ(ensemble_score(x, m), pair_score(x, m.generators[0], m.discriminators[0], m.weights, m.variant));
}

TEST(ScoreDataset, ShapesPermutationAndPurity) {
  std::mt19937_64 rng(11);
  EnsembleModel m = trained_model(Variant::kEgbad, 2, 3, 12);
  const EnsembleModel before = m;
  const Tensor x = fixture::random_batch(5, 3, rng);
  const AnomalyReport a = score_dataset(x, m);
  EXPECT_TRUE(same_model(before, m));
  EXPECT_EQ(score_dataset(row_of(x, 2), m).scores.size(), 1u);
  const AnomalyReport p = score_dataset(x.gather_rows({4, 3, 2, 1, 0}), m);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(p.scores[r], a.scores[4 - r]);
  EXPECT_EQ(a.num_generators, 2u);
  EXPECT_EQ(a.num_discriminators, 3u);
}

TEST(ScoreDataset, BetaOverride) {
  std::mt19937_64 rng(13);
  EnsembleModel m = trained_model(Variant::kFAnoGan, 2, 2, 14);
  const Tensor x = fixture::random_batch(4, 3, rng);
  const AnomalyReport r = score_dataset(x, m, 0.0, 0);
  EXPECT_EQ(r.weights.beta, 0.0);
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0.0;
    for (const auto& g : m.generators) {
      const auto row = oracle::rows_of(row_of(x, k))[0];
      s += 2 * oracle::norm_pow(row, oracle::reconstruct(g, row), 2);
    }
    EXPECT_NEAR(r.scores[k], s / 4.0, 1e-12);
  }
}

TEST(ScoreDataset, ReportCsv) {
  AnomalyReport r;
  r.num_generators = 1;
  r.num_discriminators = 2;
  r.scores = {1.5, 2.5};
  r.pair_scores = {{1, 2}, {2, 3}};
  std::ostringstream out;
  std::vector<int> labels{0, 1};
  write_report_csv(out, r, &labels);
  EXPECT_EQ(out.str(), "sample_index,label,score,pair_0_0,pair_0_1\n0,0,1.5,1,2\n1,1,2.5,2,3\n");
  std::ostringstream bare;
  write_report_csv(bare, r);
  EXPECT_EQ(bare.str(), "sample_index,label,score,pair_0_0,pair_0_1\n0,,1.5,1,2\n1,,2.5,2,3\n");
}

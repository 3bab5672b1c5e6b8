#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ganen/checkpoint.hpp"
#include "ganen/commands.hpp"
#include "ganen/error.hpp"

#include "oracle.hpp"

using namespace ganen;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ganen_cmd_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig tiny_config(const fs::path& out) {
  RunConfig c = variant_defaults(Variant::kFAnoGan);
  c.generators = c.discriminators = 2;
  c.trainer.max_iter = 10;
  c.trainer.batch_size = 16;
  c.arch.latent_width = 2;
  c.arch.generator_hidden = {8};
  c.arch.discriminator_hidden = {8, 2};
  c.data.synthetic = SyntheticSpec{SyntheticKind::kRing, 80, 20, 2, 3};
  c.output_dir = out.string();
  c.validate();
  return c;
}

}  // namespace

TEST(GenerateData, WritesReproducibleFile) {
  const fs::path dir = temp_dir("gen");
  std::ostringstream log;
  GenerateDataOptions o{{SyntheticKind::kTwoMoons, 900, 100, 2, 4}, (dir / "a.csv").string(), ','};
  cmd_generate_data(o, log);
  o.output = (dir / "b.csv").string();
  cmd_generate_data(o, log);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  const LabeledDataset d = load_delimited((dir / "a.csv").string(), {});
  EXPECT_EQ(d.size(), 1000u);
  EXPECT_EQ(std::count(d.labels.begin(), d.labels.end(), 1), 100);
  o.spec.n_normal = 0;
  EXPECT_THROW(cmd_generate_data(o, log), ValidationError);
}

TEST(TrainScoreEvaluate, EndToEnd) {
  const fs::path dir = temp_dir("run");
  std::ostringstream log;
  const RunConfig c = tiny_config(dir);
  const TrainArtifacts t = cmd_train(c, log);
  EXPECT_EQ(t.result.iterations, 30u);
  for (const char* f : {kCheckpointFile, kHistoryFile, kResolvedConfigFile, kTestDataFile}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(config_from_json(read_json_file((dir / kResolvedConfigFile).string())), c);

  const fs::path sdir = dir / "scored";
  const AnomalyReport r = cmd_score({(dir / kCheckpointFile).string(), (dir / kTestDataFile).string(),
                                     sdir.string(), "label", ',', std::nullopt},
                                    log);
  const LabeledDataset test = load_delimited((dir / kTestDataFile).string(), {});
  EXPECT_EQ(r.scores.size(), test.size());
  EXPECT_EQ(test.size(), 20u + 20u);

  const Checkpoint ck = load_checkpoint((dir / kCheckpointFile).string());
  const AnomalyReport direct = score_dataset(ck.scaler->apply(test.rows), ck.model);
  EXPECT_EQ(direct.scores, r.scores);

  const Evaluation e = cmd_evaluate({(sdir / kScoresFile).string(), sdir.string(), std::nullopt, std::nullopt}, log);
  EXPECT_NEAR(e.auroc, oracle::auroc(r.scores, test.labels), 1e-12);
  EXPECT_EQ(e.samples, 40u);
  EXPECT_EQ(e.anomalies, 20u);
  EXPECT_TRUE(fs::exists(sdir / kMetricsFile));
  EXPECT_TRUE(fs::exists(sdir / kRocFile));
  EXPECT_TRUE(fs::exists(sdir / kScoreSummaryFile));
}

TEST(Score, RejectsWidthMismatch) {
  const fs::path dir = temp_dir("mismatch");
  std::ostringstream log;
  cmd_train(tiny_config(dir), log);
  GenerateDataOptions g{{SyntheticKind::kRing, 10, 2, 3, 0}, (dir / "wide.csv").string(), ','};
  cmd_generate_data(g, log);
  EXPECT_THROW(cmd_score({(dir / kCheckpointFile).string(), (dir / "wide.csv").string(), (dir / "s").string(),
                          "label", ',', std::nullopt},
                         log),
               ValidationError);
}

TEST(Evaluate, ShuffleInvariantAndPerfect) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(60);
  std::vector<int> l(60);
  for (std::size_t k = 0; k < 60; ++k) {
    l[k] = k % 4 == 0;
    s[k] = u(rng) + 0.3 * l[k];
  }
  const Evaluation a = evaluate_scores(s, l, std::nullopt, std::nullopt);
  std::vector<std::size_t> perm(60);
  for (std::size_t k = 0; k < 60; ++k) perm[k] = k;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> s2;
  std::vector<int> l2;
  for (std::size_t k : perm) {
    s2.push_back(s[k]);
    l2.push_back(l[k]);
  }
  const Evaluation b = evaluate_scores(s2, l2, std::nullopt, std::nullopt);
  EXPECT_EQ(a.auroc, b.auroc);
  EXPECT_EQ(a.at_threshold.f1, b.at_threshold.f1);
  EXPECT_EQ(a.roc.points, b.roc.points);

  const Evaluation p = evaluate_scores({0.1, 0.2, 0.9, 0.8}, {0, 0, 1, 1}, std::nullopt, std::nullopt);
  EXPECT_DOUBLE_EQ(p.auroc, 1.0);
  EXPECT_DOUBLE_EQ(p.at_threshold.f1, 1.0);
  EXPECT_THROW(evaluate_scores({0.1, 0.2}, {0, 0}, std::nullopt, std::nullopt), ValidationError);
}

TEST(Evaluate, ScoresFileWithoutLabelsRejected) {
  const fs::path dir = temp_dir("eval_bad");
  std::ofstream((dir / "s.csv").string()) << "sample_index,label,score\n0,,0.5\n";
  std::ostringstream log;
  EXPECT_THROW(cmd_evaluate({(dir / "s.csv").string(), dir.string(), std::nullopt, std::nullopt}, log),
               FormatError);
}

TEST(VerifyCritic, HandInstanceAndRandomBatch) {
  const fs::path dir = temp_dir("critic");
  std::ofstream((dir / "i.json").string())
      << R"({"norm": "L2", "train": [0, 2], "values": [0, 0], "support": [1], "weights": [1]})";
  std::ostringstream log;
  VerifyCriticOptions o;
  o.instance = (dir / "i.json").string();
  o.output = (dir / "report.json").string();
  o.plot = (dir / "plot.csv").string();
  const VerifyCriticOutcome one = cmd_verify_critic(o, log);
  EXPECT_TRUE(one.pass());
  EXPECT_EQ(one.instances, 1u);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "plot.csv"));

  VerifyCriticOptions r;
  r.max_train = 5;
  r.max_support = 25;
  r.count = 6;
  r.seed = 40;
  const VerifyCriticOutcome many = cmd_verify_critic(r, log);
  EXPECT_EQ(many.instances, 6u);
  EXPECT_TRUE(many.pass());
  EXPECT_LT(many.worst_difference, 1e-6);
}

TEST(Sweep, EnsembleSizeRows) {
  const fs::path dir = temp_dir("sweep");
  RunConfig c = tiny_config(dir);
  c.trainer.max_iter = 4;
  std::ostringstream log;
  const std::vector<SweepRow> rows = cmd_sweep(c, {SweepKind::kEnsembleSize, {1, 3}, 2}, log);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].setting, 1.0);
  EXPECT_EQ(rows[3].setting, 3.0);
  EXPECT_EQ(rows[0].seed, c.seed);
  EXPECT_EQ(rows[3].seed, c.seed + 3);
  EXPECT_TRUE(fs::exists(dir / kSweepFile));
  EXPECT_THROW(run_sweep(c, {SweepKind::kEnsembleSize, {1.5}, 1}, log), ValidationError);
}

TEST(Sweep, BetaSharesOneModelPerSeed) {
  const fs::path dir = temp_dir("sweep_beta");
  RunConfig c = tiny_config(dir);
  c.trainer.max_iter = 4;
  std::ostringstream log;
  const std::vector<SweepRow> rows = run_sweep(c, {SweepKind::kBeta, {0.0, 1.0}, 2}, log);
  ASSERT_EQ(rows.size(), 4u);
  const PreparedData p = prepare_data(c);
  RunConfig c0 = c;
  const TrainedModel m = train_model(c0, p.train);
  const double expected = test_auroc(m.model, p.test, p.scaler, 0.0);
  const auto hit = std::find_if(rows.begin(), rows.end(),
                                [&](const SweepRow& r) { return r.setting == 0.0 && r.seed == c.seed; });
  ASSERT_NE(hit, rows.end());
  EXPECT_EQ(hit->auroc, expected);
}

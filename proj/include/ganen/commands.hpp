#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ganen/config.hpp"
#include "ganen/critic.hpp"
#include "ganen/data.hpp"
#include "ganen/metrics.hpp"
#include "ganen/scoring.hpp"
#include "ganen/trainer.hpp"

namespace ganen {

// File names inside a run directory.
inline constexpr const char* kCheckpointFile = "checkpoint.json";
inline constexpr const char* kHistoryFile = "history.csv";
inline constexpr const char* kResolvedConfigFile = "resolved_config.json";
inline constexpr const char* kTestDataFile = "test.csv";
inline constexpr const char* kScoresFile = "scores.csv";
inline constexpr const char* kScoreSummaryFile = "score_summary.json";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kRocFile = "roc.csv";
inline constexpr const char* kSweepFile = "sweep.csv";

struct GenerateDataOptions {
  SyntheticSpec spec;
  std::string output;
  char delimiter = ',';
};

LabeledDataset cmd_generate_data(const GenerateDataOptions& options, std::ostream& log);

/// Training rows (normal only, scaled) and raw test rows of a run.
struct PreparedData {
  LabeledDataset train;
  LabeledDataset test;
  std::optional<Scaler> scaler;
};

LabeledDataset load_source(const DataSource& source);
PreparedData prepare_data(const RunConfig& config);

struct TrainedModel {
  EnsembleModel model;
  TrainResult result;
};

/// Builds the ensemble for `config` on already scaled training rows and runs
/// the trainer.
TrainedModel train_model(const RunConfig& config, const LabeledDataset& train);

/// AUROC of `model` on raw `test` rows after `scaler`.
double test_auroc(const EnsembleModel& model, const LabeledDataset& test, const std::optional<Scaler>& scaler,
                  std::optional<double> beta = std::nullopt);

struct TrainArtifacts {
  std::string run_dir;
  TrainResult result;
};

/// Writes checkpoint, history, resolved config and the raw test split into
/// config.output_dir.
TrainArtifacts cmd_train(const RunConfig& config, std::ostream& log);

struct ScoreOptions {
  std::string checkpoint;
  std::string data;
  std::string output_dir;
  std::string label_column = "label";
  char delimiter = ',';
  std::optional<double> beta;
};

AnomalyReport cmd_score(const ScoreOptions& options, std::ostream& log);

struct Evaluation {
  std::size_t samples = 0;
  std::size_t anomalies = 0;
  double auroc = 0.0;
  RocCurve roc;
  double contamination = 0.0;
  ClassificationSummary at_threshold;
};

/// Threshold: explicit if given, else by contamination (defaults to the
/// anomaly fraction of `labels`).
Evaluation evaluate_scores(const std::vector<double>& scores, const std::vector<int>& labels,
                           std::optional<double> contamination, std::optional<double> threshold);

nlohmann::json evaluation_to_json(const Evaluation& e);

struct EvaluateOptions {
  std::string scores;
  std::string output_dir;
  std::optional<double> contamination;
  std::optional<double> threshold;
};

/// Reads a scores file with a filled label column.
Evaluation cmd_evaluate(const EvaluateOptions& options, std::ostream& log);

struct VerifyCriticOptions {
  std::optional<std::string> instance;
  std::size_t max_train = 8;
  std::size_t max_support = 25;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  /// 0 alternates 1-D and 2-D instances.
  std::size_t dim = 0;
  /// Unset alternates L1 and L2.
  std::optional<critic::Norm> norm;
  double tol = 1e-3;
  double lipschitz_tol = 1e-6;
  std::optional<std::string> output;
  std::optional<std::string> plot;
};

struct VerifyCriticOutcome {
  std::size_t instances = 0;
  std::size_t passed = 0;
  double worst_difference = 0.0;
  nlohmann::json reports = nlohmann::json::array();
  bool pass() const { return passed == instances; }
};

/// Instance k of a random sweep uses seed + k.
VerifyCriticOutcome cmd_verify_critic(const VerifyCriticOptions& options, std::ostream& log);

enum class SweepKind { kEnsembleSize, kBeta };
std::string_view sweep_kind_name(SweepKind k);
SweepKind parse_sweep_kind(std::string_view name);

struct SweepOptions {
  SweepKind kind = SweepKind::kEnsembleSize;
  /// Ensemble sizes (I = J) or beta values.
  std::vector<double> settings;
  std::size_t seeds = 5;
};

struct SweepRow {
  double setting = 0.0;
  std::uint64_t seed = 0;
  double auroc = 0.0;
};

/// Ensemble-size cells are (setting, seed) in row-major order and use
/// base.seed + cell index. A beta sweep trains one model per seed index k
/// with seed base.seed + k and scores it under every beta.
std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepOptions& options, std::ostream& log);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// run_sweep, writing sweep.csv into base.output_dir.
std::vector<SweepRow> cmd_sweep(const RunConfig& base, const SweepOptions& options, std::ostream& log);

}  // namespace ganen

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ganen/losses.hpp"
#include "ganen/network.hpp"
#include "ganen/trainer.hpp"

namespace ganen {

/// Scores of every sample under every pair and their ensemble average.
struct AnomalyReport {
  Variant variant = Variant::kFAnoGan;
  LossWeights weights;
  std::size_t num_generators = 0;
  std::size_t num_discriminators = 0;
  std::uint64_t seed = 0;
  /// Ensemble score per sample.
  std::vector<double> scores;
  /// pair_scores[i * J + j][sample]
  std::vector<std::vector<double>> pair_scores;
};

/// Anomaly score of each row of `samples` under one pair: L_r + beta * L_d,
/// or L_e for GANomaly.
std::vector<double> pair_scores(const Tensor& samples, const GeneratorBundle& gen,
                                const DiscriminatorBundle& disc, const LossWeights& weights,
                                Variant variant);

/// Score of a single sample x[1 x d] under one pair.
double pair_score(const Tensor& x, const GeneratorBundle& gen, const DiscriminatorBundle& disc,
                  const LossWeights& weights, Variant variant);

/// Average of the pair scores over all I*J pairs.
double ensemble_score(const Tensor& x, const EnsembleModel& model);

/// Scores every row. Never modifies the model.
AnomalyReport score_dataset(const Tensor& samples, const EnsembleModel& model, std::uint64_t seed = 0);

/// Same model, different score weight beta.
AnomalyReport score_dataset(const Tensor& samples, const EnsembleModel& model, double beta,
                            std::uint64_t seed);

/// `sample_index,label,score,pair_<i>_<j>...` with 17 significant digits.
/// The label column is empty when labels are not supplied.
void write_report_csv(std::ostream& out, const AnomalyReport& report,
                      const std::vector<int>* labels = nullptr);

}  // namespace ganen

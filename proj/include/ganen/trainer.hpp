#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "ganen/adam.hpp"
#include "ganen/losses.hpp"
#include "ganen/network.hpp"

namespace ganen {

/// I generators and J discriminators of one base-model variant.
struct EnsembleModel {
  Variant variant = Variant::kFAnoGan;
  ArchitectureSpec arch;
  std::vector<GeneratorBundle> generators;
  std::vector<DiscriminatorBundle> discriminators;
  LossWeights weights;
  PriorSpec prior;

  std::size_t num_generators() const { return generators.size(); }
  std::size_t num_discriminators() const { return discriminators.size(); }
  /// Throws unless I, J >= 1 and every bundle matches `arch` and `variant`.
  void validate() const;
};

EnsembleModel make_ensemble(Variant variant, const ArchitectureSpec& arch, std::size_t num_generators,
                            std::size_t num_discriminators, const LossWeights& weights,
                            std::uint64_t seed);

/// Weights used when the caller does not supply any.
LossWeights default_weights(Variant variant);

struct TrainConfig {
  std::size_t max_iter = 1000;
  std::size_t batch_size = 128;
  double lr_generator = 1e-4;
  double lr_discriminator = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// WGAN critic weights are clipped to [-clip, clip] after every update.
  double clip = 0.01;
  /// Critic updates per generator update (f-AnoGAN adversarial phase only).
  std::size_t n_critic = 5;
  std::uint64_t seed = 0;
  /// f-AnoGAN: fraction of max_iter spent in the adversarial phase; the rest
  /// trains the encoder.
  double phase_split = 0.5;
  bool stop_on_plateau = true;
  std::size_t plateau_window = 100;
  double plateau_tolerance = 1e-4;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

enum class Phase {
  kJoint,        // EGBAD and GANomaly: every network trains together
  kAdversarial,  // f-AnoGAN first phase: decoder and critic
  kEncoder,      // f-AnoGAN second phase: encoder only
};

std::string_view phase_name(Phase p);

struct HistoryRow {
  std::size_t iteration = 0;
  Phase phase = Phase::kJoint;
  std::size_t generator = 0;
  std::size_t discriminator = 0;
  /// Adversarial loss of the last discriminator step; NaN when the phase has
  /// no discriminator step.
  double adversarial = 0.0;
  /// Generator objective before the update.
  double objective = 0.0;
};

struct TrainResult {
  std::vector<HistoryRow> history;
  std::vector<std::size_t> generator_updates;
  std::vector<std::size_t> discriminator_updates;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Writes `iteration,phase,generator,discriminator,adversarial,objective` rows.
void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history);

struct GeneratorOptimizer {
  Adam encoder;
  Adam decoder;
  Adam second_encoder;
};

struct DiscriminatorOptimizer {
  Adam net;
};

GeneratorOptimizer make_generator_optimizer(const TrainConfig& config);
DiscriminatorOptimizer make_discriminator_optimizer(const TrainConfig& config);

/// Uniform independent (generator, discriminator) indices, 0-based.
std::pair<std::size_t, std::size_t> sample_pair(std::mt19937_64& rng, std::size_t num_generators,
                                                std::size_t num_discriminators);

/// Minibatch of `batch_size` rows drawn uniformly with replacement.
Tensor sample_minibatch(const Tensor& data, std::size_t batch_size, std::mt19937_64& rng);

/// Gradient ascent on the adversarial loss of the pair via Adam on its
/// negation; the WGAN critic is clipped afterwards. Returns the loss value
/// before the update.
double discriminator_step(Variant variant, const GeneratorBundle& gen, DiscriminatorBundle& disc,
                          DiscriminatorOptimizer& opt, const Tensor& batch, const Tensor& prior,
                          const TrainConfig& config);

/// Gradient descent on the generator objective of the pair for the networks
/// that `phase` trains. Returns the objective before the update.
double generator_step(Variant variant, Phase phase, GeneratorBundle& gen,
                      const DiscriminatorBundle& disc, GeneratorOptimizer& opt,
                      const LossWeights& weights, const Tensor& batch, const Tensor& prior,
                      const TrainConfig& config);

/// Networks a phase updates.
Tracking phase_tracking(Variant variant, Phase phase);
/// Generator weights effective in a phase.
LossWeights phase_weights(Variant variant, Phase phase, const LossWeights& weights);
/// Phases of a variant with their iteration budgets.
std::vector<std::pair<Phase, std::size_t>> phase_schedule(Variant variant, const TrainConfig& config);

/// Random streams of a run. Pair indices come from their own stream so that a
/// 1x1 ensemble consumes the data stream exactly like a single model.
struct RandomStreams {
  std::mt19937_64 pairs;
  std::mt19937_64 data;

  explicit RandomStreams(std::uint64_t seed);
};

/// Relative change of consecutive window means of the objective.
class PlateauDetector {
 public:
  PlateauDetector(std::size_t window, double tolerance) : window_(window), tolerance_(tolerance) {}
  /// Returns true once the objective has plateaued.
  bool push(double objective);

 private:
  std::size_t window_;
  double tolerance_;
  std::vector<double> values_;
};

using EnsembleObserver = std::function<void(const HistoryRow&, const EnsembleModel&)>;

/// Randomized pair training of an ensemble. Keeps one Adam state per network.
class EnsembleTrainer {
 public:
  EnsembleTrainer(EnsembleModel& model, TrainConfig config);

  TrainResult train(const Tensor& data, const EnsembleObserver& observer = {});

  double discriminator_step(std::size_t i, std::size_t j, const Tensor& batch, const Tensor& prior);
  double generator_step(Phase phase, std::size_t i, std::size_t j, const Tensor& batch,
                        const Tensor& prior);

 private:
  EnsembleModel& model_;
  TrainConfig config_;
  std::vector<GeneratorOptimizer> gen_opts_;
  std::vector<DiscriminatorOptimizer> disc_opts_;
};

/// Convenience wrapper around EnsembleTrainer.
TrainResult train(EnsembleModel& model, const Tensor& data, const TrainConfig& config,
                  const EnsembleObserver& observer = {});

using SingleObserver =
    std::function<void(const HistoryRow&, const GeneratorBundle&, const DiscriminatorBundle&)>;

/// Training of one generator against one discriminator without any pair
/// sampling: the base-model loop.
TrainResult train_single_model(Variant variant, GeneratorBundle& gen, DiscriminatorBundle& disc,
                               const LossWeights& weights, const PriorSpec& prior,
                               const Tensor& data, const TrainConfig& config,
                               const SingleObserver& observer = {});

}  // namespace ganen

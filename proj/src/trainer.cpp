#include "ganen/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "ganen/error.hpp"

namespace ganen {
namespace {

void require_same_spec(const Mlp& net, const MlpSpec& spec, const char* what) {
  if (!(net.spec() == spec)) throw ValidationError(std::string(what) + " does not match the architecture");
}

void clip_values(Mlp& net, double c) {
  for (Tensor* p : net.parameters()) {
    for (double& v : p->values()) v = std::clamp(v, -c, c);
  }
}

void zero_grads(const std::vector<Tensor*>& params) {
  for (Tensor* p : params) p->zero_grad();
}

std::string pair_context(std::size_t t, std::size_t i, std::size_t j) {
  return "iteration " + std::to_string(t) + ", pair (" + std::to_string(i) + ", " +
         std::to_string(j) + "): ";
}

}  // namespace

void EnsembleModel::validate() const {
  if (generators.empty() || discriminators.empty()) {
    throw ValidationError("an ensemble needs at least one generator and one discriminator");
  }
  weights.validate();
  if (prior.dim != arch.latent_width) throw ValidationError("prior dimension must equal latent width");
  for (const auto& g : generators) {
    g.validate();
    require_same_spec(g.encoder, encoder_spec(arch), "encoder");
    require_same_spec(g.decoder, decoder_spec(arch), "decoder");
    if ((variant == Variant::kGanomaly) != g.second_encoder.has_value()) {
      throw ValidationError("second encoder present iff the variant is ganomaly");
    }
  }
  for (const auto& d : discriminators) {
    require_same_spec(d.net, discriminator_spec(arch, variant), "discriminator");
  }
}

LossWeights default_weights(Variant variant) {
  switch (variant) {
    case Variant::kFAnoGan: return {1.0, 1.0, 1.0, 0.0, 39.0, 2};
    case Variant::kEgbad: return {1.0, 0.0, 0.0, 0.0, 0.1, 2};
    case Variant::kGanomaly: return {1.0, 50.0, 1.0, 1.0, 0.0, 2};
  }
  return {};
}

EnsembleModel make_ensemble(Variant variant, const ArchitectureSpec& arch, std::size_t num_generators,
                            std::size_t num_discriminators, const LossWeights& weights,
                            std::uint64_t seed) {
  if (num_generators == 0 || num_discriminators == 0) {
    throw ValidationError("an ensemble needs at least one generator and one discriminator");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0u};
  std::mt19937_64 rng(seq);
  EnsembleModel m;
  m.variant = variant;
  m.arch = arch;
  m.weights = weights;
  m.prior = PriorSpec{arch.latent_width};
  for (std::size_t i = 0; i < num_generators; ++i) m.generators.push_back(make_generator(arch, variant, rng));
  for (std::size_t j = 0; j < num_discriminators; ++j) {
    m.discriminators.push_back(make_discriminator(arch, variant, rng));
  }
  m.validate();
  return m;
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ValidationError("batch_size must be positive");
  if (!(lr_generator >= 0.0) || !(lr_discriminator >= 0.0)) {
    throw ValidationError("learning rates must be >= 0");
  }
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in (0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ValidationError("Adam epsilon must be positive");
  if (!(clip > 0.0)) throw ValidationError("clip must be positive");
  if (n_critic == 0) throw ValidationError("n_critic must be positive");
  if (!(phase_split >= 0.0 && phase_split <= 1.0)) throw ValidationError("phase_split must lie in [0, 1]");
  if (plateau_window == 0) throw ValidationError("plateau_window must be positive");
  if (!(plateau_tolerance >= 0.0)) throw ValidationError("plateau_tolerance must be >= 0");
}

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kJoint: return "joint";
    case Phase::kAdversarial: return "adversarial";
    case Phase::kEncoder: return "encoder";
  }
  return "joint";
}

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history) {
  out << "iteration,phase,generator,discriminator,adversarial,objective\n";
  out << std::setprecision(17);
  for (const auto& r : history) {
    out << r.iteration << ',' << phase_name(r.phase) << ',' << r.generator << ',' << r.discriminator
        << ',';
    if (!std::isnan(r.adversarial)) out << r.adversarial;
    out << ',' << r.objective << '\n';
  }
}

GeneratorOptimizer make_generator_optimizer(const TrainConfig& c) {
  AdamOptions o{c.lr_generator, c.adam_beta1, c.adam_beta2, c.adam_epsilon};
  return {Adam(o), Adam(o), Adam(o)};
}

DiscriminatorOptimizer make_discriminator_optimizer(const TrainConfig& c) {
  return {Adam(AdamOptions{c.lr_discriminator, c.adam_beta1, c.adam_beta2, c.adam_epsilon})};
}

std::pair<std::size_t, std::size_t> sample_pair(std::mt19937_64& rng, std::size_t num_generators,
                                                std::size_t num_discriminators) {
  if (num_generators == 0 || num_discriminators == 0) throw ValidationError("empty ensemble");
  std::uniform_int_distribution<std::size_t> gi(0, num_generators - 1);
  std::uniform_int_distribution<std::size_t> dj(0, num_discriminators - 1);
  const std::size_t i = gi(rng);
  const std::size_t j = dj(rng);
  return {i, j};
}

Tensor sample_minibatch(const Tensor& data, std::size_t batch_size, std::mt19937_64& rng) {
  if (data.rank() != 2) throw ShapeError("training data must be a matrix");
  std::uniform_int_distribution<std::size_t> pick(0, data.rows() - 1);
  std::vector<std::size_t> idx(batch_size);
  for (auto& k : idx) k = pick(rng);
  return data.gather_rows(idx);
}

Tracking phase_tracking(Variant variant, Phase phase) {
  switch (phase) {
    case Phase::kAdversarial: return {false, true, false, false};
    case Phase::kEncoder: return {true, false, false, false};
    case Phase::kJoint: return {true, true, variant == Variant::kGanomaly, false};
  }
  return {};
}

LossWeights phase_weights(Variant variant, Phase phase, const LossWeights& w) {
  (void)variant;
  LossWeights out = w;
  switch (phase) {
    case Phase::kAdversarial:
      out.adversarial = 1.0;
      out.reconstruction = out.discriminative = out.encoding = 0.0;
      break;
    case Phase::kEncoder:
      out.adversarial = out.encoding = 0.0;
      break;
    case Phase::kJoint:
      break;
  }
  return out;
}

std::vector<std::pair<Phase, std::size_t>> phase_schedule(Variant variant, const TrainConfig& c) {
  if (variant != Variant::kFAnoGan) return {{Phase::kJoint, c.max_iter}};
  const auto first = static_cast<std::size_t>(std::llround(static_cast<double>(c.max_iter) * c.phase_split));
  return {{Phase::kAdversarial, first}, {Phase::kEncoder, c.max_iter - first}};
}

double discriminator_step(Variant variant, const GeneratorBundle& gen, DiscriminatorBundle& disc,
                          DiscriminatorOptimizer& opt, const Tensor& batch, const Tensor& prior,
                          const TrainConfig& config) {
  check_pair(variant, gen, disc);
  auto params = disc.net.parameters();
  zero_grads(params);
  Tape tape;
  Tracking track;
  track.discriminator = true;
  Var la = adversarial_loss(tape, variant, tape.constant(batch), tape.constant(prior), gen, disc, track);
  const double value = tape.value(la).item();
  tape.backward(tape.scale(la, -1.0));
  tape.accumulate_grads(params);
  opt.net.step(params);
  if (variant == Variant::kFAnoGan) clip_values(disc.net, config.clip);
  return value;
}

double generator_step(Variant variant, Phase phase, GeneratorBundle& gen,
                      const DiscriminatorBundle& disc, GeneratorOptimizer& opt,
                      const LossWeights& weights, const Tensor& batch, const Tensor& prior,
                      const TrainConfig& config) {
  (void)config;
  check_pair(variant, gen, disc);
  const Tracking track = phase_tracking(variant, phase);
  const LossWeights w = phase_weights(variant, phase, weights);

  std::vector<Tensor*> enc = gen.encoder.parameters();
  std::vector<Tensor*> dec = gen.decoder.parameters();
  std::vector<Tensor*> enc2 = gen.second_encoder ? gen.second_encoder->parameters() : std::vector<Tensor*>{};
  zero_grads(enc);
  zero_grads(dec);
  zero_grads(enc2);

  Tape tape;
  Var loss = composite_generator_loss(tape, variant, tape.constant(batch), tape.constant(prior), gen,
                                      disc, w, track);
  const double value = tape.value(loss).item();
  tape.backward(loss);
  if (track.encoder) {
    tape.accumulate_grads(enc);
    opt.encoder.step(enc);
  }
  if (track.decoder) {
    tape.accumulate_grads(dec);
    opt.decoder.step(dec);
  }
  if (track.second_encoder) {
    tape.accumulate_grads(enc2);
    opt.second_encoder.step(enc2);
  }
  return value;
}

RandomStreams::RandomStreams(std::uint64_t seed) {
  const auto lo = static_cast<std::uint32_t>(seed);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  std::seed_seq pair_seq{lo, hi, 1u};
  std::seed_seq data_seq{lo, hi, 2u};
  pairs.seed(pair_seq);
  data.seed(data_seq);
}

bool PlateauDetector::push(double objective) {
  values_.push_back(objective);
  if (values_.size() < 2 * window_) return false;
  double recent = 0.0, previous = 0.0;
  const std::size_t n = values_.size();
  for (std::size_t k = 0; k < window_; ++k) {
    recent += values_[n - 1 - k];
    previous += values_[n - 1 - window_ - k];
  }
  recent /= static_cast<double>(window_);
  previous /= static_cast<double>(window_);
  const double scale = std::max(std::fabs(previous), std::numeric_limits<double>::min());
  return std::fabs(recent - previous) / scale < tolerance_;
}

EnsembleTrainer::EnsembleTrainer(EnsembleModel& model, TrainConfig config)
    : model_(model), config_(config) {
  model_.validate();
  config_.validate();
  for (std::size_t i = 0; i < model_.num_generators(); ++i) gen_opts_.push_back(make_generator_optimizer(config_));
  for (std::size_t j = 0; j < model_.num_discriminators(); ++j) {
    disc_opts_.push_back(make_discriminator_optimizer(config_));
  }
}

double EnsembleTrainer::discriminator_step(std::size_t i, std::size_t j, const Tensor& batch,
                                           const Tensor& prior) {
  return ganen::discriminator_step(model_.variant, model_.generators.at(i), model_.discriminators.at(j),
                                   disc_opts_.at(j), batch, prior, config_);
}

double EnsembleTrainer::generator_step(Phase phase, std::size_t i, std::size_t j, const Tensor& batch,
                                       const Tensor& prior) {
  return ganen::generator_step(model_.variant, phase, model_.generators.at(i), model_.discriminators.at(j),
                               gen_opts_.at(i), model_.weights, batch, prior, config_);
}

namespace {

// One iteration of the base loop shared by the ensemble and single-model
// trainers. `disc_step` and `gen_step` close over the selected pair.
template <typename DiscStep, typename GenStep>
HistoryRow run_iteration(Variant variant, Phase phase, const TrainConfig& config, const PriorSpec& prior,
                         const Tensor& data, std::mt19937_64& rng, DiscStep&& disc_step,
                         GenStep&& gen_step) {
  HistoryRow row;
  row.phase = phase;
  row.adversarial = std::numeric_limits<double>::quiet_NaN();
  Tensor batch = sample_minibatch(data, config.batch_size, rng);
  if (phase != Phase::kEncoder) {
    const std::size_t critic_steps = variant == Variant::kFAnoGan ? config.n_critic : 1;
    for (std::size_t c = 0; c < critic_steps; ++c) {
      Tensor critic_batch = c == 0 ? batch : sample_minibatch(data, config.batch_size, rng);
      Tensor z = prior.sample(config.batch_size, rng);
      row.adversarial = disc_step(critic_batch, z);
    }
  }
  Tensor z = prior.sample(config.batch_size, rng);
  row.objective = gen_step(batch, z);
  return row;
}

void check_training_data(const Tensor& data, std::size_t width) {
  if (data.rank() != 2) throw ValidationError("training data must be a matrix");
  if (data.cols() != width) {
    throw ValidationError("training data has width " + std::to_string(data.cols()) +
                          ", model expects " + std::to_string(width));
  }
}

}  // namespace

TrainResult EnsembleTrainer::train(const Tensor& data, const EnsembleObserver& observer) {
  check_training_data(data, model_.arch.data_width);
  TrainResult result;
  result.generator_updates.assign(model_.num_generators(), 0);
  result.discriminator_updates.assign(model_.num_discriminators(), 0);
  RandomStreams streams(config_.seed);

  std::size_t t = 0;
  for (const auto& [phase, budget] : phase_schedule(model_.variant, config_)) {
    PlateauDetector plateau(config_.plateau_window, config_.plateau_tolerance);
    for (std::size_t k = 0; k < budget; ++k, ++t) {
      const auto [i, j] = sample_pair(streams.pairs, model_.num_generators(), model_.num_discriminators());
      HistoryRow row;
      try {
        row = run_iteration(
            model_.variant, phase, config_, model_.prior, data, streams.data,
            [&](const Tensor& b, const Tensor& z) { return discriminator_step(i, j, b, z); },
            [&](const Tensor& b, const Tensor& z) { return generator_step(phase, i, j, b, z); });
      } catch (const DivergenceError& e) {
        throw DivergenceError(pair_context(t, i, j) + e.what());
      }
      row.iteration = t;
      row.generator = i;
      row.discriminator = j;
      ++result.generator_updates[i];
      if (phase != Phase::kEncoder) ++result.discriminator_updates[j];
      result.history.push_back(row);
      if (observer) observer(row, model_);
      if (config_.stop_on_plateau && plateau.push(row.objective)) {
        ++t;
        result.converged = true;
        break;
      }
    }
  }
  result.iterations = t;
  return result;
}

TrainResult train(EnsembleModel& model, const Tensor& data, const TrainConfig& config,
                  const EnsembleObserver& observer) {
  EnsembleTrainer trainer(model, config);
  return trainer.train(data, observer);
}

TrainResult train_single_model(Variant variant, GeneratorBundle& gen, DiscriminatorBundle& disc,
                               const LossWeights& weights, const PriorSpec& prior,
                               const Tensor& data, const TrainConfig& config,
                               const SingleObserver& observer) {
  config.validate();
  weights.validate();
  check_pair(variant, gen, disc);
  check_training_data(data, gen.data_width());
  GeneratorOptimizer gen_opt = make_generator_optimizer(config);
  DiscriminatorOptimizer disc_opt = make_discriminator_optimizer(config);
  RandomStreams streams(config.seed);

  TrainResult result;
  result.generator_updates.assign(1, 0);
  result.discriminator_updates.assign(1, 0);
  std::size_t t = 0;
  for (const auto& [phase, budget] : phase_schedule(variant, config)) {
    PlateauDetector plateau(config.plateau_window, config.plateau_tolerance);
    for (std::size_t k = 0; k < budget; ++k, ++t) {
      HistoryRow row;
      try {
        row = run_iteration(
            variant, phase, config, prior, data, streams.data,
            [&](const Tensor& b, const Tensor& z) {
              return discriminator_step(variant, gen, disc, disc_opt, b, z, config);
            },
            [&](const Tensor& b, const Tensor& z) {
              return generator_step(variant, phase, gen, disc, gen_opt, weights, b, z, config);
            });
      } catch (const DivergenceError& e) {
        throw DivergenceError(pair_context(t, 0, 0) + e.what());
      }
      row.iteration = t;
      ++result.generator_updates[0];
      if (phase != Phase::kEncoder) ++result.discriminator_updates[0];
      result.history.push_back(row);
      if (observer) observer(row, gen, disc);
      if (config.stop_on_plateau && plateau.push(row.objective)) {
        ++t;
        result.converged = true;
        break;
      }
    }
  }
  result.iterations = t;
  return result;
}

}  // namespace ganen

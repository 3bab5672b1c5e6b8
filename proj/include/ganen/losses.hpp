#pragma once

#include <cstddef>
#include <random>

#include "ganen/autodiff.hpp"
#include "ganen/network.hpp"

namespace ganen {

/// Generator loss weights plus the anomaly-score weight.
///
/// `adversarial`, `reconstruction`, `discriminative`, `encoding` weigh
/// L_a, L_r, L_d and L_e in the generator objective, in that order.
struct LossWeights {
  double adversarial = 1.0;
  double reconstruction = 0.0;
  double discriminative = 0.0;
  double encoding = 0.0;
  double beta = 1.0;
  int ell = 2;

  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Standard multivariate Gaussian prior over encodings.
struct PriorSpec {
  std::size_t dim = 16;

  Tensor sample(std::size_t n, std::mt19937_64& rng) const;
};

// All losses take a batch x[n x d] and reduce by the mean over rows.

/// mean log D(x) + log(1 - D(G_d(G_e(x)))) for a sigmoid discriminator on x.
Var adv_gan(Tape& tape, Var batch, const GeneratorBundle& gen, const DiscriminatorBundle& disc,
            Tracking track);
/// mean D(x) - mean D(G_d(z~)) for an identity-output critic. The encoder
/// does not appear.
Var adv_wgan(Tape& tape, Var batch, Var prior, const GeneratorBundle& gen,
             const DiscriminatorBundle& disc, Tracking track);
/// mean log D(x, G_e(x)) + log(1 - D(G_d(z~), z~)) for a joint discriminator.
Var adv_bigan(Tape& tape, Var batch, Var prior, const GeneratorBundle& gen,
              const DiscriminatorBundle& disc, Tracking track);

/// Dispatches to the adversarial loss of `variant`. `prior` is ignored for
/// GANomaly.
Var adversarial_loss(Tape& tape, Variant variant, Var batch, Var prior,
                     const GeneratorBundle& gen, const DiscriminatorBundle& disc, Tracking track);

/// mean ||x - G_d(G_e(x))||_ell^ell
Var recon_loss(Tape& tape, Var batch, const GeneratorBundle& gen, int ell, Tracking track);
/// mean ||f_D(x) - f_D(x~)||_ell^ell over the last hidden layer. For EGBAD the
/// discriminator sees (x, G_e(x)) and (x~, G_e(x~)).
Var disc_loss(Tape& tape, Variant variant, Var batch, const GeneratorBundle& gen,
              const DiscriminatorBundle& disc, int ell, Tracking track);
/// mean ||G_e(x; phi) - G_e(x~; phi~)||_ell^ell
Var enc_loss(Tape& tape, Var batch, const GeneratorBundle& gen, int ell, Tracking track);

/// adversarial*L_a + reconstruction*L_r + discriminative*L_d + encoding*L_e.
/// Terms with zero weight are not recorded.
Var composite_generator_loss(Tape& tape, Variant variant, Var batch, Var prior,
                             const GeneratorBundle& gen, const DiscriminatorBundle& disc,
                             const LossWeights& weights, Tracking track);

/// Throws ValidationError unless `disc` has the input width and output
/// activation that `variant` requires for a generator of data width d and
/// latent width d'.
void check_pair(Variant variant, const GeneratorBundle& gen, const DiscriminatorBundle& disc);

}  // namespace ganen

#include "ganen/losses.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "ganen/error.hpp"

namespace ganen {
namespace {

std::size_t batch_rows(const Tape& tape, Var batch) { return tape.value(batch).rows(); }

Var one_minus(Tape& tape, Var u) { return tape.add_scalar(tape.scale(u, -1.0), 1.0); }

Var mean_row_norm(Tape& tape, Var a, Var b, int ell, std::size_t rows) {
  return tape.scale(tape.lp_power_norm(tape.sub(a, b), ell), 1.0 / static_cast<double>(rows));
}

void require_output(const DiscriminatorBundle& disc, Activation expected, const char* loss) {
  if (disc.net.spec().output != expected || disc.net.spec().output_width() != 1) {
    throw ValidationError(std::string(loss) + " requires a discriminator with scalar " +
                          std::string(activation_name(expected)) + " output");
  }
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {adversarial, reconstruction, discriminative, encoding, beta}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("loss weights must be finite and >= 0");
  }
  if (adversarial == 0.0 && reconstruction == 0.0 && discriminative == 0.0 && encoding == 0.0) {
    throw ValidationError("at least one generator loss weight must be positive");
  }
  if (ell != 1 && ell != 2) throw ValidationError("ell must be 1 or 2");
}

Tensor PriorSpec::sample(std::size_t n, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor z(Shape{n, dim});
  for (double& v : z.values()) v = normal(rng);
  return z;
}

void check_pair(Variant variant, const GeneratorBundle& gen, const DiscriminatorBundle& disc) {
  const std::size_t d = gen.data_width();
  const std::size_t expected_in = variant == Variant::kEgbad ? d + gen.latent_width() : d;
  if (disc.input_width() != expected_in) {
    throw ValidationError(std::string(variant_name(variant)) + " discriminator must take width " +
                          std::to_string(expected_in) + ", has " +
                          std::to_string(disc.input_width()));
  }
  require_output(disc, variant == Variant::kFAnoGan ? Activation::kIdentity : Activation::kSigmoid,
                 variant_name(variant).data());
  if (variant == Variant::kGanomaly && !gen.second_encoder) {
    throw ValidationError("ganomaly generators need a second encoder");
  }
}

Var adv_gan(Tape& tape, Var batch, const GeneratorBundle& gen, const DiscriminatorBundle& disc,
            Tracking track) {
  require_output(disc, Activation::kSigmoid, "adv_gan");
  Var real = discriminate(tape, batch, disc, track.discriminator).u;
  Var x_rec = reconstruct(tape, batch, gen, track);
  Var fake = discriminate(tape, x_rec, disc, track.discriminator).u;
  return tape.add(tape.mean(tape.log(real)), tape.mean(tape.log(one_minus(tape, fake))));
}

Var adv_wgan(Tape& tape, Var batch, Var prior, const GeneratorBundle& gen,
             const DiscriminatorBundle& disc, Tracking track) {
  require_output(disc, Activation::kIdentity, "adv_wgan");
  if (tape.value(prior).rows() != batch_rows(tape, batch)) {
    throw ShapeError("adv_wgan needs as many prior samples as batch rows");
  }
  Var real = discriminate(tape, batch, disc, track.discriminator).u;
  Var generated = decode(tape, prior, gen, track.decoder);
  Var fake = discriminate(tape, generated, disc, track.discriminator).u;
  return tape.sub(tape.mean(real), tape.mean(fake));
}

Var adv_bigan(Tape& tape, Var batch, Var prior, const GeneratorBundle& gen,
              const DiscriminatorBundle& disc, Tracking track) {
  require_output(disc, Activation::kSigmoid, "adv_bigan");
  if (disc.input_width() != gen.data_width() + gen.latent_width()) {
    throw ValidationError("adv_bigan requires a joint discriminator over (x, z)");
  }
  if (tape.value(prior).rows() != batch_rows(tape, batch)) {
    throw ShapeError("adv_bigan needs as many prior samples as batch rows");
  }
  Var z = encode(tape, batch, gen, track.encoder);
  Var real = discriminate(tape, concat_sample_encoding(tape, batch, z), disc, track.discriminator).u;
  Var generated = decode(tape, prior, gen, track.decoder);
  Var fake =
      discriminate(tape, concat_sample_encoding(tape, generated, prior), disc, track.discriminator).u;
  return tape.add(tape.mean(tape.log(real)), tape.mean(tape.log(one_minus(tape, fake))));
}

Var adversarial_loss(Tape& tape, Variant variant, Var batch, Var prior,
                     const GeneratorBundle& gen, const DiscriminatorBundle& disc, Tracking track) {
  switch (variant) {
    case Variant::kFAnoGan: return adv_wgan(tape, batch, prior, gen, disc, track);
    case Variant::kEgbad: return adv_bigan(tape, batch, prior, gen, disc, track);
    case Variant::kGanomaly: return adv_gan(tape, batch, gen, disc, track);
  }
  throw ValidationError("unknown variant");
}

Var recon_loss(Tape& tape, Var batch, const GeneratorBundle& gen, int ell, Tracking track) {
  Var x_rec = reconstruct(tape, batch, gen, track);
  return mean_row_norm(tape, batch, x_rec, ell, batch_rows(tape, batch));
}

Var disc_loss(Tape& tape, Variant variant, Var batch, const GeneratorBundle& gen,
              const DiscriminatorBundle& disc, int ell, Tracking track) {
  Var x_rec = reconstruct(tape, batch, gen, track);
  Var real_in = batch;
  Var fake_in = x_rec;
  if (variant == Variant::kEgbad) {
    real_in = concat_sample_encoding(tape, batch, encode(tape, batch, gen, track.encoder));
    fake_in = concat_sample_encoding(tape, x_rec, encode(tape, x_rec, gen, track.encoder));
  }
  if (tape.value(real_in).cols() != disc.input_width()) {
    throw ValidationError("disc_loss: discriminator input width does not match variant " +
                          std::string(variant_name(variant)));
  }
  Var h_real = discriminate(tape, real_in, disc, track.discriminator).hidden;
  Var h_fake = discriminate(tape, fake_in, disc, track.discriminator).hidden;
  return mean_row_norm(tape, h_real, h_fake, ell, batch_rows(tape, batch));
}

Var enc_loss(Tape& tape, Var batch, const GeneratorBundle& gen, int ell, Tracking track) {
  if (!gen.second_encoder) throw ValidationError("enc_loss requires a second encoder");
  Var z = encode(tape, batch, gen, track.encoder);
  Var x_rec = decode(tape, z, gen, track.decoder);
  Var z_rec = encode_second(tape, x_rec, gen, track.second_encoder);
  return mean_row_norm(tape, z, z_rec, ell, batch_rows(tape, batch));
}

Var composite_generator_loss(Tape& tape, Variant variant, Var batch, Var prior,
                             const GeneratorBundle& gen, const DiscriminatorBundle& disc,
                             const LossWeights& weights, Tracking track) {
  weights.validate();
  if (weights.encoding > 0.0 && !gen.second_encoder) {
    throw ValidationError("encoding loss weight set but the generator has no second encoder");
  }
  std::optional<Var> total;
  auto accumulate = [&](double w, auto&& term) {
    if (w == 0.0) return;
    Var t = tape.scale(term(), w);
    total = total ? tape.add(*total, t) : t;
  };
  accumulate(weights.adversarial,
             [&] { return adversarial_loss(tape, variant, batch, prior, gen, disc, track); });
  accumulate(weights.reconstruction, [&] { return recon_loss(tape, batch, gen, weights.ell, track); });
  accumulate(weights.discriminative,
             [&] { return disc_loss(tape, variant, batch, gen, disc, weights.ell, track); });
  accumulate(weights.encoding, [&] { return enc_loss(tape, batch, gen, weights.ell, track); });
  return *total;
}

}  // namespace ganen

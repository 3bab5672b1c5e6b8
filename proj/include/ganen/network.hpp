#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ganen/autodiff.hpp"
#include "ganen/tensor.hpp"

namespace ganen {

enum class Activation { kIdentity, kRelu, kLeakyRelu, kSigmoid, kTanh };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// Base model family. Fixes the adversarial loss, the discriminator input and
/// output activation, and the anomaly score.
enum class Variant {
  kFAnoGan,   // WGAN critic, two-phase training, score L_r + beta L_d
  kEgbad,     // BiGAN joint discriminator over (x, z)
  kGanomaly,  // vanilla GAN, second encoder, score L_e
};

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct MlpSpec {
  /// input, hidden..., output
  std::vector<std::size_t> widths;
  Activation hidden = Activation::kLeakyRelu;
  Activation output = Activation::kIdentity;
  double leaky_slope = 0.2;

  void validate() const;
  std::size_t input_width() const { return widths.front(); }
  std::size_t output_width() const { return widths.back(); }
  std::size_t parameter_count() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct DenseLayer {
  Tensor weight;  // [in x out]
  Tensor bias;    // [out]
};

/// Multilayer perceptron. The forward pass exposes the last hidden layer
/// (post-activation) alongside the output.
class Mlp {
 public:
  struct Forward {
    Var output;
    Var hidden;
  };

  Mlp() = default;
  Mlp(MlpSpec spec, std::vector<DenseLayer> layers);

  /// Glorot-uniform weights, zero biases.
  static Mlp init(const MlpSpec& spec, std::mt19937_64& rng);

  const MlpSpec& spec() const { return spec_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  /// Pointers to every weight and bias tensor, layer by layer.
  std::vector<Tensor*> parameters();
  std::size_t parameter_count() const { return spec_.parameter_count(); }

  /// Records the forward pass of a batch x[n x in]. With `track` false the
  /// parameters enter the tape as constants and receive no gradient, though
  /// gradients still flow through them to x.
  Forward forward(Tape& tape, Var x, bool track) const;

 private:
  MlpSpec spec_;
  std::vector<DenseLayer> layers_;
};

Var apply_activation(Tape& tape, Var x, Activation a, double leaky_slope);

struct GeneratorBundle {
  Mlp encoder;                        // d -> d'
  Mlp decoder;                        // d' -> d
  std::optional<Mlp> second_encoder;  // d -> d', GANomaly only

  std::size_t data_width() const { return encoder.spec().input_width(); }
  std::size_t latent_width() const { return encoder.spec().output_width(); }
  void validate() const;
};

struct DiscriminatorBundle {
  Mlp net;  // input -> hidden... -> 1

  std::size_t input_width() const { return net.spec().input_width(); }
  std::size_t hidden_width() const;
};

/// Which networks of a generator/discriminator pair receive gradients.
struct Tracking {
  bool encoder = false;
  bool decoder = false;
  bool second_encoder = false;
  bool discriminator = false;

  static Tracking none() { return {}; }
  static Tracking all() { return {true, true, true, true}; }
};

struct ArchitectureSpec {
  std::size_t data_width = 2;
  std::size_t latent_width = 16;
  std::vector<std::size_t> generator_hidden{64};
  std::vector<std::size_t> discriminator_hidden{64, 32};
  Activation hidden_activation = Activation::kLeakyRelu;
  Activation decoder_output = Activation::kIdentity;

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

MlpSpec encoder_spec(const ArchitectureSpec& arch);
MlpSpec decoder_spec(const ArchitectureSpec& arch);
MlpSpec discriminator_spec(const ArchitectureSpec& arch, Variant variant);

GeneratorBundle make_generator(const ArchitectureSpec& arch, Variant variant,
                               std::mt19937_64& rng);
DiscriminatorBundle make_discriminator(const ArchitectureSpec& arch, Variant variant,
                                       std::mt19937_64& rng);

// Tape-level building blocks shared by the losses and scoring.
Var encode(Tape& tape, Var x, const GeneratorBundle& gen, bool track);
Var encode_second(Tape& tape, Var x, const GeneratorBundle& gen, bool track);
Var decode(Tape& tape, Var z, const GeneratorBundle& gen, bool track);
Var reconstruct(Tape& tape, Var x, const GeneratorBundle& gen, Tracking track);

struct Discrimination {
  Var u;       // [n x 1] after output activation
  Var hidden;  // [n x m] last hidden layer
};
Discrimination discriminate(Tape& tape, Var input, const DiscriminatorBundle& disc, bool track);
Var concat_sample_encoding(Tape& tape, Var x, Var z);

// Eager conveniences over a private tape; parameters are never modified.
Tensor encode(const Tensor& x, const GeneratorBundle& gen);
Tensor decode(const Tensor& z, const GeneratorBundle& gen);
Tensor reconstruct(const Tensor& x, const GeneratorBundle& gen);
std::pair<Tensor, Tensor> discriminate(const Tensor& input, const DiscriminatorBundle& disc);
Tensor concat_sample_encoding(const Tensor& x, const Tensor& z);

}  // namespace ganen

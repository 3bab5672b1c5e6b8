#include "ganen/network.hpp"

#include <cmath>

#include "ganen/error.hpp"

namespace ganen {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  for (Activation a : {Activation::kIdentity, Activation::kRelu, Activation::kLeakyRelu,
                       Activation::kSigmoid, Activation::kTanh}) {
    if (activation_name(a) == name) return a;
  }
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kFAnoGan: return "f-anogan";
    case Variant::kEgbad: return "egbad";
    case Variant::kGanomaly: return "ganomaly";
  }
  return "f-anogan";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kFAnoGan, Variant::kEgbad, Variant::kGanomaly}) {
    if (variant_name(v) == name) return v;
  }
  throw ValidationError("unknown variant '" + std::string(name) +
                        "' (expected f-anogan, egbad or ganomaly)");
}

void MlpSpec::validate() const {
  if (widths.size() < 3) throw ValidationError("an MLP needs at least one hidden layer");
  for (std::size_t w : widths) {
    if (w == 0) throw ValidationError("MLP layer widths must be positive");
  }
}

std::size_t MlpSpec::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l] * widths[l + 1] + widths[l + 1];
  return n;
}

Mlp::Mlp(MlpSpec spec, std::vector<DenseLayer> layers)
    : spec_(std::move(spec)), layers_(std::move(layers)) {
  spec_.validate();
  if (layers_.size() + 1 != spec_.widths.size()) throw ShapeError("layer count does not match MLP spec");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].weight.shape() != Shape{spec_.widths[l], spec_.widths[l + 1]} ||
        layers_[l].bias.shape() != Shape{spec_.widths[l + 1]}) {
      throw ShapeError("layer " + std::to_string(l) + " shape does not match MLP spec");
    }
  }
}

Mlp Mlp::init(const MlpSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    const std::size_t in = spec.widths[l], out = spec.widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Tensor w(Shape{in, out});
    for (double& v : w.values()) v = dist(rng);
    layers.push_back({std::move(w), Tensor(Shape{out})});
  }
  return Mlp(spec, std::move(layers));
}

std::vector<Tensor*> Mlp::parameters() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

Var apply_activation(Tape& tape, Var x, Activation a, double leaky_slope) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kRelu: return tape.relu(x);
    case Activation::kLeakyRelu: return tape.leaky_relu(x, leaky_slope);
    case Activation::kSigmoid: return tape.sigmoid(x);
    case Activation::kTanh: return tape.tanh(x);
  }
  return x;
}

Mlp::Forward Mlp::forward(Tape& tape, Var x, bool track) const {
  const Tensor& in = tape.value(x);
  if (in.rank() != 2 || in.cols() != spec_.input_width()) {
    throw ShapeError("MLP expects input width " + std::to_string(spec_.input_width()) + ", got " +
                     shape_string(in.shape()));
  }
  Var h = x;
  Var last_hidden = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    Var w = track ? tape.param(layer.weight) : tape.constant(layer.weight);
    Var b = track ? tape.param(layer.bias) : tape.constant(layer.bias);
    h = tape.affine(h, w, b);
    if (l + 1 < layers_.size()) {
      h = apply_activation(tape, h, spec_.hidden, spec_.leaky_slope);
      last_hidden = h;
    } else {
      h = apply_activation(tape, h, spec_.output, spec_.leaky_slope);
    }
  }
  return {h, last_hidden};
}

void GeneratorBundle::validate() const {
  if (encoder.spec().output_width() != decoder.spec().input_width()) {
    throw ShapeError("encoder output width must equal decoder input width");
  }
  if (decoder.spec().output_width() != encoder.spec().input_width()) {
    throw ShapeError("decoder output width must equal encoder input width");
  }
  if (second_encoder && !(second_encoder->spec() == encoder.spec())) {
    throw ShapeError("second encoder must share the encoder's spec");
  }
}

std::size_t DiscriminatorBundle::hidden_width() const {
  const auto& w = net.spec().widths;
  return w[w.size() - 2];
}

namespace {

std::vector<std::size_t> chain(std::size_t in, const std::vector<std::size_t>& hidden,
                               std::size_t out) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

}  // namespace

MlpSpec encoder_spec(const ArchitectureSpec& arch) {
  return {chain(arch.data_width, arch.generator_hidden, arch.latent_width), arch.hidden_activation,
          Activation::kIdentity};
}

MlpSpec decoder_spec(const ArchitectureSpec& arch) {
  std::vector<std::size_t> hidden(arch.generator_hidden.rbegin(), arch.generator_hidden.rend());
  return {chain(arch.latent_width, hidden, arch.data_width), arch.hidden_activation,
          arch.decoder_output};
}

MlpSpec discriminator_spec(const ArchitectureSpec& arch, Variant variant) {
  const std::size_t in =
      variant == Variant::kEgbad ? arch.data_width + arch.latent_width : arch.data_width;
  const Activation out = variant == Variant::kFAnoGan ? Activation::kIdentity : Activation::kSigmoid;
  return {chain(in, arch.discriminator_hidden, 1), arch.hidden_activation, out};
}

GeneratorBundle make_generator(const ArchitectureSpec& arch, Variant variant,
                               std::mt19937_64& rng) {
  GeneratorBundle g;
  g.encoder = Mlp::init(encoder_spec(arch), rng);
  g.decoder = Mlp::init(decoder_spec(arch), rng);
  if (variant == Variant::kGanomaly) g.second_encoder = Mlp::init(encoder_spec(arch), rng);
  g.validate();
  return g;
}

DiscriminatorBundle make_discriminator(const ArchitectureSpec& arch, Variant variant,
                                       std::mt19937_64& rng) {
  return {Mlp::init(discriminator_spec(arch, variant), rng)};
}

Var encode(Tape& tape, Var x, const GeneratorBundle& gen, bool track) {
  return gen.encoder.forward(tape, x, track).output;
}

Var encode_second(Tape& tape, Var x, const GeneratorBundle& gen, bool track) {
  if (!gen.second_encoder) throw ValidationError("generator has no second encoder");
  return gen.second_encoder->forward(tape, x, track).output;
}

Var decode(Tape& tape, Var z, const GeneratorBundle& gen, bool track) {
  return gen.decoder.forward(tape, z, track).output;
}

Var reconstruct(Tape& tape, Var x, const GeneratorBundle& gen, Tracking track) {
  return decode(tape, encode(tape, x, gen, track.encoder), gen, track.decoder);
}

Discrimination discriminate(Tape& tape, Var input, const DiscriminatorBundle& disc, bool track) {
  auto f = disc.net.forward(tape, input, track);
  return {f.output, f.hidden};
}

Var concat_sample_encoding(Tape& tape, Var x, Var z) { return tape.concat_cols(x, z); }

Tensor encode(const Tensor& x, const GeneratorBundle& gen) {
  Tape tape;
  return tape.value(encode(tape, tape.constant(x), gen, false));
}

Tensor decode(const Tensor& z, const GeneratorBundle& gen) {
  Tape tape;
  return tape.value(decode(tape, tape.constant(z), gen, false));
}

Tensor reconstruct(const Tensor& x, const GeneratorBundle& gen) {
  Tape tape;
  return tape.value(reconstruct(tape, tape.constant(x), gen, Tracking::none()));
}

std::pair<Tensor, Tensor> discriminate(const Tensor& input, const DiscriminatorBundle& disc) {
  Tape tape;
  auto d = discriminate(tape, tape.constant(input), disc, false);
  return {tape.value(d.u), tape.value(d.hidden)};
}

Tensor concat_sample_encoding(const Tensor& x, const Tensor& z) {
  Tape tape;
  return tape.value(tape.concat_cols(tape.constant(x), tape.constant(z)));
}

}  // namespace ganen

#include "ganen/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "ganen/error.hpp"

namespace ganen {
namespace {

using nlohmann::json;

json tensor_to_json(const Tensor& t) { return {{"shape", t.shape()}, {"values", t.values()}}; }

Tensor tensor_from_json(const json& j) {
  return Tensor(j.at("shape").get<Shape>(), j.at("values").get<std::vector<double>>());
}

json arch_to_json(const ArchitectureSpec& a) {
  return {{"data_width", a.data_width},
          {"latent_width", a.latent_width},
          {"generator_hidden", a.generator_hidden},
          {"discriminator_hidden", a.discriminator_hidden},
          {"hidden_activation", std::string(activation_name(a.hidden_activation))},
          {"decoder_output", std::string(activation_name(a.decoder_output))}};
}

ArchitectureSpec arch_from_json(const json& j) {
  ArchitectureSpec a;
  a.data_width = j.at("data_width").get<std::size_t>();
  a.latent_width = j.at("latent_width").get<std::size_t>();
  a.generator_hidden = j.at("generator_hidden").get<std::vector<std::size_t>>();
  a.discriminator_hidden = j.at("discriminator_hidden").get<std::vector<std::size_t>>();
  a.hidden_activation = parse_activation(j.at("hidden_activation").get<std::string>());
  a.decoder_output = parse_activation(j.at("decoder_output").get<std::string>());
  return a;
}

json weights_to_json(const LossWeights& w) {
  return {{"adversarial", w.adversarial}, {"reconstruction", w.reconstruction},
          {"discriminative", w.discriminative}, {"encoding", w.encoding},
          {"beta", w.beta}, {"ell", w.ell}};
}

LossWeights weights_from_json(const json& j) {
  LossWeights w;
  w.adversarial = j.at("adversarial").get<double>();
  w.reconstruction = j.at("reconstruction").get<double>();
  w.discriminative = j.at("discriminative").get<double>();
  w.encoding = j.at("encoding").get<double>();
  w.beta = j.at("beta").get<double>();
  w.ell = j.at("ell").get<int>();
  return w;
}

json scaler_to_json(const Scaler& s) {
  return {{"method", std::string(scaler_method_name(s.method))}, {"offset", s.offset}, {"scale", s.scale}};
}

Scaler scaler_from_json(const json& j) {
  Scaler s;
  s.method = parse_scaler_method(j.at("method").get<std::string>());
  s.offset = j.at("offset").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.offset.size() != s.scale.size()) throw FormatError("scaler offset and scale differ in length");
  return s;
}

bool same_tensor(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

bool same_mlp(const Mlp& a, const Mlp& b) {
  if (!(a.spec() == b.spec()) || a.layers().size() != b.layers().size()) return false;
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    if (!same_tensor(a.layers()[l].weight, b.layers()[l].weight)) return false;
    if (!same_tensor(a.layers()[l].bias, b.layers()[l].bias)) return false;
  }
  return true;
}

}  // namespace

json mlp_to_json(const Mlp& mlp) {
  const MlpSpec& s = mlp.spec();
  json layers = json::array();
  for (const DenseLayer& l : mlp.layers()) {
    layers.push_back({{"weight", tensor_to_json(l.weight)}, {"bias", tensor_to_json(l.bias)}});
  }
  return {{"widths", s.widths},
          {"hidden", std::string(activation_name(s.hidden))},
          {"output", std::string(activation_name(s.output))},
          {"leaky_slope", s.leaky_slope},
          {"layers", layers}};
}

Mlp mlp_from_json(const json& j) {
  MlpSpec s;
  s.widths = j.at("widths").get<std::vector<std::size_t>>();
  s.hidden = parse_activation(j.at("hidden").get<std::string>());
  s.output = parse_activation(j.at("output").get<std::string>());
  s.leaky_slope = j.at("leaky_slope").get<double>();
  std::vector<DenseLayer> layers;
  for (const json& l : j.at("layers")) {
    layers.push_back({tensor_from_json(l.at("weight")), tensor_from_json(l.at("bias"))});
  }
  return Mlp(std::move(s), std::move(layers));
}

json checkpoint_to_json(const Checkpoint& ckpt) {
  const EnsembleModel& m = ckpt.model;
  json gens = json::array();
  for (const GeneratorBundle& g : m.generators) {
    gens.push_back({{"encoder", mlp_to_json(g.encoder)},
                    {"decoder", mlp_to_json(g.decoder)},
                    {"second_encoder", g.second_encoder ? mlp_to_json(*g.second_encoder) : json(nullptr)}});
  }
  json discs = json::array();
  for (const DiscriminatorBundle& d : m.discriminators) discs.push_back(mlp_to_json(d.net));
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"variant", std::string(variant_name(m.variant))},
          {"architecture", arch_to_json(m.arch)},
          {"weights", weights_to_json(m.weights)},
          {"prior_dim", m.prior.dim},
          {"seed", ckpt.seed},
          {"scaler", ckpt.scaler ? scaler_to_json(*ckpt.scaler) : json(nullptr)},
          {"generators", gens},
          {"discriminators", discs}};
}

Checkpoint checkpoint_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != kCheckpointFormat) {
    throw FormatError("not a ganen checkpoint (missing or wrong format tag)");
  }
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint c;
  try {
    EnsembleModel& m = c.model;
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.arch = arch_from_json(j.at("architecture"));
    m.weights = weights_from_json(j.at("weights"));
    m.prior.dim = j.at("prior_dim").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("scaler").is_null()) c.scaler = scaler_from_json(j.at("scaler"));
    for (const json& g : j.at("generators")) {
      GeneratorBundle b;
      b.encoder = mlp_from_json(g.at("encoder"));
      b.decoder = mlp_from_json(g.at("decoder"));
      if (!g.at("second_encoder").is_null()) b.second_encoder = mlp_from_json(g.at("second_encoder"));
      m.generators.push_back(std::move(b));
    }
    for (const json& d : j.at("discriminators")) m.discriminators.push_back({mlp_from_json(d)});
    m.validate();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("inconsistent checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("inconsistent checkpoint: ") + e.what());
  }
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  out << checkpoint_to_json(ckpt).dump(1) << '\n';
  if (!out) throw Error("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read checkpoint " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("checkpoint " + path + " is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(j);
}

bool same_model(const EnsembleModel& a, const EnsembleModel& b) {
  if (a.variant != b.variant || !(a.arch == b.arch) || !(a.weights == b.weights) ||
      a.prior.dim != b.prior.dim || a.generators.size() != b.generators.size() ||
      a.discriminators.size() != b.discriminators.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.generators.size(); ++i) {
    const GeneratorBundle& x = a.generators[i];
    const GeneratorBundle& y = b.generators[i];
    if (!same_mlp(x.encoder, y.encoder) || !same_mlp(x.decoder, y.decoder)) return false;
    if (x.second_encoder.has_value() != y.second_encoder.has_value()) return false;
    if (x.second_encoder && !same_mlp(*x.second_encoder, *y.second_encoder)) return false;
  }
  for (std::size_t j = 0; j < a.discriminators.size(); ++j) {
    if (!same_mlp(a.discriminators[j].net, b.discriminators[j].net)) return false;
  }
  return true;
}

}  // namespace ganen

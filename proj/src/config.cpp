#include "ganen/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>

#include "ganen/error.hpp"

namespace ganen {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string name = where.empty() ? key : where + "." + key;
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ValidationError("");
      }
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw ValidationError("");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ValidationError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ValidationError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ValidationError("");
    }
    out = v.get<T>();
  } catch (const std::exception&) {
    throw ValidationError("config key '" + name + "' has the wrong type");
  }
}

template <typename Parse>
void read_enum(const json& j, const char* key, Parse parse, auto& out, const std::string& where) {
  if (!j.contains(key)) return;
  std::string s;
  read(j, key, s, where);
  out = parse(s);
}

void read_widths(const json& j, const char* key, std::vector<std::size_t>& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  bool ok = v.is_array();
  if (ok) {
    for (const json& e : v) ok = ok && e.is_number_integer() && e.get<std::int64_t>() > 0;
  }
  if (!ok) throw ValidationError("config key '" + where + "." + key + "' must be a list of positive integers");
  out = v.get<std::vector<std::size_t>>();
}

void positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be > 0");
}

}  // namespace

std::string_view normalization_name(Normalization n) {
  switch (n) {
    case Normalization::kNone: return "none";
    case Normalization::kMinMax01: return "minmax01";
    case Normalization::kZScore: return "zscore";
  }
  return "none";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "none") return Normalization::kNone;
  if (name == "minmax01") return Normalization::kMinMax01;
  if (name == "zscore") return Normalization::kZScore;
  throw ValidationError("unknown normalization '" + std::string(name) + "' (expected none, minmax01, zscore)");
}

void RunConfig::validate() const {
  if (generators == 0) throw ValidationError("generators must be >= 1");
  if (discriminators == 0) throw ValidationError("discriminators must be >= 1");
  weights.validate();
  if (arch.latent_width == 0) throw ValidationError("network.latent_width must be >= 1");
  if (arch.generator_hidden.empty()) throw ValidationError("network.generator_hidden needs at least one layer");
  if (arch.discriminator_hidden.empty()) throw ValidationError("network.discriminator_hidden needs at least one layer");
  for (std::size_t w : arch.generator_hidden) {
    if (w == 0) throw ValidationError("network.generator_hidden widths must be >= 1");
  }
  for (std::size_t w : arch.discriminator_hidden) {
    if (w == 0) throw ValidationError("network.discriminator_hidden widths must be >= 1");
  }
  trainer.validate();
  if (trainer.max_iter == 0) throw ValidationError("trainer.max_iter must be >= 1");
  positive(trainer.lr_generator, "trainer.lr_generator");
  positive(trainer.lr_discriminator, "trainer.lr_discriminator");
  positive(ensemble_iter_multiplier, "trainer.ensemble_iter_multiplier");
  if (data.synthetic) {
    const SyntheticSpec& s = *data.synthetic;
    if (s.n_normal == 0) throw ValidationError("data.synthetic.n_normal must be >= 1");
    if (s.dim < 2) throw ValidationError("data.synthetic.dim must be >= 2");
    if (!data.path.empty()) throw ValidationError("data takes either synthetic or path, not both");
  } else if (data.path.empty()) {
    throw ValidationError("data needs a synthetic spec or a path");
  }
  if (data.label_column.empty()) throw ValidationError("data.label_column must not be empty");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train_fraction must lie in (0, 1)");
  if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
}

std::size_t RunConfig::effective_max_iter() const {
  if (generators * discriminators == 1) return trainer.max_iter;
  return static_cast<std::size_t>(std::llround(static_cast<double>(trainer.max_iter) * ensemble_iter_multiplier));
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t = trainer;
  t.max_iter = effective_max_iter();
  t.seed = seed;
  return t;
}

RunConfig variant_defaults(Variant variant) {
  RunConfig c;
  c.variant = variant;
  c.weights = default_weights(variant);
  switch (variant) {
    case Variant::kFAnoGan:
      c.arch.latent_width = 16;
      c.trainer.lr_generator = c.trainer.lr_discriminator = 1e-4;
      c.trainer.batch_size = 128;
      break;
    case Variant::kEgbad:
      c.arch.latent_width = 32;
      c.trainer.lr_generator = c.trainer.lr_discriminator = 2e-4;
      c.trainer.batch_size = 1024;
      break;
    case Variant::kGanomaly:
      c.arch.latent_width = 16;
      c.trainer.lr_generator = c.trainer.lr_discriminator = 2e-4;
      c.trainer.batch_size = 64;
      break;
  }
  c.arch.generator_hidden = {64};
  c.arch.discriminator_hidden = {64, c.arch.latent_width};
  return c;
}

void apply_config_json(RunConfig& c, const json& j) {
  check_keys(j, "", {"variant", "generators", "discriminators", "weights", "network", "trainer", "data",
                     "normalization", "train_fraction", "seed", "output_dir"});
  read(j, "generators", c.generators, "");
  read(j, "discriminators", c.discriminators, "");
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    check_keys(w, "weights", {"adversarial", "reconstruction", "discriminative", "encoding", "beta", "ell"});
    read(w, "adversarial", c.weights.adversarial, "weights");
    read(w, "reconstruction", c.weights.reconstruction, "weights");
    read(w, "discriminative", c.weights.discriminative, "weights");
    read(w, "encoding", c.weights.encoding, "weights");
    read(w, "beta", c.weights.beta, "weights");
    read(w, "ell", c.weights.ell, "weights");
  }
  if (j.contains("network")) {
    const json& n = j.at("network");
    check_keys(n, "network",
               {"latent_width", "generator_hidden", "discriminator_hidden", "hidden_activation", "decoder_output"});
    read(n, "latent_width", c.arch.latent_width, "network");
    read_widths(n, "generator_hidden", c.arch.generator_hidden, "network");
    read_widths(n, "discriminator_hidden", c.arch.discriminator_hidden, "network");
    read_enum(n, "hidden_activation", parse_activation, c.arch.hidden_activation, "network");
    read_enum(n, "decoder_output", parse_activation, c.arch.decoder_output, "network");
  }
  if (j.contains("trainer")) {
    const json& t = j.at("trainer");
    check_keys(t, "trainer",
               {"max_iter", "batch_size", "lr_generator", "lr_discriminator", "adam_beta1", "adam_beta2",
                "adam_epsilon", "clip", "n_critic", "phase_split", "stop_on_plateau", "plateau_window",
                "plateau_tolerance", "ensemble_iter_multiplier"});
    read(t, "max_iter", c.trainer.max_iter, "trainer");
    read(t, "batch_size", c.trainer.batch_size, "trainer");
    read(t, "lr_generator", c.trainer.lr_generator, "trainer");
    read(t, "lr_discriminator", c.trainer.lr_discriminator, "trainer");
    read(t, "adam_beta1", c.trainer.adam_beta1, "trainer");
    read(t, "adam_beta2", c.trainer.adam_beta2, "trainer");
    read(t, "adam_epsilon", c.trainer.adam_epsilon, "trainer");
    read(t, "clip", c.trainer.clip, "trainer");
    read(t, "n_critic", c.trainer.n_critic, "trainer");
    read(t, "phase_split", c.trainer.phase_split, "trainer");
    read(t, "stop_on_plateau", c.trainer.stop_on_plateau, "trainer");
    read(t, "plateau_window", c.trainer.plateau_window, "trainer");
    read(t, "plateau_tolerance", c.trainer.plateau_tolerance, "trainer");
    read(t, "ensemble_iter_multiplier", c.ensemble_iter_multiplier, "trainer");
  }
  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, "data", {"synthetic", "path", "label_column", "delimiter"});
    if (d.contains("path")) {
      read(d, "path", c.data.path, "data");
      if (!d.contains("synthetic")) c.data.synthetic.reset();
    }
    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      if (s.is_null()) {
        c.data.synthetic.reset();
      } else {
        check_keys(s, "data.synthetic", {"kind", "n_normal", "n_anomaly", "dim", "seed"});
        if (!c.data.synthetic) c.data.synthetic = SyntheticSpec{};
        if (!d.contains("path")) c.data.path.clear();
        read_enum(s, "kind", parse_synthetic_kind, c.data.synthetic->kind, "data.synthetic");
        read(s, "n_normal", c.data.synthetic->n_normal, "data.synthetic");
        read(s, "n_anomaly", c.data.synthetic->n_anomaly, "data.synthetic");
        read(s, "dim", c.data.synthetic->dim, "data.synthetic");
        read(s, "seed", c.data.synthetic->seed, "data.synthetic");
      }
    }
    if (d.contains("label_column")) {
      const json& l = d.at("label_column");
      if (l.is_number_integer()) {
        if (!l.is_number_unsigned() && l.get<std::int64_t>() < 0) {
          throw ValidationError("config key 'data.label_column' must be a name or a non-negative index");
        }
        c.data.label_column = std::to_string(l.get<std::size_t>());
      } else {
        read(d, "label_column", c.data.label_column, "data");
      }
    }
    if (d.contains("delimiter")) {
      std::string s;
      read(d, "delimiter", s, "data");
      if (s.size() != 1) throw ValidationError("data.delimiter must be a single character");
      c.data.delimiter = s[0];
    }
  }
  read_enum(j, "normalization", parse_normalization, c.normalization, "");
  read(j, "train_fraction", c.train_fraction, "");
  read(j, "seed", c.seed, "");
  read(j, "output_dir", c.output_dir, "");
}

namespace {

std::optional<Variant> variant_of(const json& j) {
  if (!j.is_object() || !j.contains("variant")) return std::nullopt;
  if (!j.at("variant").is_string()) throw ValidationError("config key 'variant' has the wrong type");
  return parse_variant(j.at("variant").get<std::string>());
}

}  // namespace

RunConfig resolve_config(const json& file, const json& flags) {
  Variant v = Variant::kFAnoGan;
  if (auto f = variant_of(file)) v = *f;
  if (auto f = variant_of(flags)) v = *f;
  RunConfig c = variant_defaults(v);
  if (!file.is_null()) apply_config_json(c, file);
  if (!flags.is_null()) apply_config_json(c, flags);
  c.trainer.seed = c.seed;
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json data;
  if (c.data.synthetic) {
    const SyntheticSpec& s = *c.data.synthetic;
    data["synthetic"] = {{"kind", std::string(synthetic_kind_name(s.kind))},
                         {"n_normal", s.n_normal},
                         {"n_anomaly", s.n_anomaly},
                         {"dim", s.dim},
                         {"seed", s.seed}};
  } else {
    data["path"] = c.data.path;
  }
  data["label_column"] = c.data.label_column;
  data["delimiter"] = std::string(1, c.data.delimiter);
  const TrainConfig& t = c.trainer;
  return {{"variant", std::string(variant_name(c.variant))},
          {"generators", c.generators},
          {"discriminators", c.discriminators},
          {"weights",
           {{"adversarial", c.weights.adversarial},
            {"reconstruction", c.weights.reconstruction},
            {"discriminative", c.weights.discriminative},
            {"encoding", c.weights.encoding},
            {"beta", c.weights.beta},
            {"ell", c.weights.ell}}},
          {"network",
           {{"latent_width", c.arch.latent_width},
            {"generator_hidden", c.arch.generator_hidden},
            {"discriminator_hidden", c.arch.discriminator_hidden},
            {"hidden_activation", std::string(activation_name(c.arch.hidden_activation))},
            {"decoder_output", std::string(activation_name(c.arch.decoder_output))}}},
          {"trainer",
           {{"max_iter", t.max_iter},
            {"batch_size", t.batch_size},
            {"lr_generator", t.lr_generator},
            {"lr_discriminator", t.lr_discriminator},
            {"adam_beta1", t.adam_beta1},
            {"adam_beta2", t.adam_beta2},
            {"adam_epsilon", t.adam_epsilon},
            {"clip", t.clip},
            {"n_critic", t.n_critic},
            {"phase_split", t.phase_split},
            {"stop_on_plateau", t.stop_on_plateau},
            {"plateau_window", t.plateau_window},
            {"plateau_tolerance", t.plateau_tolerance},
            {"ensemble_iter_multiplier", c.ensemble_iter_multiplier}}},
          {"data", data},
          {"normalization", std::string(normalization_name(c.normalization))},
          {"train_fraction", c.train_fraction},
          {"seed", c.seed},
          {"output_dir", c.output_dir}};
}

RunConfig config_from_json(const json& j) { return resolve_config(j, json()); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + " is not valid JSON: " + e.what());
  }
}

void set_dotted(json& j, const std::string& key, const std::string& value) {
  if (key.empty()) throw ValidationError("empty config key");
  json v;
  try {
    v = json::parse(value);
  } catch (const json::exception&) {
    v = value;
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ValidationError("malformed config key '" + key + "'");
    if (!node->is_null() && !node->is_object()) throw ValidationError("config key '" + key + "' descends into a value");
    if (dot == std::string::npos) {
      (*node)[part] = v;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace ganen

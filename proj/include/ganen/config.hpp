#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ganen/data.hpp"
#include "ganen/losses.hpp"
#include "ganen/network.hpp"
#include "ganen/trainer.hpp"

namespace ganen {

/// Either a synthetic generator or a delimited file.
struct DataSource {
  std::optional<SyntheticSpec> synthetic = SyntheticSpec{};
  std::string path;
  std::string label_column = "label";
  char delimiter = ',';

  friend bool operator==(const DataSource&, const DataSource&) = default;
};

enum class Normalization { kNone, kMinMax01, kZScore };
std::string_view normalization_name(Normalization n);
Normalization parse_normalization(std::string_view name);

struct RunConfig {
  Variant variant = Variant::kFAnoGan;
  std::size_t generators = 3;
  std::size_t discriminators = 3;
  LossWeights weights;
  /// data_width is taken from the data at train time.
  ArchitectureSpec arch;
  /// max_iter is the base-model budget; its seed field mirrors `seed`.
  TrainConfig trainer;
  /// Ensembles (I * J > 1) train for max_iter * ensemble_iter_multiplier iterations.
  double ensemble_iter_multiplier = 3.0;
  DataSource data;
  Normalization normalization = Normalization::kMinMax01;
  /// Fraction of the normal rows used for training.
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  std::string output_dir = "run";

  /// Throws ValidationError naming the first offending field.
  void validate() const;
  /// Iterations the trainer actually runs.
  std::size_t effective_max_iter() const;
  /// Trainer settings with the effective budget and run seed applied.
  TrainConfig train_config() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Per-variant defaults for tabular data.
RunConfig variant_defaults(Variant variant);

/// Overlays the keys of `j` on `config`. Unknown keys and ill-typed values
/// throw ValidationError. A "variant" key is ignored here; it selects the
/// defaults in resolve_config.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

/// Layers variant defaults, then `file`, then `flags`. The variant is taken
/// from the highest layer that names one. The result is validated.
RunConfig resolve_config(const nlohmann::json& file, const nlohmann::json& flags);

nlohmann::json config_to_json(const RunConfig& config);
/// Inverse of config_to_json; a partial object is completed from the variant
/// defaults.
RunConfig config_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);

/// Sets a dotted key such as "trainer.max_iter" in `j`. The value is parsed as
/// JSON when possible, otherwise kept as a string.
void set_dotted(nlohmann::json& j, const std::string& key, const std::string& value);

}  // namespace ganen

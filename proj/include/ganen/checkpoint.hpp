#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "ganen/data.hpp"
#include "ganen/trainer.hpp"

namespace ganen {

inline constexpr const char* kCheckpointFormat = "ganen-checkpoint";
inline constexpr int kCheckpointVersion = 1;

/// A trained ensemble with the feature scaling it was trained under.
struct Checkpoint {
  EnsembleModel model;
  std::optional<Scaler> scaler;
  std::uint64_t seed = 0;
};

nlohmann::json mlp_to_json(const Mlp& mlp);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
/// Throws FormatError on a wrong format tag, an unsupported version, or any
/// malformed field.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Bitwise comparison of every parameter and every descriptive field.
bool same_model(const EnsembleModel& a, const EnsembleModel& b);

}  // namespace ganen

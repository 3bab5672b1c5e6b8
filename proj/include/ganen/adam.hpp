#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ganen/tensor.hpp"

namespace ganen {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam optimizer state for a fixed list of parameter tensors.
struct AdamState {
  AdamOptions options;
  std::size_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamOptions options) { state_.options = options; }

  /// One bias-corrected Adam step using `p->grad()` of each parameter.
  /// The parameter list must be the same (same order, same shapes) on every
  /// call. Throws DivergenceError if any gradient entry is non-finite.
  void step(std::span<Tensor* const> params);

  const AdamState& state() const { return state_; }
  AdamState& state() { return state_; }

 private:
  AdamState state_;
};

}  // namespace ganen

#pragma once

#include <random>

#include "ganen/network.hpp"
#include "ganen/trainer.hpp"

namespace fixture {

inline ganen::ArchitectureSpec small_arch(std::size_t d = 3, std::size_t latent = 2) {
  ganen::ArchitectureSpec a;
  a.data_width = d;
  a.latent_width = latent;
  a.generator_hidden = {5};
  a.discriminator_hidden = {6, 4};
  return a;
}

inline ganen::Tensor random_batch(std::size_t n, std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  ganen::Tensor t(ganen::Shape{n, d});
  for (double& v : t.values()) v = g(rng);
  return t;
}

/// Rescales every parameter so that the sigmoid discriminators are not
/// saturated and gradients are visible.
inline void jitter(ganen::Mlp& net, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  for (ganen::Tensor* p : net.parameters())
    for (double& v : p->values()) v = g(rng);
}

}  // namespace fixture

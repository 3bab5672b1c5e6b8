#include "ganen/adam.hpp"

#include <cmath>
#include <string>

#include "ganen/error.hpp"

namespace ganen {

void Adam::step(std::span<Tensor* const> params) {
  auto& st = state_;
  if (st.first_moment.empty()) {
    for (Tensor* p : params) {
      st.first_moment.emplace_back(p->size(), 0.0);
      st.second_moment.emplace_back(p->size(), 0.0);
    }
  }
  if (st.first_moment.size() != params.size()) {
    throw ShapeError("Adam parameter list changed between steps");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k]->size() != st.first_moment[k].size()) {
      throw ShapeError("Adam accumulator shape mismatch for parameter " + std::to_string(k));
    }
    const auto& g = params[k]->grad();
    for (std::size_t e = 0; e < g.size(); ++e) {
      if (!std::isfinite(g[e])) {
        throw DivergenceError("non-finite gradient in parameter " + std::to_string(k) +
                              " entry " + std::to_string(e) + " at Adam step " +
                              std::to_string(st.step + 1));
      }
    }
  }

  ++st.step;
  const auto& o = st.options;
  const double t = static_cast<double>(st.step);
  const double bias1 = 1.0 - std::pow(o.beta1, t);
  const double bias2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& values = params[k]->values();
    const auto& g = params[k]->grad();
    auto& m = st.first_moment[k];
    auto& v = st.second_moment[k];
    for (std::size_t e = 0; e < values.size(); ++e) {
      m[e] = o.beta1 * m[e] + (1.0 - o.beta1) * g[e];
      v[e] = o.beta2 * v[e] + (1.0 - o.beta2) * g[e] * g[e];
      const double m_hat = m[e] / bias1;
      const double v_hat = v[e] / bias2;
      values[e] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

}  // namespace ganen

#pragma once

#include <functional>

#include "ganen/tensor.hpp"

namespace ganen {

/// Central-difference gradient (f(x + h e_i) - f(x - h e_i)) / 2h for every
/// coordinate of x. Throws DivergenceError if f returns a non-finite value.
Tensor finite_difference_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                              double h = 1e-5);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps entries that
/// are both near zero from dominating.
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                          double floor = 1e-6);

}  // namespace ganen

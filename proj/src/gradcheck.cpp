#include "ganen/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ganen/error.hpp"

namespace ganen {

Tensor finite_difference_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                              double h) {
  if (!(h > 0.0)) throw ValidationError("finite difference step must be positive");
  Tensor probe = x;
  probe.drop_grad();
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw DivergenceError("non-finite function value during finite differencing");
    }
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                          double floor) {
  if (a.size() != b.size()) throw ShapeError("gradient length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::fabs(a[i]), std::fabs(b[i]), floor});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace ganen

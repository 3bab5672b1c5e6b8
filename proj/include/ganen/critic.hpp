#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ganen::critic {

enum class Norm { kL1, kL2 };

std::string_view norm_name(Norm n);
Norm parse_norm(std::string_view name);

using Point = std::vector<double>;

double distance(const Point& a, const Point& b, Norm norm);

/// Training points with critic values, and a weighted discretization of the
/// generator support.
struct CriticInstance {
  std::vector<Point> train;
  std::vector<double> values;
  std::vector<Point> support;
  std::vector<double> weights;
  Norm norm = Norm::kL2;

  /// Throws ValidationError on shape problems, bad weights, or values that
  /// violate 1-Lipschitzness on the training points by more than `tol`.
  void validate(double tol = 1e-12) const;
  std::size_t dim() const { return train.front().size(); }
};

/// max_i (values_i - ||x - train_i||)
double closed_form_critic(const Point& x, const std::vector<Point>& train,
                          const std::vector<double>& values, Norm norm);

/// A critic known only on a finite point set.
struct CriticFunction {
  std::vector<Point> points;
  std::vector<double> values;
};

/// mean over training points minus the support expectation. Training values
/// are the first `instance.train.size()` entries, support values the rest.
double critic_objective(const CriticInstance& instance, const CriticFunction& f);

struct OracleSolution {
  /// Points ordered training first, then support.
  CriticFunction function;
  double objective = 0.0;
  /// Objective of the LP dual (a transport cost); equals `objective` at optimum.
  double dual_objective = 0.0;
  std::size_t pivots = 0;
};

/// Largest number of points (training + support) the dense LP accepts.
inline constexpr std::size_t kMaxOraclePoints = 200;

/// Maximizes the discretized critic objective over all functions on
/// train + support that are 1-Lipschitz on every pair, by exact linear
/// programming. The additive gauge is fixed by mean over training values = 0.
/// Does not use the instance's `values`.
OracleSolution oracle_optimal_critic(const CriticInstance& instance);

struct LipschitzCheck {
  bool pass = true;
  /// max over pairs of |f(a) - f(b)| - ||a - b||
  double worst_excess = 0.0;
  std::size_t first = 0;
  std::size_t second = 0;
};

LipschitzCheck verify_lipschitz(const CriticFunction& f, Norm norm, double tol);

/// Support values of the 1-Lipschitz extension of (train, values) that
/// maximizes sum_s direction_s * g(s), solved by LP.
std::vector<double> lipschitz_extension(const CriticInstance& instance,
                                        const std::vector<double>& direction);

struct TheoremReport {
  bool pass = false;
  double tolerance = 0.0;
  double max_abs_difference = 0.0;
  std::size_t worst_support_index = 0;
  LipschitzCheck oracle_lipschitz;
  double oracle_objective = 0.0;
  double oracle_dual_objective = 0.0;
  std::vector<double> oracle_train_values;
  std::vector<double> oracle_support_values;
  std::vector<double> closed_form_support_values;
};

/// Solves the instance with the oracle, rebuilds the closed form from the
/// oracle's own training values, and compares on every support point.
/// Passes iff the difference stays below `tol` and the oracle solution is
/// 1-Lipschitz within `lipschitz_tol`.
TheoremReport check_theorem(const CriticInstance& instance, double tol, double lipschitz_tol = 1e-6);

struct RandomInstanceSpec {
  std::size_t max_train = 8;
  std::size_t max_support = 25;
  std::size_t dim = 2;
  Norm norm = Norm::kL2;
};

/// Points uniform in [-1, 1]^dim, strictly positive normalized weights,
/// training values sampled from a 1/2-Lipschitz cone function.
CriticInstance random_instance(const RandomInstanceSpec& spec, std::uint64_t seed);

CriticInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const CriticInstance& instance);
nlohmann::json report_to_json(const TheoremReport& report);

/// Rows `x0[,x1],closed_form` on a regular grid around the instance (1-D: 201
/// points, 2-D: 41 x 41).
void write_plot_rows(std::ostream& out, const CriticInstance& instance,
                     const std::vector<double>& train_values);

}  // namespace ganen::critic

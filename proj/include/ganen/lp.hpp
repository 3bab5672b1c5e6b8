#pragma once

#include <cstddef>
#include <vector>

namespace ganen::lp {

/// Dense row-major matrix used by the simplex solver.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct StandardFormSolution {
  std::vector<double> x;     // primal, x >= 0
  std::vector<double> duals; // one per equality row
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// minimize cost^T x  subject to  A x = b, x >= 0.
///
/// Two-phase tableau simplex with Bland's rule. `duals` solves the dual
/// max b^T pi s.t. A^T pi <= cost. Throws Error when the problem is
/// infeasible, unbounded, or exceeds `max_pivots`.
StandardFormSolution solve_standard_form(const Matrix& a, const std::vector<double>& b,
                                         const std::vector<double>& cost,
                                         std::size_t max_pivots = 200000);

struct InequalitySolution {
  std::vector<double> y;
  double objective = 0.0;       // c^T y
  double dual_objective = 0.0;  // h^T lambda, equal at optimum
  std::size_t pivots = 0;
};

/// maximize c^T y  subject to  G y <= h, y free; solved through its dual
/// min h^T lambda s.t. G^T lambda = c, lambda >= 0.
InequalitySolution maximize(const std::vector<double>& c, const Matrix& g, const std::vector<double>& h);

}  // namespace ganen::lp

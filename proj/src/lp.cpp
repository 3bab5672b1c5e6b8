#include "ganen/lp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ganen/error.hpp"

namespace ganen::lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

class Tableau {
 public:
  // Columns: [structural (n) | artificial (m) | rhs]
  Tableau(const Matrix& a, const std::vector<double>& b)
      : m_(a.rows), n_(a.cols), t_(a.rows, a.cols + a.rows + 1), sign_(a.rows, 1.0), basis_(a.rows) {
    for (std::size_t r = 0; r < m_; ++r) {
      sign_[r] = b[r] < 0.0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < n_; ++c) t_(r, c) = sign_[r] * a(r, c);
      t_(r, n_ + r) = 1.0;
      t_(r, rhs()) = sign_[r] * b[r];
      basis_[r] = n_ + r;
    }
  }

  std::size_t rhs() const { return n_ + m_; }

  // Reduced costs and objective for a cost vector over all columns.
  std::vector<double> reduced_costs(const std::vector<double>& cost) const {
    std::vector<double> z(cost);
    z.push_back(0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= rhs(); ++c) z[c] -= cb * t_(r, c);
    }
    return z;  // z[rhs()] = -objective
  }

  // Runs Bland's rule on reduced costs z; columns >= limit never enter.
  void optimize(std::vector<double>& z, std::size_t limit, std::size_t max_pivots) {
    for (;;) {
      std::size_t enter = limit;
      for (std::size_t c = 0; c < limit; ++c) {
        if (z[c] < -kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter == limit) return;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double coef = t_(r, enter);
        if (coef > kPivotTol) {
          const double ratio = t_(r, rhs()) / coef;
          if (ratio < best - 1e-15 ||
              (leave != m_ && std::fabs(ratio - best) <= 1e-15 && basis_[r] < basis_[leave])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave == m_) throw Error("linear program is unbounded");
      pivot(leave, enter, z);
      if (++pivots_ > max_pivots) throw Error("simplex pivot budget exceeded");
    }
  }

  void pivot(std::size_t row, std::size_t col, std::vector<double>& z) {
    const double p = t_(row, col);
    for (std::size_t c = 0; c <= rhs(); ++c) t_(row, c) /= p;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= rhs(); ++c) t_(r, c) -= f * t_(row, c);
    }
    const double f = z[col];
    if (f != 0.0) {
      for (std::size_t c = 0; c <= rhs(); ++c) z[c] -= f * t_(row, c);
    }
    basis_[row] = col;
  }

  // Moves zero-level artificials out of the basis where a structural column allows it.
  void purge_artificials(std::vector<double>& z) {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      for (std::size_t c = 0; c < n_; ++c) {
        if (std::fabs(t_(r, c)) > 1e-9) {
          pivot(r, c, z);
          break;
        }
      }
    }
  }

  std::size_t m_, n_;
  Matrix t_;
  std::vector<double> sign_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

StandardFormSolution solve_standard_form(const Matrix& a, const std::vector<double>& b,
                                         const std::vector<double>& cost, std::size_t max_pivots) {
  if (b.size() != a.rows || cost.size() != a.cols) throw ShapeError("LP dimensions disagree");
  Tableau tab(a, b);
  const std::size_t n = a.cols, m = a.rows;

  std::vector<double> phase1_cost(n + m, 0.0);
  for (std::size_t k = 0; k < m; ++k) phase1_cost[n + k] = 1.0;
  std::vector<double> z = tab.reduced_costs(phase1_cost);
  tab.optimize(z, n + m, max_pivots);
  if (-z[tab.rhs()] > kFeasTol * std::max(1.0, static_cast<double>(m))) {
    throw Error("linear program is infeasible");
  }
  tab.purge_artificials(z);

  std::vector<double> phase2_cost(cost);
  phase2_cost.resize(n + m, 0.0);
  z = tab.reduced_costs(phase2_cost);
  tab.optimize(z, n, max_pivots);

  StandardFormSolution sol;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis_[r] < n) sol.x[tab.basis_[r]] = tab.t_(r, tab.rhs());
  }
  sol.duals.resize(m);
  for (std::size_t k = 0; k < m; ++k) sol.duals[k] = -tab.sign_[k] * z[n + k];
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.objective += cost[c] * sol.x[c];
  sol.pivots = tab.pivots_;
  return sol;
}

InequalitySolution maximize(const std::vector<double>& c, const Matrix& g, const std::vector<double>& h) {
  if (g.cols != c.size() || g.rows != h.size()) throw ShapeError("LP dimensions disagree");
  Matrix a(g.cols, g.rows);
  for (std::size_t r = 0; r < g.rows; ++r)
    for (std::size_t k = 0; k < g.cols; ++k) a(k, r) = g(r, k);
  StandardFormSolution dual = solve_standard_form(a, c, h);
  InequalitySolution sol;
  sol.y = dual.duals;
  sol.dual_objective = dual.objective;
  for (std::size_t k = 0; k < c.size(); ++k) sol.objective += c[k] * sol.y[k];
  sol.pivots = dual.pivots;
  return sol;
}

}  // namespace ganen::lp

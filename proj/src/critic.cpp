#include "ganen/critic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "ganen/error.hpp"
#include "ganen/lp.hpp"

namespace ganen::critic {

std::string_view norm_name(Norm n) { return n == Norm::kL1 ? "L1" : "L2"; }

Norm parse_norm(std::string_view name) {
  if (name == "L1" || name == "l1") return Norm::kL1;
  if (name == "L2" || name == "l2") return Norm::kL2;
  throw ValidationError("unknown norm '" + std::string(name) + "' (expected L1 or L2)");
}

double distance(const Point& a, const Point& b, Norm norm) {
  if (a.size() != b.size()) throw ShapeError("points differ in dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += norm == Norm::kL1 ? std::fabs(d) : d * d;
  }
  return norm == Norm::kL1 ? s : std::sqrt(s);
}

void CriticInstance::validate(double tol) const {
  if (train.empty()) throw ValidationError("instance needs at least one training point");
  if (support.empty()) throw ValidationError("instance needs at least one support point");
  if (values.size() != train.size()) throw ValidationError("one value per training point is required");
  if (weights.size() != support.size()) throw ValidationError("one weight per support point is required");
  const std::size_t d = train.front().size();
  if (d == 0) throw ValidationError("points must have at least one coordinate");
  for (const auto* set : {&train, &support}) {
    for (const auto& p : *set) {
      if (p.size() != d) throw ValidationError("all points must share one dimension");
      for (double c : p) {
        if (!std::isfinite(c)) throw ValidationError("point coordinates must be finite");
      }
    }
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("support weights must be >= 0");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("support weights must sum to 1");
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!std::isfinite(values[i])) throw ValidationError("training values must be finite");
    for (std::size_t j = i + 1; j < train.size(); ++j) {
      if (std::fabs(values[i] - values[j]) > distance(train[i], train[j], norm) + tol) {
        throw ValidationError("training values violate 1-Lipschitzness between points " +
                              std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
}

double closed_form_critic(const Point& x, const std::vector<Point>& train,
                          const std::vector<double>& values, Norm norm) {
  if (train.empty()) throw ValidationError("closed form needs at least one training point");
  if (values.size() != train.size()) throw ShapeError("one value per training point is required");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < train.size(); ++i) best = std::max(best, values[i] - distance(x, train[i], norm));
  return best;
}

double critic_objective(const CriticInstance& instance, const CriticFunction& f) {
  const std::size_t n = instance.train.size(), m = instance.support.size();
  if (f.values.size() != n + m) throw ShapeError("critic function must cover train and support points");
  double real = 0.0, fake = 0.0;
  for (std::size_t i = 0; i < n; ++i) real += f.values[i];
  for (std::size_t s = 0; s < m; ++s) fake += instance.weights[s] * f.values[n + s];
  return real / static_cast<double>(n) - fake;
}

OracleSolution oracle_optimal_critic(const CriticInstance& instance) {
  instance.validate(std::numeric_limits<double>::infinity());
  const std::size_t n = instance.train.size(), m = instance.support.size();
  const std::size_t total = n + m;
  if (total > kMaxOraclePoints) {
    throw ValidationError("oracle accepts at most " + std::to_string(kMaxOraclePoints) + " points");
  }
  std::vector<Point> points(instance.train);
  points.insert(points.end(), instance.support.begin(), instance.support.end());

  std::vector<double> c(total);
  for (std::size_t i = 0; i < n; ++i) c[i] = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < m; ++s) c[n + s] = -instance.weights[s];

  // D_a - D_b <= ||a - b|| for every ordered pair, plus mean_train D = 0 as
  // two opposite inequalities.
  const std::size_t pairs = total * (total - 1);
  lp::Matrix g(pairs + 2, total);
  std::vector<double> h(pairs + 2, 0.0);
  std::size_t row = 0;
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = 0; b < total; ++b) {
      if (a == b) continue;
      g(row, a) = 1.0;
      g(row, b) = -1.0;
      h[row] = distance(points[a], points[b], instance.norm);
      ++row;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    g(row, i) = 1.0;
    g(row + 1, i) = -1.0;
  }

  const lp::InequalitySolution sol = lp::maximize(c, g, h);
  OracleSolution out;
  out.function.points = std::move(points);
  out.function.values = sol.y;
  out.objective = sol.objective;
  out.dual_objective = sol.dual_objective;
  out.pivots = sol.pivots;
  return out;
}

LipschitzCheck verify_lipschitz(const CriticFunction& f, Norm norm, double tol) {
  if (f.points.size() != f.values.size()) throw ShapeError("one value per point is required");
  LipschitzCheck check;
  check.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < f.points.size(); ++a) {
    for (std::size_t b = a + 1; b < f.points.size(); ++b) {
      const double excess = std::fabs(f.values[a] - f.values[b]) - distance(f.points[a], f.points[b], norm);
      if (excess > check.worst_excess) {
        check.worst_excess = excess;
        check.first = a;
        check.second = b;
      }
    }
  }
  if (f.points.size() < 2) check.worst_excess = 0.0;
  check.pass = check.worst_excess <= tol;
  return check;
}

std::vector<double> lipschitz_extension(const CriticInstance& instance,
                                        const std::vector<double>& direction) {
  instance.validate(1e-9);
  const std::size_t n = instance.train.size(), m = instance.support.size();
  if (direction.size() != m) throw ShapeError("one direction entry per support point is required");
  const std::size_t rows = 2 * m * n + m * (m - 1);
  lp::Matrix g(rows, m);
  std::vector<double> h(rows);
  std::size_t r = 0;
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = distance(instance.support[s], instance.train[i], instance.norm);
      g(r, s) = 1.0;
      h[r++] = d + instance.values[i];
      g(r, s) = -1.0;
      h[r++] = d - instance.values[i];
    }
    for (std::size_t t = 0; t < m; ++t) {
      if (t == s) continue;
      g(r, s) = 1.0;
      g(r, t) = -1.0;
      h[r++] = distance(instance.support[s], instance.support[t], instance.norm);
    }
  }
  return lp::maximize(direction, g, h).y;
}

TheoremReport check_theorem(const CriticInstance& instance, double tol, double lipschitz_tol) {
  instance.validate();
  const OracleSolution oracle = oracle_optimal_critic(instance);
  const std::size_t n = instance.train.size(), m = instance.support.size();
  TheoremReport report;
  report.tolerance = tol;
  report.oracle_objective = oracle.objective;
  report.oracle_dual_objective = oracle.dual_objective;
  report.oracle_train_values.assign(oracle.function.values.begin(),
                                    oracle.function.values.begin() + static_cast<std::ptrdiff_t>(n));
  report.oracle_support_values.assign(oracle.function.values.begin() + static_cast<std::ptrdiff_t>(n),
                                      oracle.function.values.end());
  for (std::size_t s = 0; s < m; ++s) {
    const double cf = closed_form_critic(instance.support[s], instance.train, report.oracle_train_values,
                                         instance.norm);
    report.closed_form_support_values.push_back(cf);
    const double diff = std::fabs(cf - report.oracle_support_values[s]);
    if (diff > report.max_abs_difference) {
      report.max_abs_difference = diff;
      report.worst_support_index = s;
    }
  }
  report.oracle_lipschitz = verify_lipschitz(oracle.function, instance.norm, lipschitz_tol);
  report.pass = report.max_abs_difference <= tol && report.oracle_lipschitz.pass;
  return report;
}

CriticInstance random_instance(const RandomInstanceSpec& spec, std::uint64_t seed) {
  if (spec.max_train == 0 || spec.max_support == 0 || spec.dim == 0) {
    throw ValidationError("random instance sizes must be positive");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 3u};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> n_train(1, spec.max_train);
  std::uniform_int_distribution<std::size_t> n_support(1, spec.max_support);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.05, 1.0);

  auto point = [&] {
    Point p(spec.dim);
    for (double& c : p) c = coord(rng);
    return p;
  };
  CriticInstance inst;
  inst.norm = spec.norm;
  const std::size_t n = n_train(rng), m = n_support(rng);
  const Point apex = point();
  for (std::size_t i = 0; i < n; ++i) {
    inst.train.push_back(point());
    inst.values.push_back(-0.5 * distance(inst.train.back(), apex, spec.norm));
  }
  double total = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    inst.support.push_back(point());
    inst.weights.push_back(weight(rng));
    total += inst.weights.back();
  }
  for (double& w : inst.weights) w /= total;
  return inst;
}

namespace {

std::vector<Point> points_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw FormatError(std::string("instance field '") + key + "' must be an array");
  }
  std::vector<Point> out;
  for (const auto& p : j.at(key)) {
    if (p.is_number()) {
      out.push_back({p.get<double>()});
    } else if (p.is_array()) {
      out.push_back(p.get<Point>());
    } else {
      throw FormatError(std::string("instance field '") + key + "' holds a non-point entry");
    }
  }
  return out;
}

}  // namespace

CriticInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("critic instance must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "norm" && key != "train" && key != "values" && key != "support" && key != "weights") {
      throw FormatError("unknown instance field '" + key + "'");
    }
  }
  CriticInstance inst;
  try {
    inst.norm = parse_norm(j.value("norm", std::string("L2")));
    inst.train = points_from_json(j, "train");
    inst.support = points_from_json(j, "support");
    inst.values = j.at("values").get<std::vector<double>>();
    inst.weights = j.at("weights").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed critic instance: ") + e.what());
  }
  return inst;
}

nlohmann::json instance_to_json(const CriticInstance& inst) {
  return {{"norm", std::string(norm_name(inst.norm))},
          {"train", inst.train},
          {"values", inst.values},
          {"support", inst.support},
          {"weights", inst.weights}};
}

nlohmann::json report_to_json(const TheoremReport& r) {
  return {{"pass", r.pass},
          {"tolerance", r.tolerance},
          {"max_abs_difference", r.max_abs_difference},
          {"worst_support_index", r.worst_support_index},
          {"oracle_lipschitz",
           {{"pass", r.oracle_lipschitz.pass},
            {"worst_excess", r.oracle_lipschitz.worst_excess},
            {"pair", {r.oracle_lipschitz.first, r.oracle_lipschitz.second}}}},
          {"oracle_objective", r.oracle_objective},
          {"oracle_dual_objective", r.oracle_dual_objective},
          {"oracle_train_values", r.oracle_train_values},
          {"oracle_support_values", r.oracle_support_values},
          {"closed_form_support_values", r.closed_form_support_values}};
}

void write_plot_rows(std::ostream& out, const CriticInstance& inst, const std::vector<double>& train_values) {
  const std::size_t d = inst.dim();
  if (d > 2) throw ValidationError("plot rows are only defined for 1-D and 2-D instances");
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const auto* set : {&inst.train, &inst.support}) {
    for (const auto& p : *set) {
      for (std::size_t k = 0; k < d; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double pad = 0.25 * std::max(hi[k] - lo[k], 1.0);
    lo[k] -= pad;
    hi[k] += pad;
  }
  out << std::setprecision(17);
  if (d == 1) {
    out << "x0,closed_form\n";
    for (int k = 0; k <= 200; ++k) {
      Point x{lo[0] + (hi[0] - lo[0]) * k / 200.0};
      out << x[0] << ',' << closed_form_critic(x, inst.train, train_values, inst.norm) << '\n';
    }
  } else {
    out << "x0,x1,closed_form\n";
    for (int a = 0; a <= 40; ++a) {
      for (int b = 0; b <= 40; ++b) {
        Point x{lo[0] + (hi[0] - lo[0]) * a / 40.0, lo[1] + (hi[1] - lo[1]) * b / 40.0};
        out << x[0] << ',' << x[1] << ',' << closed_form_critic(x, inst.train, train_values, inst.norm)
            << '\n';
      }
    }
  }
}

}  // namespace ganen::critic

#include "ganen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include "ganen/error.hpp"

namespace ganen {
namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts count_classes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
  ClassCounts c;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!std::isfinite(scores[k])) throw ValidationError("scores must be finite");
    if (labels[k] == 1) {
      ++c.positives;
    } else if (labels[k] == 0) {
      ++c.negatives;
    } else {
      throw ValidationError("labels must be 0 or 1");
    }
  }
  return c;
}

ClassCounts require_both(std::span<const double> scores, std::span<const int> labels) {
  ClassCounts c = count_classes(scores, labels);
  if (c.positives == 0 || c.negatives == 0) {
    throw ValidationError("both normal and anomalous samples are required");
  }
  return c;
}

std::vector<std::size_t> order_descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double RocCurve::area() const {
  double a = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto [x0, y0] = points[k - 1];
    const auto [x1, y1] = points[k];
    a += (x1 - x0) * (y0 + y1) * 0.5;
  }
  return a;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts c = require_both(scores, labels);
  // Midranks over ascending scores, then U = R_pos - n_pos (n_pos + 1) / 2.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k;
    while (end + 1 < order.size() && scores[order[end + 1]] == scores[order[k]]) ++end;
    const double midrank = 0.5 * static_cast<double>(k + end) + 1.0;
    for (std::size_t q = k; q <= end; ++q) {
      if (labels[order[q]] == 1) rank_sum += midrank;
    }
    k = end + 1;
  }
  const double np = static_cast<double>(c.positives);
  const double nn = static_cast<double>(c.negatives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts c = require_both(scores, labels);
  const auto order = order_descending(scores);
  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0, k = 0;
  while (k < order.size()) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      (labels[order[k]] == 1 ? tp : fp) += 1;
      ++k;
    }
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(c.negatives),
                              static_cast<double>(tp) / static_cast<double>(c.positives));
  }
  return curve;
}

ClassificationSummary prf_at_threshold(std::span<const double> scores, std::span<const int> labels,
                                       double threshold) {
  count_classes(scores, labels);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const bool flagged = scores[k] >= threshold;
    if (labels[k] == 1) {
      (flagged ? tp : fn) += 1;
    } else if (flagged) {
      ++fp;
    }
  }
  ClassificationSummary s;
  s.threshold = threshold;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

double threshold_by_contamination(std::span<const double> scores, double contamination) {
  if (scores.empty()) throw ValidationError("no scores to threshold");
  if (!(contamination > 0.0 && contamination < 1.0)) {
    throw ValidationError("contamination must lie in (0, 1)");
  }
  const std::size_t n = scores.size();
  // Guard against products such as 0.3 * 10 landing just above an integer.
  const double raw = contamination * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  k = std::clamp<std::size_t>(k, 1, n);
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double cut = sorted[k - 1];
  if (k == n || sorted[k] < cut) return cut;
  // Ties straddle the cut: flag only the scores strictly above the tied group.
  auto above = std::find_if(sorted.rbegin(), sorted.rend(), [&](double s) { return s > cut; });
  if (above == sorted.rend()) return std::nextafter(cut, std::numeric_limits<double>::infinity());
  return *above;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "fpr,tpr\n" << std::setprecision(17);
  for (const auto& [f, t] : curve.points) out << f << ',' << t << '\n';
}

}  // namespace ganen

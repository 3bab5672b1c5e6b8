#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace ganen {

/// Points (false-positive rate, true-positive rate) from (0,0) to (1,1).
struct RocCurve {
  std::vector<std::pair<double, double>> points;

  /// Trapezoidal area under the curve.
  double area() const;
};

struct ClassificationSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;
};

/// Mann-Whitney AUROC: P(anomaly score > normal score) + P(tie) / 2.
/// Labels are 1 for anomalies. Both classes must be present.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// Threshold sweep over the distinct scores, highest first; tied scores move
/// together.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

/// Predicts an anomaly iff score >= threshold. Zero denominators give 0.
ClassificationSummary prf_at_threshold(std::span<const double> scores, std::span<const int> labels,
                                       double threshold);

/// Threshold that flags ceil(contamination * n) samples under the `>=` rule.
/// When ties straddle the cut, the threshold moves above the tied group so
/// that fewer samples are flagged.
double threshold_by_contamination(std::span<const double> scores, double contamination);

/// `fpr,tpr` rows.
void write_roc_csv(std::ostream& out, const RocCurve& curve);

}  // namespace ganen

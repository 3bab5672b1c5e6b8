#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ganen/tensor.hpp"

namespace ganen {

/// Rows of samples with binary labels (1 = anomaly).
struct LabeledDataset {
  Tensor rows;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  std::size_t size() const { return labels.size(); }
  std::size_t width() const { return rows.cols(); }
  void validate() const;
  /// Rows with the given label, in original order.
  Tensor rows_with_label(int label) const;
  double anomaly_fraction() const;
};

enum class SyntheticKind { kGaussianMixture, kRing, kTwoMoons };

std::string_view synthetic_kind_name(SyntheticKind k);
SyntheticKind parse_synthetic_kind(std::string_view name);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kRing;
  std::size_t n_normal = 1000;
  std::size_t n_anomaly = 100;
  std::size_t dim = 2;
  std::uint64_t seed = 0;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

// Geometry of the ring generator.
inline constexpr double kRingRadius = 1.0;
inline constexpr double kRingRadialStd = 0.05;
// Extra dimensions beyond the first two carry N(0, kExtraDimStd^2) noise.
inline constexpr double kExtraDimStd = 0.05;

/// Normal rows follow the named structure in the first two coordinates;
/// anomalies come from a displaced or background distribution. Rows are
/// shuffled. Deterministic per seed.
LabeledDataset make_synthetic(const SyntheticSpec& spec);

struct DelimitedOptions {
  /// Column name (needs a header row) or 0-based index.
  std::string label_column = "label";
  char delimiter = ',';
};

/// Parses numeric delimited text. A first row that is not entirely numeric is
/// treated as a header.
LabeledDataset read_delimited(std::istream& in, const DelimitedOptions& options);
LabeledDataset load_delimited(const std::string& path, const DelimitedOptions& options);

/// Header `x0..x{d-1},label` (or the dataset's feature names), 17 significant digits.
void write_delimited(std::ostream& out, const LabeledDataset& data, char delimiter = ',');
void save_delimited(const std::string& path, const LabeledDataset& data, char delimiter = ',');

enum class ScalerMethod { kMinMax01, kZScore };

std::string_view scaler_method_name(ScalerMethod m);
ScalerMethod parse_scaler_method(std::string_view name);

/// Per-feature affine transform x -> (x - offset) / scale. Constant features
/// have scale 0 and map to 0.
struct Scaler {
  ScalerMethod method = ScalerMethod::kMinMax01;
  std::vector<double> offset;
  std::vector<double> scale;

  static Scaler identity(std::size_t width);
  Tensor apply(const Tensor& x) const;
  Tensor invert(const Tensor& x) const;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Fits on `train` only.
Scaler fit_scaler(const Tensor& train, ScalerMethod method);
std::pair<LabeledDataset, Scaler> normalize(const LabeledDataset& train, ScalerMethod method);
LabeledDataset apply_scaler(const LabeledDataset& data, const Scaler& scaler);

struct Split {
  LabeledDataset train;  // normal rows only
  LabeledDataset test;   // remaining normals and every anomaly, original order
};

/// round(train_frac * n_normal) randomly chosen normal rows form the training set.
Split anomaly_split(const LabeledDataset& data, double train_frac, std::uint64_t seed);

}  // namespace ganen

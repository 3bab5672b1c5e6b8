#include "ganen/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "ganen/error.hpp"

namespace ganen {

void LabeledDataset::validate() const {
  if (rows.rank() != 2) throw ValidationError("dataset rows must form a matrix");
  if (labels.size() != rows.rows()) throw ValidationError("label count does not match row count");
  if (!rows.all_finite()) throw ValidationError("dataset contains non-finite values");
  for (int l : labels) {
    if (l != 0 && l != 1) throw ValidationError("labels must be 0 or 1");
  }
  if (!feature_names.empty() && feature_names.size() != rows.cols()) {
    throw ValidationError("feature name count does not match width");
  }
}

Tensor LabeledDataset::rows_with_label(int label) const {
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] == label) idx.push_back(r);
  }
  if (idx.empty()) throw ValidationError("no rows with label " + std::to_string(label));
  return rows.gather_rows(idx);
}

double LabeledDataset::anomaly_fraction() const {
  if (labels.empty()) return 0.0;
  return static_cast<double>(std::count(labels.begin(), labels.end(), 1)) /
         static_cast<double>(labels.size());
}

std::string_view synthetic_kind_name(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::kGaussianMixture: return "gaussian-mixture";
    case SyntheticKind::kRing: return "ring";
    case SyntheticKind::kTwoMoons: return "two-moons";
  }
  return "ring";
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  for (auto k : {SyntheticKind::kGaussianMixture, SyntheticKind::kRing, SyntheticKind::kTwoMoons}) {
    if (synthetic_kind_name(k) == name) return k;
  }
  throw ValidationError("unknown synthetic kind '" + std::string(name) +
                        "' (expected gaussian-mixture, ring or two-moons)");
}

namespace {

using Point = std::pair<double, double>;

constexpr double kPi = std::numbers::pi;
constexpr double kMoonNoise = 0.1;
constexpr double kMoonClearance = 0.35;
constexpr double kMixtureRadius = 2.0;
constexpr double kMixtureStd = 0.25;
constexpr double kMixtureClearance = 1.0;

Point moon_point(double t, bool upper) {
  return upper ? Point{std::cos(t), std::sin(t)} : Point{1.0 - std::cos(t), 0.5 - std::sin(t)};
}

double distance_to_moons(Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 200; ++k) {
    const double t = kPi * k / 200.0;
    for (bool upper : {true, false}) {
      const auto [mx, my] = moon_point(t, upper);
      best = std::min(best, std::hypot(p.first - mx, p.second - my));
    }
  }
  return best;
}

Point mixture_center(int k) {
  const double a = 2.0 * kPi * k / 3.0;
  return {kMixtureRadius * std::cos(a), kMixtureRadius * std::sin(a)};
}

Point normal_point(SyntheticKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (kind) {
    case SyntheticKind::kRing: {
      const double theta = 2.0 * kPi * unit(rng);
      const double r = kRingRadius + kRingRadialStd * gauss(rng);
      return {r * std::cos(theta), r * std::sin(theta)};
    }
    case SyntheticKind::kTwoMoons: {
      const bool upper = unit(rng) < 0.5;
      const auto [x, y] = moon_point(kPi * unit(rng), upper);
      return {x + kMoonNoise * gauss(rng), y + kMoonNoise * gauss(rng)};
    }
    case SyntheticKind::kGaussianMixture: {
      std::uniform_int_distribution<int> comp(0, 2);
      const auto [cx, cy] = mixture_center(comp(rng));
      return {cx + kMixtureStd * gauss(rng), cy + kMixtureStd * gauss(rng)};
    }
  }
  return {0.0, 0.0};
}

Point anomaly_point(SyntheticKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (kind) {
    case SyntheticKind::kRing: {
      // Inside the hole or beyond the ring, away from the normal band.
      const double theta = 2.0 * kPi * unit(rng);
      const double r = unit(rng) < 0.5 ? 0.5 * kRingRadius * unit(rng)
                                       : kRingRadius * (1.5 + 0.5 * unit(rng));
      return {r * std::cos(theta), r * std::sin(theta)};
    }
    case SyntheticKind::kTwoMoons: {
      for (;;) {
        Point p{-1.5 + 4.0 * unit(rng), -1.0 + 2.5 * unit(rng)};
        if (distance_to_moons(p) > kMoonClearance) return p;
      }
    }
    case SyntheticKind::kGaussianMixture: {
      for (;;) {
        Point p{-4.0 + 8.0 * unit(rng), -4.0 + 8.0 * unit(rng)};
        bool clear = true;
        for (int k = 0; k < 3; ++k) {
          const auto [cx, cy] = mixture_center(k);
          clear = clear && std::hypot(p.first - cx, p.second - cy) > kMixtureClearance;
        }
        if (clear) return p;
      }
    }
  }
  return {0.0, 0.0};
}

std::vector<std::string> default_feature_names(std::size_t width) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < width; ++k) names.push_back("x" + std::to_string(k));
  return names;
}

}  // namespace

LabeledDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.dim < 2) throw ValidationError("synthetic data needs dim >= 2");
  const std::size_t n = spec.n_normal + spec.n_anomaly;
  if (n == 0) throw ValidationError("synthetic data needs at least one row");
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32), 7u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> extra(0.0, kExtraDimStd);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t k = 0; k < n; ++k) {
    const bool anomaly = k >= spec.n_normal;
    const Point p = anomaly ? anomaly_point(spec.kind, rng) : normal_point(spec.kind, rng);
    std::vector<double> row{p.first, p.second};
    for (std::size_t e = 2; e < spec.dim; ++e) row.push_back(extra(rng));
    rows.push_back(std::move(row));
    labels.push_back(anomaly ? 1 : 0);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  LabeledDataset out;
  std::vector<double> flat;
  flat.reserve(n * spec.dim);
  for (std::size_t k : order) {
    flat.insert(flat.end(), rows[k].begin(), rows[k].end());
    out.labels.push_back(labels[k]);
  }
  out.rows = Tensor(Shape{n, spec.dim}, std::move(flat));
  out.feature_names = default_feature_names(spec.dim);
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) fields.push_back(field);
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

bool all_numeric(const std::vector<std::string>& fields) {
  double v = 0.0;
  return std::all_of(fields.begin(), fields.end(), [&](const std::string& f) { return parse_double(f, v); });
}

}  // namespace

LabeledDataset read_delimited(std::istream& in, const DelimitedOptions& options) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    records.push_back(split_line(line, options.delimiter));
    line_numbers.push_back(line_no);
  }
  if (records.empty()) throw FormatError("delimited input is empty");

  std::vector<std::string> header;
  std::size_t first = 0;
  if (!all_numeric(records.front())) {
    for (const auto& f : records.front()) header.emplace_back(trim(f));
    first = 1;
  }
  const std::size_t width = records.front().size();

  std::size_t label_idx = 0;
  const std::string& lc = options.label_column;
  const bool is_index = !lc.empty() && std::all_of(lc.begin(), lc.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (is_index) {
    label_idx = std::stoul(lc);
    if (label_idx >= width) throw FormatError("label column index " + lc + " is out of range");
  } else {
    auto it = std::find(header.begin(), header.end(), lc);
    if (it == header.end()) throw FormatError("label column '" + lc + "' not found");
    label_idx = static_cast<std::size_t>(it - header.begin());
  }
  if (width < 2) throw FormatError("need at least one feature column besides the label");
  if (records.size() == first) throw FormatError("no data rows");

  LabeledDataset out;
  std::vector<double> flat;
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "line " + std::to_string(line_numbers[r]);
    if (rec.size() != width) {
      throw FormatError(where + ": expected " + std::to_string(width) + " fields, got " +
                        std::to_string(rec.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_double(rec[c], v)) {
        throw FormatError(where + ", column " + std::to_string(c) + ": '" + rec[c] + "' is not a finite number");
      }
      if (c == label_idx) {
        if (v != 0.0 && v != 1.0) throw FormatError(where + ": label must be 0 or 1");
        out.labels.push_back(static_cast<int>(v));
      } else {
        flat.push_back(v);
      }
    }
  }
  out.rows = Tensor(Shape{out.labels.size(), width - 1}, std::move(flat));
  if (!header.empty()) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_idx) out.feature_names.push_back(header[c]);
    }
  } else {
    out.feature_names = default_feature_names(width - 1);
  }
  return out;
}

LabeledDataset load_delimited(const std::string& path, const DelimitedOptions& options) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return read_delimited(in, options);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_delimited(std::ostream& out, const LabeledDataset& data, char delimiter) {
  data.validate();
  const auto names = data.feature_names.empty() ? default_feature_names(data.width()) : data.feature_names;
  for (const auto& n : names) out << n << delimiter;
  out << "label\n" << std::setprecision(17);
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.width(); ++c) out << data.rows.at(r, c) << delimiter;
    out << data.labels[r] << '\n';
  }
}

void save_delimited(const std::string& path, const LabeledDataset& data, char delimiter) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_delimited(out, data, delimiter);
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string_view scaler_method_name(ScalerMethod m) {
  return m == ScalerMethod::kMinMax01 ? "minmax01" : "zscore";
}

ScalerMethod parse_scaler_method(std::string_view name) {
  if (name == "minmax01") return ScalerMethod::kMinMax01;
  if (name == "zscore") return ScalerMethod::kZScore;
  throw ValidationError("unknown normalization '" + std::string(name) + "' (expected minmax01 or zscore)");
}

Scaler Scaler::identity(std::size_t width) {
  Scaler s;
  s.offset.assign(width, 0.0);
  s.scale.assign(width, 1.0);
  return s;
}

Tensor Scaler::apply(const Tensor& x) const {
  if (x.rank() != 2 || x.cols() != offset.size()) {
    throw ShapeError("scaler fitted on width " + std::to_string(offset.size()) + ", got " +
                     shape_string(x.shape()));
  }
  Tensor out = x;
  out.drop_grad();
  const std::size_t c = x.cols();
  for (std::size_t e = 0; e < out.size(); ++e) {
    const std::size_t k = e % c;
    out[e] = scale[k] == 0.0 ? 0.0 : (out[e] - offset[k]) / scale[k];
  }
  return out;
}

Tensor Scaler::invert(const Tensor& x) const {
  if (x.rank() != 2 || x.cols() != offset.size()) throw ShapeError("scaler width mismatch");
  Tensor out = x;
  out.drop_grad();
  const std::size_t c = x.cols();
  for (std::size_t e = 0; e < out.size(); ++e) {
    const std::size_t k = e % c;
    out[e] = out[e] * scale[k] + offset[k];
  }
  return out;
}

Scaler fit_scaler(const Tensor& train, ScalerMethod method) {
  const std::size_t n = train.rows(), c = train.cols();
  Scaler s;
  s.method = method;
  s.offset.assign(c, 0.0);
  s.scale.assign(c, 0.0);
  for (std::size_t k = 0; k < c; ++k) {
    if (method == ScalerMethod::kMinMax01) {
      double lo = train.at(0, k), hi = lo;
      for (std::size_t r = 1; r < n; ++r) {
        lo = std::min(lo, train.at(r, k));
        hi = std::max(hi, train.at(r, k));
      }
      s.offset[k] = lo;
      s.scale[k] = hi - lo;
    } else {
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += train.at(r, k);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) var += (train.at(r, k) - mean) * (train.at(r, k) - mean);
      var /= static_cast<double>(n);
      s.offset[k] = mean;
      s.scale[k] = std::sqrt(var);
    }
  }
  return s;
}

std::pair<LabeledDataset, Scaler> normalize(const LabeledDataset& train, ScalerMethod method) {
  train.validate();
  Scaler s = fit_scaler(train.rows, method);
  return {apply_scaler(train, s), s};
}

LabeledDataset apply_scaler(const LabeledDataset& data, const Scaler& scaler) {
  LabeledDataset out = data;
  out.rows = scaler.apply(data.rows);
  return out;
}

Split anomaly_split(const LabeledDataset& data, double train_frac, std::uint64_t seed) {
  data.validate();
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ValidationError("train_frac must lie in (0, 1)");
  std::vector<std::size_t> normals;
  for (std::size_t r = 0; r < data.size(); ++r) {
    if (data.labels[r] == 0) normals.push_back(r);
  }
  if (normals.empty()) throw ValidationError("dataset has no normal rows");
  auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(normals.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, normals.size());

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 11u};
  std::mt19937_64 rng(seq);
  std::shuffle(normals.begin(), normals.end(), rng);
  std::vector<std::size_t> train_idx(normals.begin(), normals.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(train_idx.begin(), train_idx.end());
  std::vector<bool> in_train(data.size(), false);
  for (std::size_t r : train_idx) in_train[r] = true;
  std::vector<std::size_t> test_idx;
  for (std::size_t r = 0; r < data.size(); ++r) {
    if (!in_train[r]) test_idx.push_back(r);
  }

  auto subset = [&](const std::vector<std::size_t>& idx) {
    LabeledDataset d;
    d.feature_names = data.feature_names;
    if (idx.empty()) return d;
    d.rows = data.rows.gather_rows(idx);
    for (std::size_t r : idx) d.labels.push_back(data.labels[r]);
    return d;
  };
  Split s{subset(train_idx), subset(test_idx)};
  for (int l : s.train.labels) {
    if (l != 0) throw Error("internal: anomaly leaked into the training split");
  }
  return s;
}

}  // namespace ganen

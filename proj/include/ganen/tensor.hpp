#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace ganen {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient slot.
///
/// A scalar has the empty shape `{}` and holds one value. Matrices are
/// `{rows, cols}`; a batch of samples is always `{batch, features}`.
class Tensor {
 public:
  Tensor() : Tensor(Shape{}) {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(Shape{}, std::vector<double>{v}); }
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::initializer_list<double> values);
  static Tensor row(std::initializer_list<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return values_[i]; }
  const double& operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double item() const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool has_grad() const { return !grad_.empty(); }
  std::vector<double>& grad();
  const std::vector<double>& grad() const { return grad_; }
  void zero_grad();
  void drop_grad() { grad_.clear(); }

  bool all_finite() const;
  /// Copy of rows [begin, begin + count) of a rank-2 tensor.
  Tensor slice_rows(std::size_t begin, std::size_t count) const;
  /// Rank-2 tensor made of the given rows, in order.
  Tensor gather_rows(const std::vector<std::size_t>& indices) const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  Shape shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
};

}  // namespace ganen

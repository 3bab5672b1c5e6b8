#include "ganen/tensor.hpp"

#include <cmath>
#include <sstream>

#include "ganen/error.hpp"

namespace ganen {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  for (std::size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape_));
  }
  values_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  for (std::size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape_));
  }
  if (shape_size(shape_) != values_.size()) {
    throw ShapeError("shape " + shape_string(shape_) + " does not hold " +
                     std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values) {
  return Tensor(Shape{rows, cols}, std::vector<double>(values));
}

Tensor Tensor::row(std::initializer_list<double> values) {
  return Tensor(Shape{1, values.size()}, std::vector<double>(values));
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_string(shape_));
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_string(shape_));
  return shape_[1];
}

double Tensor::item() const {
  if (values_.size() != 1) throw ShapeError("item() on tensor of shape " + shape_string(shape_));
  return values_[0];
}

std::vector<double>& Tensor::grad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() { grad_.assign(values_.size(), 0.0); }

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::slice_rows(std::size_t begin, std::size_t count) const {
  const std::size_t c = cols();
  if (begin + count > rows() || count == 0) throw ShapeError("row slice out of range");
  return Tensor(Shape{count, c},
                std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin * c),
                                    values_.begin() + static_cast<std::ptrdiff_t>((begin + count) * c)));
}

Tensor Tensor::gather_rows(const std::vector<std::size_t>& indices) const {
  const std::size_t c = cols();
  const std::size_t r = rows();
  if (indices.empty()) throw ShapeError("gather of zero rows");
  std::vector<double> out;
  out.reserve(indices.size() * c);
  for (std::size_t idx : indices) {
    if (idx >= r) throw ShapeError("row index out of range");
    out.insert(out.end(), values_.begin() + static_cast<std::ptrdiff_t>(idx * c),
               values_.begin() + static_cast<std::ptrdiff_t>((idx + 1) * c));
  }
  return Tensor(Shape{indices.size(), c}, std::move(out));
}

}  // namespace ganen

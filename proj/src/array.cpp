#include "gkd/array.hpp"

#include <cmath>

namespace gkd {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t p = 1;
  for (std::size_t d : shape) p *= d;
  return p;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Array::Array(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (shape_product(shape) != data.size()) {
    throw ShapeError("array shape " + shape_str(shape) + " does not cover " +
                     std::to_string(data.size()) + " values");
  }
}

Array Array::zeros(std::vector<std::size_t> shape) {
  std::size_t n = shape_product(shape);
  return Array(std::move(shape), std::vector<double>(n, 0.0));
}

Array Array::full(std::vector<std::size_t> shape, double value) {
  std::size_t n = shape_product(shape);
  return Array(std::move(shape), std::vector<double>(n, value));
}

Array Array::vector(std::vector<double> values) {
  std::size_t n = values.size();
  return Array({n}, std::move(values));
}

Array Array::matrix(std::size_t rows, std::size_t cols,
                    std::vector<double> values) {
  return Array({rows, cols}, std::move(values));
}

Array Array::identity(std::size_t n) {
  Array a = zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) a.data[i * n + i] = 1.0;
  return a;
}

Array Array::scalar(double value) { return Array({}, {value}); }

std::size_t Array::rows() const {
  if (shape.size() != 2) {
    throw ShapeError("expected matrix, got shape " + shape_str(shape));
  }
  return shape[0];
}

std::size_t Array::cols() const {
  if (shape.size() != 2) {
    throw ShapeError("expected matrix, got shape " + shape_str(shape));
  }
  return shape[1];
}

double& Array::at(std::size_t i, std::size_t j) {
  return data[i * cols() + j];
}

double Array::at(std::size_t i, std::size_t j) const {
  return data[i * cols() + j];
}

bool Array::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_shape(const Array& a, const Array& b, const char* what) {
  if (a.shape != b.shape) {
    throw ShapeError(std::string(what) + ": shape " + shape_str(a.shape) +
                     " vs " + shape_str(b.shape));
  }
}

}  // namespace gkd

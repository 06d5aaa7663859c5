#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gkd {

// Thrown on any dimension disagreement; the message names both shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dense row-major 64-bit array. Plain value type; gradients live on the Tape.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Array() = default;
  Array(std::vector<std::size_t> s, std::vector<double> d);

  static Array zeros(std::vector<std::size_t> shape);
  static Array full(std::vector<std::size_t> shape, double value);
  static Array vector(std::vector<double> values);
  static Array matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values);
  static Array identity(std::size_t n);
  static Array scalar(double value);

  std::size_t size() const { return data.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  bool is_scalar() const { return data.size() == 1 && shape.size() <= 1; }

  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;

  bool same_shape(const Array& other) const { return shape == other.shape; }
  bool all_finite() const;

  bool operator==(const Array& other) const = default;
};

std::string shape_str(const std::vector<std::size_t>& shape);
std::size_t shape_product(const std::vector<std::size_t>& shape);

void require_same_shape(const Array& a, const Array& b, const char* what);

}  // namespace gkd

#pragma once

#include <cstddef>
#include <vector>

namespace gkd {

// N x N boolean adjacency restricting attention. Diagonal is always true
// (every node attends to itself), and both constructions used here are
// symmetric.
struct GraphMask {
  std::size_t n = 0;
  std::vector<bool> bits;  // row-major n*n

  GraphMask() = default;
  explicit GraphMask(std::size_t size, bool value = false)
      : n(size), bits(size * size, value) {
    for (std::size_t i = 0; i < n; ++i) set(i, i, true);
  }

  bool get(std::size_t i, std::size_t j) const { return bits[i * n + j]; }
  void set(std::size_t i, std::size_t j, bool v) { bits[i * n + j] = v; }

  bool operator==(const GraphMask& other) const = default;
};

}  // namespace gkd

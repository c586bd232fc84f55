#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace conserva {

/// Equispaced periodic grid on [x_min, x_max).  The right endpoint is
/// identified with the left one and therefore excluded from the nodes.
struct PeriodicGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n = 0;

  PeriodicGrid() = default;
  PeriodicGrid(double lo, double hi, std::size_t nodes) : x_min(lo), x_max(hi), n(nodes) {
    if (!(hi > lo)) throw std::invalid_argument("PeriodicGrid: x_max must exceed x_min");
    if (n == 0) throw std::invalid_argument("PeriodicGrid: need at least one node");
  }

  double length() const { return x_max - x_min; }
  double spacing() const { return length() / static_cast<double>(n); }
  double node(std::size_t j) const { return x_min + spacing() * static_cast<double>(j); }

  std::vector<double> nodes() const {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = node(j);
    return x;
  }

  bool operator==(const PeriodicGrid&) const = default;
};

/// Tensor-product grid for 2D problems; fields are stored row-major with the
/// x index fastest: idx = iy * gx.n + ix.
struct TensorGrid {
  PeriodicGrid gx;
  PeriodicGrid gy;

  std::size_t points() const { return gx.n * gy.n; }
  double cell_weight() const { return gx.spacing() * gy.spacing(); }

  bool operator==(const TensorGrid&) const = default;
};

}  // namespace conserva

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "conserva/core.hpp"

namespace conserva {

/// Layout of a flat state vector: one or more named components on a common
/// grid, stored back to back.  For 2D tensor grids each component is stored
/// row-major with the x index fastest.
struct StateLayout {
  std::vector<std::string> components;
  std::size_t points = 0;  // nodes per component
  std::size_t nx = 0, ny = 0;  // set for tensor grids, nx * ny == points

  std::size_t size() const { return components.size() * points; }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < components.size(); ++i)
      if (components[i] == name) return i;
    throw std::invalid_argument("StateLayout: unknown component '" + std::string(name) + "'");
  }
};

inline std::span<double> component(Vec& u, const StateLayout& layout, std::size_t i) {
  return std::span<double>(u.data() + i * layout.points, layout.points);
}

inline std::span<const double> component(const Vec& u, const StateLayout& layout, std::size_t i) {
  return std::span<const double>(u.data() + i * layout.points, layout.points);
}

inline Vec component_copy(const Vec& u, const StateLayout& layout, std::size_t i) {
  auto s = component(u, layout, i);
  return Vec(s.begin(), s.end());
}

/// A state at a point in time.  Blow-up detection treats any non-finite
/// entry as fatal for the step that produced it.
struct State {
  Vec u;
  double t = 0.0;
};

}  // namespace conserva

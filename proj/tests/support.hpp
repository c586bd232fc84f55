#pragma once

// Shared helpers for the test suites: band-limited random fields, node
// sampling, and model construction shortcuts.

#include <cmath>
#include <memory>
#include <numbers>

#include "conserva/models.hpp"
#include "conserva/operators.hpp"

namespace conserva::testing {

inline Vec sample(const PeriodicGrid& g, auto&& f) {
  Vec v(g.n);
  for (std::size_t j = 0; j < g.n; ++j) v[j] = f(g.node(j));
  return v;
}

/// Random smooth periodic field: a handful of low Fourier modes with
/// geometrically decaying amplitudes plus a small mean offset.
inline Vec smooth_field(Rng& rng, const PeriodicGrid& g, double amp, int max_mode = 4) {
  Vec v(g.n, amp * rng.uniform(-0.2, 0.2));
  const double two_pi = 2.0 * std::numbers::pi;
  for (int m = 1; m <= max_mode; ++m) {
    const double decay = amp / static_cast<double>(m * m);
    const double a = decay * rng.uniform(-1.0, 1.0);
    const double b = decay * rng.uniform(-1.0, 1.0);
    for (std::size_t j = 0; j < g.n; ++j) {
      const double phase = two_pi * m * (g.node(j) - g.x_min) / g.length();
      v[j] += a * std::cos(phase) + b * std::sin(phase);
    }
  }
  return v;
}

inline Vec smooth_field_2d(Rng& rng, const TensorGrid& g, double amp, int max_mode = 3) {
  Vec v(g.points(), amp * rng.uniform(-0.2, 0.2));
  const double two_pi = 2.0 * std::numbers::pi;
  for (int mx = 0; mx <= max_mode; ++mx)
    for (int my = 0; my <= max_mode; ++my) {
      if (mx == 0 && my == 0) continue;
      const double decay = amp / static_cast<double>(1 + mx * mx + my * my);
      const double a = decay * rng.uniform(-1.0, 1.0);
      const double b = decay * rng.uniform(-1.0, 1.0);
      for (std::size_t iy = 0; iy < g.gy.n; ++iy)
        for (std::size_t ix = 0; ix < g.gx.n; ++ix) {
          const double px = two_pi * mx * (g.gx.node(ix) - g.gx.x_min) / g.gx.length();
          const double py = two_pi * my * (g.gy.node(iy) - g.gy.x_min) / g.gy.length();
          v[iy * g.gx.n + ix] += a * std::cos(px + py) + b * std::sin(px - py);
        }
    }
  return v;
}

inline std::shared_ptr<const Model> make_1d(ModelId id, const PeriodicGrid& g,
                                            OperatorKind kind = OperatorKind::fourier, int order = 4) {
  auto ops = std::make_shared<OperatorSet>(kind == OperatorKind::fourier
                                               ? OperatorSet::fourier(g)
                                               : OperatorSet::finite_difference(g, order));
  ModelConfig cfg;
  cfg.id = id;
  return make_model(cfg, ops);
}

}  // namespace conserva::testing

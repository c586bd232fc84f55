#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "conserva/core.hpp"
#include "conserva/grid.hpp"
#include "conserva/operators.hpp"
#include "conserva/state.hpp"

namespace conserva {

enum class ModelId {
  fornberg_whitham,
  camassa_holm,
  degasperis_procesi,
  bbm_bbm_H,
  bbm_bbm_I,
  holm_hone,
  linear_dispersive,
  kdv,
  p_system,
  swe_2d,
};

inline std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::fornberg_whitham: return "fornberg_whitham";
    case ModelId::camassa_holm: return "camassa_holm";
    case ModelId::degasperis_procesi: return "degasperis_procesi";
    case ModelId::bbm_bbm_H: return "bbm_bbm_H";
    case ModelId::bbm_bbm_I: return "bbm_bbm_I";
    case ModelId::holm_hone: return "holm_hone";
    case ModelId::linear_dispersive: return "linear_dispersive";
    case ModelId::kdv: return "kdv";
    case ModelId::p_system: return "p_system";
    case ModelId::swe_2d: return "swe_2d";
  }
  throw std::logic_error("to_string(ModelId): unreachable");
}

inline std::optional<ModelId> model_id_from_string(std::string_view s) {
  for (ModelId id : {ModelId::fornberg_whitham, ModelId::camassa_holm, ModelId::degasperis_procesi,
                     ModelId::bbm_bbm_H, ModelId::bbm_bbm_I, ModelId::holm_hone,
                     ModelId::linear_dispersive, ModelId::kdv, ModelId::p_system, ModelId::swe_2d})
    if (to_string(id) == s) return id;
  return std::nullopt;
}

/// A scalar functional of the state together with its gradient with respect
/// to the M-weighted inner product: J(u + eps v) = J(u) + eps <grad, v>_M + O(eps^2).
struct Invariant {
  std::string name;
  bool linear = false;  // preserved exactly by any Runge-Kutta step
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> m_gradient;
};

struct BlowUpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A semidiscrete PDE system: split-form right-hand side plus the
/// functionals it conserves.  Instances are immutable after construction and
/// safe to share across threads; rhs evaluation is pure.
class Model {
 public:
  Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  virtual ~Model() = default;

  virtual ModelId id() const = 0;
  virtual const StateLayout& layout() const = 0;

  /// Quadrature weight of one node (grid spacing, or the cell area in 2D).
  virtual double mass_weight() const = 0;

  /// Semidiscrete tendency.  Throws BlowUpError on non-finite input.
  virtual void rhs(const Vec& u, Vec& out) const = 0;

  /// The invariants provably conserved by this semidiscretization.
  virtual const std::vector<Invariant>& invariants() const = 0;

  const Invariant& invariant(std::string_view name) const {
    for (const auto& inv : invariants())
      if (inv.name == name) return inv;
    throw std::invalid_argument(std::string("Model: no invariant named '") + std::string(name) + "'");
  }

  /// M-weighted inner product over the full state (all components).
  double mass_ip(const Vec& a, const Vec& b) const {
    if (a.size() != layout().size() || b.size() != layout().size())
      throw std::invalid_argument("Model::mass_ip: state size mismatch");
    return mass_weight() * kahan_dot(a, b);
  }

  double mass_norm(const Vec& a) const { return std::sqrt(std::max(0.0, mass_ip(a, a))); }

  Vec rhs(const Vec& u) const {
    Vec out(layout().size());
    rhs(u, out);
    return out;
  }

 protected:
  void require_finite(const Vec& u) const {
    if (!all_finite(u)) throw BlowUpError("non-finite value in state");
  }
};

/// Model-specific constants.  The coefficient functions are evaluated at the
/// nodes once, when the model is built.
struct ModelConfig {
  ModelId id = ModelId::linear_dispersive;
  double gravity = 9.8;  // swe_2d
  std::function<double(double)> density = material_default();      // p_system rho(x)
  std::function<double(double)> bulk_modulus = material_default(); // p_system K(x)
  std::function<double(double, double)> bathymetry = bathymetry_default();  // swe_2d b(x, y)

  static std::function<double(double)> material_default() {
    return [](double x) { return 2.5 - 1.5 * std::sin(2.0 * std::numbers::pi * x); };
  }
  static std::function<double(double, double)> bathymetry_default() {
    return [](double, double y) { return 0.25 - 0.25 * std::sin(2.0 * std::numbers::pi * y); };
  }
};

}  // namespace conserva

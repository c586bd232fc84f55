#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "conserva/model.hpp"

namespace conserva {

/// Variable-coefficient p-system in (epsilon, u) with stress
/// sigma(eps, x) = exp(K(x) eps) - 1.  The plain D1 semidiscretization
/// conserves the strain mass, the momentum 1^T M (rho u), and the total
/// energy with the closed-form primitive of sigma.
class PSystemModel final : public Model {
 public:
  PSystemModel(std::shared_ptr<const OperatorSet> ops, const ModelConfig& cfg) : ops_(std::move(ops)) {
    layout_.components = {"epsilon", "u"};
    layout_.points = ops_->n();
    const auto x = ops_->grid().nodes();
    rho_.resize(x.size());
    bulk_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      rho_[i] = cfg.density(x[i]);
      bulk_[i] = cfg.bulk_modulus(x[i]);
      if (!(rho_[i] > 0.0) || !(bulk_[i] > 0.0))
        throw std::invalid_argument("PSystemModel: rho and K must be positive at all nodes");
    }
    build_invariants();
  }

  ModelId id() const override { return ModelId::p_system; }
  const StateLayout& layout() const override { return layout_; }
  double mass_weight() const override { return ops_->mass_weight(); }
  const std::vector<Invariant>& invariants() const override { return invariants_; }

  void rhs(const Vec& state, Vec& out) const override {
    require_finite(state);
    const std::size_t n = layout_.points;
    auto eps = component(state, layout_, 0);
    auto u = component(state, layout_, 1);
    out.resize(layout_.size());
    auto deps = component(out, layout_, 0);
    auto du = component(out, layout_, 1);

    Vec uv(u.begin(), u.end()), t(n), sigma(n);
    ops_->apply_d1(uv, t);
    for (std::size_t i = 0; i < n; ++i) deps[i] = t[i];  // eps_t = D1 u

    for (std::size_t i = 0; i < n; ++i) sigma[i] = stress(eps[i], i);
    ops_->apply_d1(sigma, t);
    for (std::size_t i = 0; i < n; ++i) du[i] = t[i] / rho_[i];  // u_t = rho^{-1} D1 sigma
  }

  double stress(double eps, std::size_t node) const { return std::expm1(bulk_[node] * eps); }

  /// int_0^eps sigma(s, x) ds = (exp(K eps) - 1)/K - eps.
  double stress_primitive(double eps, std::size_t node) const {
    return std::expm1(bulk_[node] * eps) / bulk_[node] - eps;
  }

  const Vec& density() const { return rho_; }
  const Vec& bulk_modulus() const { return bulk_; }

 private:
  void build_invariants() {
    const double w = ops_->mass_weight();
    const StateLayout layout = layout_;
    invariants_.push_back({"mass_epsilon", true,
                           [w, layout](const Vec& s) {
                             auto eps = component(s, layout, 0);
                             return w * kahan_sum(eps.data(), eps.size());
                           },
                           [layout](const Vec&) {
                             Vec g(layout.size(), 0.0);
                             for (std::size_t i = 0; i < layout.points; ++i) g[i] = 1.0;
                             return g;
                           }});
    invariants_.push_back({"momentum", true,
                           [w, layout, this](const Vec& s) {
                             auto u = component(s, layout, 1);
                             return w * kahan_dot(rho_.data(), u.data(), layout.points);
                           },
                           [layout, this](const Vec&) {
                             Vec g(layout.size(), 0.0);
                             for (std::size_t i = 0; i < layout.points; ++i) g[layout.points + i] = rho_[i];
                             return g;
                           }});
    invariants_.push_back({"energy", false,
                           [w, layout, this](const Vec& s) {
                             auto eps = component(s, layout, 0);
                             auto u = component(s, layout, 1);
                             Vec dens(layout.points);
                             for (std::size_t i = 0; i < layout.points; ++i)
                               dens[i] = 0.5 * rho_[i] * u[i] * u[i] + stress_primitive(eps[i], i);
                             return w * kahan_sum(dens);
                           },
                           [layout, this](const Vec& s) {
                             auto eps = component(s, layout, 0);
                             auto u = component(s, layout, 1);
                             Vec g(layout.size());
                             for (std::size_t i = 0; i < layout.points; ++i) {
                               g[i] = stress(eps[i], i);
                               g[layout.points + i] = rho_[i] * u[i];
                             }
                             return g;
                           }});
  }

  std::shared_ptr<const OperatorSet> ops_;
  StateLayout layout_;
  std::vector<Invariant> invariants_;
  Vec rho_, bulk_;
};

}  // namespace conserva

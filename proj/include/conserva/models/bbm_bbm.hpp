#pragma once

#include <memory>
#include <utility>

#include "conserva/model.hpp"
#include "conserva/models/scalar_1d.hpp"

namespace conserva {

/// BBM-BBM system in (eta, u).  Two split forms are implemented: the
/// H-conserving one (both equations in flux form) and the I-conserving one
/// (advective split of u u_x in the velocity equation), matching the two
/// model ids bbm_bbm_H and bbm_bbm_I.
class BbmBbmModel final : public Model {
 public:
  BbmBbmModel(std::shared_ptr<const OperatorSet> ops, bool conserve_hamiltonian)
      : ops_(std::move(ops)),
        hamiltonian_form_(conserve_hamiltonian),
        helmholtz_(ops_->elliptic_inverse(1.0, -1.0, 0.0)) {
    layout_.components = {"eta", "u"};
    layout_.points = ops_->n();
    build_invariants();
  }

  ModelId id() const override { return hamiltonian_form_ ? ModelId::bbm_bbm_H : ModelId::bbm_bbm_I; }
  const StateLayout& layout() const override { return layout_; }
  double mass_weight() const override { return ops_->mass_weight(); }
  const std::vector<Invariant>& invariants() const override { return invariants_; }

  void rhs(const Vec& state, Vec& out) const override {
    require_finite(state);
    const std::size_t n = layout_.points;
    auto eta = component(state, layout_, 0);
    auto u = component(state, layout_, 1);
    out.resize(layout_.size());
    auto deta = component(out, layout_, 0);
    auto du = component(out, layout_, 1);

    Vec work(n), t(n), solved;
    // eta_t = -(I - D2)^{-1} D1 (u + eta u), common to both forms
    for (std::size_t i = 0; i < n; ++i) work[i] = u[i] + eta[i] * u[i];
    ops_->apply_d1(work, t);
    helmholtz_.solve(t, solved);
    for (std::size_t i = 0; i < n; ++i) deta[i] = -solved[i];

    if (hamiltonian_form_) {
      // u_t = -(I - D2)^{-1} D1 (eta + u^2/2)
      for (std::size_t i = 0; i < n; ++i) work[i] = eta[i] + 0.5 * u[i] * u[i];
      ops_->apply_d1(work, t);
      helmholtz_.solve(t, solved);
    } else {
      // u_t = -(I - D2)^{-1} (D1 eta + u D1 u)
      Vec deta_x(n), d1u(n);
      Vec eta_vec(eta.begin(), eta.end()), u_vec(u.begin(), u.end());
      ops_->apply_d1(eta_vec, deta_x);
      ops_->apply_d1(u_vec, d1u);
      for (std::size_t i = 0; i < n; ++i) t[i] = deta_x[i] + u[i] * d1u[i];
      helmholtz_.solve(t, solved);
    }
    for (std::size_t i = 0; i < n; ++i) du[i] = -solved[i];
  }

 private:
  void build_invariants() {
    const double w = ops_->mass_weight();
    const std::size_t n = layout_.points;
    const StateLayout layout = layout_;
    invariants_.push_back({"mass_eta", true,
                           [w, layout](const Vec& s) {
                             auto eta = component(s, layout, 0);
                             return w * kahan_sum(eta.data(), eta.size());
                           },
                           [layout, n](const Vec&) {
                             Vec g(layout.size(), 0.0);
                             for (std::size_t i = 0; i < n; ++i) g[i] = 1.0;
                             return g;
                           }});
    invariants_.push_back({"mass_u", true,
                           [w, layout](const Vec& s) {
                             auto u = component(s, layout, 1);
                             return w * kahan_sum(u.data(), u.size());
                           },
                           [layout, n](const Vec&) {
                             Vec g(layout.size(), 0.0);
                             for (std::size_t i = 0; i < n; ++i) g[n + i] = 1.0;
                             return g;
                           }});
    if (hamiltonian_form_) {
      // H(eta, u) = -1/2 int (eta^2 + (1 + eta) u^2)
      invariants_.push_back({"hamiltonian", false,
                             [w, layout](const Vec& s) {
                               auto eta = component(s, layout, 0);
                               auto u = component(s, layout, 1);
                               Vec dens(layout.points);
                               for (std::size_t i = 0; i < layout.points; ++i)
                                 dens[i] = eta[i] * eta[i] + (1.0 + eta[i]) * u[i] * u[i];
                               return -0.5 * w * kahan_sum(dens);
                             },
                             [layout](const Vec& s) {
                               auto eta = component(s, layout, 0);
                               auto u = component(s, layout, 1);
                               Vec g(layout.size());
                               for (std::size_t i = 0; i < layout.points; ++i) {
                                 g[i] = -eta[i] - 0.5 * u[i] * u[i];
                                 g[layout.points + i] = -(1.0 + eta[i]) * u[i];
                               }
                               return g;
                             }});
    } else {
      // I(eta, u) = u^T M (I - D2) eta
      auto op = ops_;
      invariants_.push_back({"secondary", false,
                             [w, layout, op](const Vec& s) {
                               Vec eta = component_copy(s, layout, 0);
                               auto u = component(s, layout, 1);
                               Vec seta = op->d2(eta);
                               for (std::size_t i = 0; i < layout.points; ++i) seta[i] = eta[i] - seta[i];
                               return w * kahan_dot(u.data(), seta.data(), layout.points);
                             },
                             [layout, op](const Vec& s) {
                               Vec eta = component_copy(s, layout, 0);
                               Vec u = component_copy(s, layout, 1);
                               Vec su = op->d2(u);
                               Vec seta = op->d2(eta);
                               Vec g(layout.size());
                               for (std::size_t i = 0; i < layout.points; ++i) {
                                 g[i] = u[i] - su[i];
                                 g[layout.points + i] = eta[i] - seta[i];
                               }
                               return g;
                             }});
    }
  }

  std::shared_ptr<const OperatorSet> ops_;
  bool hamiltonian_form_;
  EllipticInverse helmholtz_;
  StateLayout layout_;
  std::vector<Invariant> invariants_;
};

}  // namespace conserva

#pragma once

#include <memory>
#include <utility>

#include "conserva/model.hpp"

namespace conserva {

namespace detail {

inline void pointwise_mul(const Vec& a, const Vec& b, Vec& out) {
  out.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
}

inline void pointwise_square(const Vec& a, Vec& out) {
  out.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * a[i];
}

}  // namespace detail

/// Common pieces of the scalar models: one component "u" on a 1D grid.
class Scalar1dModel : public Model {
 public:
  const StateLayout& layout() const override { return layout_; }
  double mass_weight() const override { return ops_->mass_weight(); }
  const std::vector<Invariant>& invariants() const override { return invariants_; }
  const OperatorSet& ops() const { return *ops_; }

 protected:
  explicit Scalar1dModel(std::shared_ptr<const OperatorSet> ops) : ops_(std::move(ops)) {
    layout_.components = {"u"};
    layout_.points = ops_->n();
  }

  Invariant mass_invariant() const {
    const double w = mass_weight();
    const std::size_t n = layout_.points;
    return {"mass", true,
            [w](const Vec& u) { return w * kahan_sum(u); },
            [n](const Vec&) { return Vec(n, 1.0); }};
  }

  std::shared_ptr<const OperatorSet> ops_;
  StateLayout layout_;
  std::vector<Invariant> invariants_;
};

/// u_t + (u^2/2)_x + (I - dxx)^{-1} u_x = 0, discretized with the
/// two-thirds flux split so that the quadratic invariant u^T M u is
/// conserved (D1 and D2 must commute, which holds for circulant operators).
class FornbergWhithamModel final : public Scalar1dModel {
 public:
  explicit FornbergWhithamModel(std::shared_ptr<const OperatorSet> ops)
      : Scalar1dModel(std::move(ops)), helmholtz_(ops_->elliptic_inverse(1.0, -1.0, 0.0)) {
    invariants_.push_back(mass_invariant());
    const double w = mass_weight();
    invariants_.push_back({"secondary", false,
                           [w](const Vec& u) { return w * kahan_dot(u, u); },
                           [](const Vec& u) {
                             Vec g(u);
                             for (double& x : g) x *= 2.0;
                             return g;
                           }});
  }

  ModelId id() const override { return ModelId::fornberg_whitham; }

  void rhs(const Vec& u, Vec& out) const override {
    require_finite(u);
    Vec usq, t1, t2, t3;
    detail::pointwise_square(u, usq);
    ops_->apply_d1(usq, t1);
    ops_->apply_d1(u, t2);
    helmholtz_.solve(t2, t3);  // (I - D2)^{-1} D1 u
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = -(t1[i] + u[i] * t2[i]) / 3.0 - t3[i];
  }

 private:
  EllipticInverse helmholtz_;
};

/// Camassa-Holm with the alpha = 1/2 split form; conserves the H^1-type
/// invariant I = 1/2 u^T M (I - D2) u for any periodic SBP pair D1, D2.
class CamassaHolmModel final : public Scalar1dModel {
 public:
  explicit CamassaHolmModel(std::shared_ptr<const OperatorSet> ops)
      : Scalar1dModel(std::move(ops)), helmholtz_(ops_->elliptic_inverse(1.0, -1.0, 0.0)) {
    invariants_.push_back(mass_invariant());
    const double w = mass_weight();
    auto op = ops_;
    invariants_.push_back({"secondary", false,
                           [w, op](const Vec& u) {
                             Vec d2u = op->d2(u);
                             for (std::size_t i = 0; i < u.size(); ++i) d2u[i] = u[i] - d2u[i];
                             return 0.5 * w * kahan_dot(u, d2u);
                           },
                           [op](const Vec& u) {
                             Vec g = op->d2(u);
                             for (std::size_t i = 0; i < u.size(); ++i) g[i] = u[i] - g[i];
                             return g;
                           }});
  }

  ModelId id() const override { return ModelId::camassa_holm; }

  void rhs(const Vec& u, Vec& out) const override {
    require_finite(u);
    const std::size_t n = u.size();
    Vec usq, d1u, d2u, prod, t1, t2, work(n);
    detail::pointwise_square(u, usq);
    ops_->apply_d1(usq, t1);           // D1 u^2
    ops_->apply_d1(u, d1u);
    ops_->apply_d2(u, d2u);
    detail::pointwise_mul(u, d2u, prod);
    ops_->apply_d1(prod, t2);          // D1 (u D2 u)
    for (std::size_t i = 0; i < n; ++i) work[i] = u[i] * d1u[i];
    Vec t3;
    ops_->apply_d2(work, t3);          // D2 (u D1 u)
    for (std::size_t i = 0; i < n; ++i)
      work[i] = t1[i] + u[i] * d1u[i] - 0.5 * t2[i] - 0.5 * t3[i];
    helmholtz_.solve(work, out);
    for (double& x : out) x = -x;
  }

 private:
  EllipticInverse helmholtz_;
};

/// Degasperis-Procesi; conserves I = 1/2 u^T (I - D2)^T M (4I - D2)^{-1} u.
class DegasperisProcesiModel final : public Scalar1dModel {
 public:
  explicit DegasperisProcesiModel(std::shared_ptr<const OperatorSet> ops)
      : Scalar1dModel(std::move(ops)),
        helmholtz_(ops_->elliptic_inverse(1.0, -1.0, 0.0)),
        four_minus_d2_inv_(ops_->elliptic_inverse(4.0, -1.0, 0.0)) {
    invariants_.push_back(mass_invariant());
    const double w = mass_weight();
    auto op = ops_;
    auto qinv = std::make_shared<EllipticInverse>(four_minus_d2_inv_);
    invariants_.push_back({"secondary", false,
                           [w, op, qinv](const Vec& u) {
                             Vec v = qinv->solve(u);
                             Vec su = op->d2(u);
                             for (std::size_t i = 0; i < u.size(); ++i) su[i] = u[i] - su[i];
                             return 0.5 * w * kahan_dot(su, v);
                           },
                           [op, qinv](const Vec& u) {
                             Vec v = qinv->solve(u);
                             Vec g = op->d2(v);
                             for (std::size_t i = 0; i < u.size(); ++i) g[i] = v[i] - g[i];
                             return g;
                           }});
  }

  ModelId id() const override { return ModelId::degasperis_procesi; }

  void rhs(const Vec& u, Vec& out) const override {
    require_finite(u);
    const std::size_t n = u.size();
    Vec usq, d1u, t1, w(n), d2w;
    detail::pointwise_square(u, usq);
    ops_->apply_d1(usq, t1);
    ops_->apply_d1(u, d1u);
    for (std::size_t i = 0; i < n; ++i) w[i] = t1[i] + u[i] * d1u[i];
    ops_->apply_d2(w, d2w);
    for (std::size_t i = 0; i < n; ++i) w[i] = 4.0 * w[i] - d2w[i];  // (4I - D2) w
    helmholtz_.solve(w, out);
    for (double& x : out) x = -x / 3.0;
  }

 private:
  EllipticInverse helmholtz_;
  EllipticInverse four_minus_d2_inv_;
};

/// Holm-Hone equation with G = 4I - 5 D2 + D4; conserves the Hamiltonian
/// 1/2 u^T M G u and the linear invariant 1^T M (I - D2) u (D1, D2, D4 must
/// commute).
class HolmHoneModel final : public Scalar1dModel {
 public:
  explicit HolmHoneModel(std::shared_ptr<const OperatorSet> ops)
      : Scalar1dModel(std::move(ops)), g_inv_(ops_->elliptic_inverse(4.0, -5.0, 1.0)) {
    invariants_.push_back(mass_invariant());
    const double w = mass_weight();
    auto op = ops_;
    invariants_.push_back({"secondary", true,
                           [w, op](const Vec& u) {
                             Vec d2u = op->d2(u);
                             for (std::size_t i = 0; i < u.size(); ++i) d2u[i] = u[i] - d2u[i];
                             return w * kahan_sum(d2u);
                           },
                           [op](const Vec& u) {
                             Vec ones(u.size(), 1.0);
                             Vec d2o = op->d2(ones);
                             for (std::size_t i = 0; i < u.size(); ++i) d2o[i] = 1.0 - d2o[i];
                             return d2o;
                           }});
    invariants_.push_back({"hamiltonian", false,
                           [w, this](const Vec& u) {
                             Vec gu;
                             apply_g(u, gu);
                             return 0.5 * w * kahan_dot(u, gu);
                           },
                           [this](const Vec& u) {
                             Vec gu;
                             apply_g(u, gu);
                             return gu;
                           }});
  }

  ModelId id() const override { return ModelId::holm_hone; }

  void rhs(const Vec& u, Vec& out) const override {
    require_finite(u);
    const std::size_t n = u.size();
    Vec gu, d1u, prod, t1, w(n);
    apply_g(u, gu);
    ops_->apply_d1(u, d1u);
    detail::pointwise_mul(u, gu, prod);
    ops_->apply_d1(prod, t1);  // D1 (u G u)
    for (std::size_t i = 0; i < n; ++i) w[i] = t1[i] + d1u[i] * gu[i];
    g_inv_.solve(w, out);
    for (double& x : out) x = -x;
  }

  void apply_g(const Vec& u, Vec& out) const {
    Vec d2u, d4u;
    ops_->apply_d2(u, d2u);
    ops_->apply_d4(u, d4u);
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = 4.0 * u[i] - 5.0 * d2u[i] + d4u[i];
  }

 private:
  EllipticInverse g_inv_;
};

/// (I - dxx) u_t + u_x = 0; conserves the mass and the energy
/// u^T M (I - D2) u.
class LinearDispersiveModel final : public Scalar1dModel {
 public:
  explicit LinearDispersiveModel(std::shared_ptr<const OperatorSet> ops)
      : Scalar1dModel(std::move(ops)), helmholtz_(ops_->elliptic_inverse(1.0, -1.0, 0.0)) {
    invariants_.push_back(mass_invariant());
    const double w = mass_weight();
    auto op = ops_;
    invariants_.push_back({"energy", false,
                           [w, op](const Vec& u) {
                             Vec su = op->d2(u);
                             for (std::size_t i = 0; i < u.size(); ++i) su[i] = u[i] - su[i];
                             return w * kahan_dot(u, su);
                           },
                           [op](const Vec& u) {
                             Vec g = op->d2(u);
                             for (std::size_t i = 0; i < u.size(); ++i) g[i] = 2.0 * (u[i] - g[i]);
                             return g;
                           }});
  }

  ModelId id() const override { return ModelId::linear_dispersive; }

  void rhs(const Vec& u, Vec& out) const override {
    require_finite(u);
    Vec d1u;
    ops_->apply_d1(u, d1u);
    helmholtz_.solve(d1u, out);
    for (double& x : out) x = -x;
  }

 private:
  EllipticInverse helmholtz_;
};

/// u_t + u u_x + u_xxx = 0 with the two-thirds split of the convective term
/// and D3 = D1 D2; conserves mass and the energy u^T M u.
class KdvModel final : public Scalar1dModel {
 public:
  explicit KdvModel(std::shared_ptr<const OperatorSet> ops) : Scalar1dModel(std::move(ops)) {
    invariants_.push_back(mass_invariant());
    const double w = mass_weight();
    invariants_.push_back({"energy", false,
                           [w](const Vec& u) { return w * kahan_dot(u, u); },
                           [](const Vec& u) {
                             Vec g(u);
                             for (double& x : g) x *= 2.0;
                             return g;
                           }});
  }

  ModelId id() const override { return ModelId::kdv; }

  void rhs(const Vec& u, Vec& out) const override {
    require_finite(u);
    const std::size_t n = u.size();
    Vec usq, t1, d1u, d2u, t3;
    detail::pointwise_square(u, usq);
    ops_->apply_d1(usq, t1);
    ops_->apply_d1(u, d1u);
    ops_->apply_d2(u, d2u);
    ops_->apply_d1(d2u, t3);  // D1 D2 u
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = -(t1[i] + u[i] * d1u[i]) / 3.0 - t3[i];
  }
};

}  // namespace conserva

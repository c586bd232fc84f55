#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "conserva/timeloop.hpp"
#include "support.hpp"

using namespace conserva;
using conserva::testing::sample;
using std::numbers::pi;

namespace {

// Scalar test ODE u' = u wrapped as a Model so the integrator can drive it.
class ExpModel final : public Model {
 public:
  ExpModel() {
    layout_.components = {"u"};
    layout_.points = 1;
    invariants_.push_back({"none", false, [](const Vec& u) { return u[0]; },
                           [](const Vec&) { return Vec{1.0}; }});
  }
  ModelId id() const override { return ModelId::linear_dispersive; }
  const StateLayout& layout() const override { return layout_; }
  double mass_weight() const override { return 1.0; }
  void rhs(const Vec& u, Vec& out) const override {
    out.resize(1);
    out[0] = u[0];
  }
  const std::vector<Invariant>& invariants() const override { return invariants_; }

 private:
  StateLayout layout_;
  std::vector<Invariant> invariants_;
};

class ZeroModel final : public Model {
 public:
  ZeroModel() {
    layout_.components = {"u"};
    layout_.points = 4;
  }
  ModelId id() const override { return ModelId::linear_dispersive; }
  const StateLayout& layout() const override { return layout_; }
  double mass_weight() const override { return 1.0; }
  void rhs(const Vec& u, Vec& out) const override { out.assign(u.size(), 0.0); }
  const std::vector<Invariant>& invariants() const override { return invariants_; }

 private:
  StateLayout layout_;
  std::vector<Invariant> invariants_;
};

double linear_dispersive_speed(double k) { return 1.0 / (1.0 + k * k); }

}  // namespace

TEST_CASE("tsit5 tableau satisfies the order conditions") {
  const auto& tb = tsit5();
  REQUIRE(tb.stages == 7);

  SECTION("row sums match c to 1e-14") {
    for (std::size_t i = 0; i < tb.stages; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < i; ++j) s += tb.a[i][j];
      REQUIRE(std::abs(s - tb.c[i]) <= 1e-14);
    }
  }
  SECTION("quadrature conditions for b and the embedded weights") {
    auto moment = [&](const std::vector<double>& w, int p) {
      double s = 0.0;
      for (std::size_t i = 0; i < tb.stages; ++i) s += w[i] * std::pow(tb.c[i], p);
      return s;
    };
    std::vector<double> bhat(tb.stages);
    for (std::size_t i = 0; i < tb.stages; ++i) bhat[i] = tb.b[i] - tb.btilde[i];

    REQUIRE(std::abs(moment(tb.b, 0) - 1.0) <= 1e-14);
    for (int p = 1; p <= 4; ++p)
      REQUIRE(std::abs(moment(tb.b, p) - 1.0 / (p + 1)) <= 1e-12);
    REQUIRE(std::abs(moment(bhat, 0) - 1.0) <= 1e-13);
    for (int p = 1; p <= 3; ++p)
      REQUIRE(std::abs(moment(bhat, p) - 1.0 / (p + 1)) <= 1e-12);

    // one deeper tree per order: sum_i b_i a_ij c_j = 1/6, etc.
    double bac = 0.0, bcac = 0.0, baac = 0.0, bacc = 0.0;
    for (std::size_t i = 0; i < tb.stages; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        bac += tb.b[i] * tb.a[i][j] * tb.c[j];
        bcac += tb.b[i] * tb.c[i] * tb.a[i][j] * tb.c[j];
        bacc += tb.b[i] * tb.a[i][j] * tb.c[j] * tb.c[j];
        for (std::size_t m = 0; m < j; ++m) baac += tb.b[i] * tb.a[i][j] * tb.a[j][m] * tb.c[m];
      }
    REQUIRE(std::abs(bac - 1.0 / 6.0) <= 1e-12);
    REQUIRE(std::abs(bcac - 1.0 / 8.0) <= 1e-12);
    REQUIRE(std::abs(bacc - 1.0 / 12.0) <= 1e-12);
    REQUIRE(std::abs(baac - 1.0 / 24.0) <= 1e-12);
  }
}

TEST_CASE("one fixed step of the pair on u' = u") {
  auto model = std::make_shared<ExpModel>();
  StepController ctrl;
  ctrl.fixed_dt = 0.1;
  auto res = integrate(model, Vec{1.0}, 0.0, 0.1, ctrl, StepMode::baseline());
  REQUIRE(res.status == RunStatus::ok);
  REQUIRE(res.accepted_steps == 1);
  REQUIRE(std::abs(res.state[0] - std::exp(0.1)) <= 1e-8);
}

TEST_CASE("zero right-hand side: candidate equals state, zero error") {
  auto model = std::make_shared<ZeroModel>();
  StepController ctrl;
  ctrl.fixed_dt = 0.5;
  Vec u0 = {1.0, -2.0, 3.0, 0.25};
  auto res = integrate(model, u0, 0.0, 1.0, ctrl, StepMode::baseline());
  REQUIRE(res.status == RunStatus::ok);
  REQUIRE(res.state == u0);
}

TEST_CASE("t_final equal to t0 returns the initial state with zero steps") {
  auto model = std::make_shared<ExpModel>();
  auto res = integrate(model, Vec{2.0}, 0.0, 0.0, StepController::with_tolerance(1e-8),
                       StepMode::baseline());
  REQUIRE(res.status == RunStatus::ok);
  REQUIRE(res.accepted_steps == 0);
  REQUIRE(res.state[0] == 2.0);
}

TEST_CASE("fixed-dt sweep on the linear dispersive model shows order 5") {
  const PeriodicGrid g(-1.0, 1.0, 1u << 6);
  auto model = conserva::testing::make_1d(ModelId::linear_dispersive, g);
  const double k = pi;
  const double c = linear_dispersive_speed(k);
  Vec u0 = sample(g, [&](double x) { return std::sin(k * x); });

  auto global_error = [&](double dt, const StepMode& mode) {
    StepController ctrl;
    ctrl.fixed_dt = dt;
    auto res = integrate(model, u0, 0.0, 1.0, ctrl, mode);
    REQUIRE(res.status == RunStatus::ok);
    Vec exact = sample(g, [&](double x) { return std::sin(k * (x - c * res.t)); });
    double e2 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
      e2 += (res.state[j] - exact[j]) * (res.state[j] - exact[j]);
    return std::sqrt(g.spacing() * e2);
  };

  for (const StepMode& mode : {StepMode::baseline(), StepMode::relaxation("energy")}) {
    std::vector<double> dts = {0.5, 0.25, 0.125, 0.0625};
    std::vector<double> errs;
    for (double dt : dts) errs.push_back(global_error(dt, mode));
    // least-squares slope of log(err) vs log(dt)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
      const double x = std::log(dts[i]), y = std::log(errs[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double nn = static_cast<double>(dts.size());
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    INFO("mode " << to_string(mode.kind) << " observed order " << slope);
    REQUIRE(slope >= 4.5);
    REQUIRE(slope <= 5.5);
  }
}

TEST_CASE("relaxation gamma solves the scalar quadratic oracle") {
  // J(u) = u^T u, state (1, 0), dt*d = (-0.005, 0.1):
  // the quadratic 2 gamma u.e + gamma^2 |e|^2 = 0 has the nonzero root
  // gamma = 0.01 / 0.010025.
  auto J = [](const Vec& v) { return v[0] * v[0] + v[1] * v[1]; };
  Vec u = {1.0, 0.0};
  Vec d = {-0.005, 0.1};
  auto res = relaxation_gamma(J, u, d, 1.0);
  REQUIRE(res.converged);
  REQUIRE(std::abs(res.x - 0.01 / 0.010025) <= 1e-12);

  SECTION("zero direction returns exactly 1") {
    Vec z = {0.0, 0.0};
    auto r0 = relaxation_gamma(J, u, z, 1.0);
    REQUIRE(r0.converged);
    REQUIRE(r0.x == 1.0);
  }
  SECTION("no root in [0.5, 1.5] fails") {
    // J strictly increasing along d from u: r(gamma) has no second root
    auto Jlin = [](const Vec& v) { return v[0]; };
    Vec dd = {1.0, 0.0};
    auto r = relaxation_gamma(Jlin, u, dd, 1.0);
    REQUIRE_FALSE(r.converged);
  }
}

TEST_CASE("relaxation conserves the target invariant and the masses per step") {
  const PeriodicGrid g(-80.0, 80.0, 1u << 8);
  auto model = conserva::testing::make_1d(ModelId::fornberg_whitham, g);
  Rng rng(31);
  Vec u0 = conserva::testing::smooth_field(rng, g, 0.4);

  const auto& I = model->invariant("secondary");
  const auto& mass = model->invariant("mass");
  const double i0 = I.value(u0);
  const double m0 = mass.value(u0);

  auto res = integrate(model, u0, 0.0, 5.0, StepController::with_tolerance(1e-5),
                       StepMode::relaxation("secondary"));
  REQUIRE(res.status == RunStatus::ok);
  REQUIRE(res.accepted_steps > 0);
  const double drift_i = std::abs(I.value(res.state) - i0) / (1.0 + std::abs(i0));
  const double drift_m = std::abs(mass.value(res.state) - m0) / (1.0 + std::abs(m0));
  REQUIRE(drift_i <= static_cast<double>(res.accepted_steps) * 1e-13);
  REQUIRE(drift_m <= static_cast<double>(res.accepted_steps) * 1e-13);
}

TEST_CASE("relaxation gamma approaches 1 at fourth order in dt") {
  const PeriodicGrid g(-40.0, 40.0, 1u << 7);
  auto model = conserva::testing::make_1d(ModelId::camassa_holm, g);
  // asymmetric state; a symmetric bump makes the leading dt^4 term of
  // gamma - 1 anomalously small and skews the measured rate
  Vec u0 = sample(g, [&](double x) {
    return 1.0 + 0.5 * std::exp(-0.25 * x * x) +
           0.2 * std::sin(6.0 * pi * x / g.length());
  });

  auto mean_gamma_dev = [&](double dt) {
    StepController ctrl;
    ctrl.fixed_dt = dt;
    Integrator integ(model, StepMode::relaxation("secondary"), ctrl);
    integ.set_state(u0, 0.0);
    double acc = 0.0;
    std::size_t count = 0;
    integ.set_observer([&](const StepRecord& r, const Vec&) {
      acc += std::abs(r.gamma - 1.0);
      ++count;
    });
    REQUIRE(integ.advance_to(4.0) == RunStatus::ok);
    return acc / static_cast<double>(count);
  };

  const double g1 = mean_gamma_dev(0.2);
  const double g2 = mean_gamma_dev(0.1);
  const double rate = std::log2(g1 / g2);
  INFO("gamma deviation scaling exponent " << rate);
  REQUIRE(rate >= 3.5);
  REQUIRE(rate <= 4.5);
}

TEST_CASE("projection returns to the level set along the gradient") {
  // J(u) = u^T u with J0 = 1: candidate (1.1, 0) projects to (1, 0).
  auto J = [](const Vec& v) { return v[0] * v[0] + v[1] * v[1]; };
  auto grad = [](const Vec& v) {
    Vec g(v);
    for (double& x : g) x *= 2.0;
    return g;
  };
  auto ip = [](const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; };
  Vec cand = {1.1, 0.0};
  REQUIRE(orthogonal_projection(J, grad, ip, 1.0, cand));
  REQUIRE(std::abs(cand[0] - 1.0) <= 1e-12);
  REQUIRE(std::abs(cand[1]) <= 1e-15);

  SECTION("candidate already on the level set is unchanged") {
    Vec on = {1.0, 0.0};
    REQUIRE(orthogonal_projection(J, grad, ip, 1.0, on));
    REQUIRE(on[0] == 1.0);
  }
}

TEST_CASE("adaptive integration of the linear model tracks the exact solution") {
  const PeriodicGrid g(-1.0, 1.0, 1u << 6);
  auto model = conserva::testing::make_1d(ModelId::linear_dispersive, g);
  const double k = 2.0 * pi;  // second harmonic: c = 1/(1 + 4 pi^2)
  const double c = linear_dispersive_speed(k);
  Vec u0 = sample(g, [&](double x) { return std::sin(k * x); });

  for (const StepMode& mode : {StepMode::baseline(), StepMode::relaxation("energy")}) {
    auto res = integrate(model, u0, 0.0, 10.0, StepController::with_tolerance(1e-5), mode);
    REQUIRE(res.status == RunStatus::ok);
    Vec exact = sample(g, [&](double x) { return std::sin(k * (x - c * res.t)); });
    double e2 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
      e2 += (res.state[j] - exact[j]) * (res.state[j] - exact[j]);
    const double err = std::sqrt(g.spacing() * e2);
    INFO("mode " << to_string(mode.kind));
    REQUIRE(err <= 1e-4);
  }
}

TEST_CASE("blow-up is reported with the failure time") {
  // u' = u^2 blows up at t = 1 from u(0) = 1
  class RiccatiModel final : public Model {
   public:
    RiccatiModel() {
      layout_.components = {"u"};
      layout_.points = 1;
    }
    ModelId id() const override { return ModelId::kdv; }
    const StateLayout& layout() const override { return layout_; }
    double mass_weight() const override { return 1.0; }
    void rhs(const Vec& u, Vec& out) const override {
      require_finite(u);
      out.assign(1, u[0] * u[0]);
    }
    const std::vector<Invariant>& invariants() const override { return invariants_; }

   private:
    StateLayout layout_;
    std::vector<Invariant> invariants_;
  };
  auto model = std::make_shared<RiccatiModel>();
  auto res = integrate(model, Vec{1.0}, 0.0, 2.0, StepController::with_tolerance(1e-6),
                       StepMode::baseline());
  REQUIRE(res.status != RunStatus::ok);
  REQUIRE(res.t < 2.0);
  REQUIRE_FALSE(res.message.empty());
}

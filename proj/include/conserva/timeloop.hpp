#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "conserva/model.hpp"
#include "conserva/rootfind.hpp"
#include "conserva/tableau.hpp"

namespace conserva {

enum class StepModeKind { baseline, relaxation, projection };

struct StepMode {
  StepModeKind kind = StepModeKind::baseline;
  std::string invariant;  // target of relaxation / projection

  static StepMode baseline() { return {StepModeKind::baseline, {}}; }
  static StepMode relaxation(std::string inv) { return {StepModeKind::relaxation, std::move(inv)}; }
  static StepMode projection(std::string inv) { return {StepModeKind::projection, std::move(inv)}; }
};

inline std::string_view to_string(StepModeKind k) {
  switch (k) {
    case StepModeKind::baseline: return "baseline";
    case StepModeKind::relaxation: return "relaxation";
    case StepModeKind::projection: return "projection";
  }
  return "?";
}

/// PI step-size controller settings; exponents (0.7/p_hat, -0.4/p_hat) with
/// safety 0.9 and ratio clamp [0.2, 5].  fixed_dt > 0 disables adaptivity.
struct StepController {
  double abs_tol = 1e-6;
  double rel_tol = 1e-6;
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
  double dt_init = 0.0;   // 0: use the starting-step heuristic
  double fixed_dt = 0.0;  // > 0: step with exactly this dt

  static StepController with_tolerance(double tol) {
    StepController c;
    c.abs_tol = c.rel_tol = tol;
    return c;
  }
};

struct StepRecord {
  double t = 0.0;      // time after the step
  double dt = 0.0;     // dt used by the Runge-Kutta step
  double gamma = 1.0;  // 1 for baseline / projection
  double error_estimate = 0.0;
  bool accepted = true;
};

enum class RunStatus { ok, blow_up, step_failure, relaxation_failure, projection_failure };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::blow_up: return "blow_up";
    case RunStatus::step_failure: return "step_failure";
    case RunStatus::relaxation_failure: return "relaxation_failure";
    case RunStatus::projection_failure: return "projection_failure";
  }
  return "?";
}

/// Relaxation parameter: the root of J(u + gamma dt d) = J(u) near gamma = 1,
/// located by bracketing from [1 - 0.1, 1 + 0.1] with geometric expansion up
/// to [0.5, 1.5].  Returns exactly 1 when r(1) already meets the tolerance.
template <typename JFun>
RootResult relaxation_gamma(JFun&& J, const Vec& u, const Vec& d, double dt) {
  Vec trial(u.size());
  const double j0 = J(u);
  const double tol = 1e-13 * (1.0 + std::abs(j0));
  auto r = [&](double gamma) {
    for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + gamma * dt * d[i];
    return J(trial) - j0;
  };
  const double r1 = r(1.0);
  if (std::abs(r1) <= tol) return {1.0, r1, true, 0};

  double delta = 0.1;
  double lo = 1.0 - delta, hi = 1.0 + delta;
  double rlo = r(lo), rhi = r(hi);
  while ((rlo > 0.0) == (rhi > 0.0)) {
    if (delta >= 0.5) return {1.0, r1, false, 0};  // no sign change in [0.5, 1.5]
    delta = std::min(2.0 * delta, 0.5);
    lo = 1.0 - delta;
    hi = 1.0 + delta;
    rlo = r(lo);
    rhi = r(hi);
  }
  // drive the residual to rounding level, then check the contract
  RootResult res = brent_root(r, lo, hi, rlo, rhi, 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(j0)));
  res.converged = std::abs(res.fx) <= tol;
  return res;
}

/// Orthogonal projection of `candidate` onto the level set J = j_target along
/// grad J(candidate) by safeguarded Newton (bisection fallback on a bracket
/// once one is found).  Returns false if 50 iterations do not converge.
template <typename JFun, typename GradFun, typename IpFun>
bool orthogonal_projection(JFun&& J, GradFun&& grad, IpFun&& mass_ip, double j_target,
                           Vec& candidate) {
  const double tol = 1e-13 * (1.0 + std::abs(j_target));
  const Vec g = grad(candidate);
  Vec trial(candidate.size());
  auto phi = [&](double lam) {
    for (std::size_t i = 0; i < candidate.size(); ++i) trial[i] = candidate[i] + lam * g[i];
    return J(trial) - j_target;
  };
  double lam = 0.0;
  double f = phi(0.0);
  if (std::abs(f) <= tol) return true;  // already on the level set
  double lo = 0.0, hi = 0.0, flo = f, fhi = f;
  bool bracketed = false;
  for (int iter = 0; iter < 50; ++iter) {
    // phi'(lam) = <grad J(candidate + lam g), g>_M
    const Vec gl = grad(trial);
    const double slope = mass_ip(gl, g);
    double next;
    if (slope != 0.0 && std::isfinite(slope)) {
      next = lam - f / slope;
    } else {
      next = lam + (f > 0.0 ? -1.0 : 1.0) * std::max(1e-8, std::abs(lam));
    }
    if (bracketed && (next <= std::min(lo, hi) || next >= std::max(lo, hi)))
      next = 0.5 * (lo + hi);
    const double fn = phi(next);
    if ((fn > 0.0) != (f > 0.0)) {
      lo = lam;
      flo = f;
      hi = next;
      fhi = fn;
      bracketed = true;
    } else if (bracketed && (fn > 0.0) != (flo > 0.0)) {
      hi = next;
      fhi = fn;
    }
    lam = next;
    f = fn;
    if (std::abs(f) <= tol) {
      for (std::size_t i = 0; i < candidate.size(); ++i) candidate[i] += lam * g[i];
      return true;
    }
  }
  (void)flo;
  (void)fhi;
  return false;
}

/// Adaptive embedded Runge-Kutta integrator with optional per-step
/// relaxation or orthogonal projection.  Single-threaded per instance;
/// independent instances may run concurrently.
class Integrator {
 public:
  Integrator(std::shared_ptr<const Model> model, StepMode mode, StepController ctrl,
             const ButcherTableau& tableau = tsit5())
      : model_(std::move(model)), mode_(std::move(mode)), ctrl_(ctrl), tb_(tableau) {
    if (mode_.kind != StepModeKind::baseline) target_ = &model_->invariant(mode_.invariant);
    k_.assign(tb_.stages, Vec());
  }

  void set_state(Vec u0, double t0) {
    u_ = std::move(u0);
    t_ = t0;
    dt_next_ = 0.0;
    err_prev_ = 1.0;
    failed_ = false;
    if (target_) j_anchor_ = target_->value(u_);
  }

  const Vec& state() const { return u_; }
  double time() const { return t_; }
  const StepRecord& last_step() const { return last_; }
  RunStatus status() const { return status_; }
  const std::string& failure_message() const { return message_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }

  void set_observer(std::function<void(const StepRecord&, const Vec&)> obs) {
    observer_ = std::move(obs);
  }

  /// Advance until the reached time equals t_target -- exactly for baseline
  /// and projection, within one gamma adjustment of the final step under
  /// relaxation.
  RunStatus advance_to(double t_target) {
    if (failed_) return status_;
    const double tiny = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_target));
    int consecutive_failures = 0;
    while (t_ < t_target - tiny) {
      if (dt_next_ <= 0.0) dt_next_ = initial_step(t_target);
      double dt = ctrl_.fixed_dt > 0.0 ? ctrl_.fixed_dt : dt_next_;
      bool clipped = false;
      if (t_ + dt >= t_target - tiny) {
        dt = t_target - t_;
        clipped = true;
      }
      if (dt <= tiny) break;

      double err = 0.0;
      bool stage_ok = true;
      try {
        err = compute_stages(dt);
      } catch (const BlowUpError&) {
        stage_ok = false;
      }

      const bool adaptive = ctrl_.fixed_dt <= 0.0;
      if (!stage_ok || !std::isfinite(err)) {
        if (!adaptive) return fail(RunStatus::blow_up, "non-finite state during fixed-dt step");
        dt_next_ = 0.5 * dt;
        if (++consecutive_failures > 30 || dt_next_ < step_floor())
          return fail(RunStatus::blow_up, "repeated blow-up while shrinking the step");
        continue;
      }
      if (adaptive && err > 1.0) {
        ++rejected_;
        const double fac = std::max(ctrl_.min_factor, ctrl_.safety * std::pow(err, -0.2));
        dt_next_ = dt * std::min(fac, 0.9);
        if (++consecutive_failures > 60 || dt_next_ < step_floor())
          return fail(RunStatus::step_failure, "step size underflow under error control");
        continue;
      }

      // accept path
      double gamma = 1.0;
      if (mode_.kind == StepModeKind::relaxation) {
        auto res = relaxation_gamma([this](const Vec& v) { return target_->value(v); }, u_, d_, dt);
        if (!res.converged) {
          ++rejected_;
          dt_next_ = 0.5 * dt;
          if (++consecutive_failures > 10 || dt_next_ < step_floor())
            return fail(RunStatus::relaxation_failure, "no relaxation root in [0.5, 1.5]");
          continue;
        }
        gamma = res.x;
        for (std::size_t i = 0; i < u_.size(); ++i) u_[i] += gamma * dt * d_[i];
        t_ += gamma * dt;
      } else if (mode_.kind == StepModeKind::projection) {
        Vec candidate(u_.size());
        for (std::size_t i = 0; i < u_.size(); ++i) candidate[i] = u_[i] + dt * d_[i];
        const bool ok = orthogonal_projection(
            [this](const Vec& v) { return target_->value(v); },
            [this](const Vec& v) { return target_->m_gradient(v); },
            [this](const Vec& a, const Vec& b) { return model_->mass_ip(a, b); }, j_anchor_,
            candidate);
        if (!ok) {
          ++rejected_;
          dt_next_ = 0.5 * dt;
          if (++consecutive_failures > 10 || dt_next_ < step_floor())
            return fail(RunStatus::projection_failure, "projection Newton did not converge");
          continue;
        }
        u_ = std::move(candidate);
        t_ += dt;
      } else {
        for (std::size_t i = 0; i < u_.size(); ++i) u_[i] += dt * d_[i];
        t_ += dt;
      }

      ++accepted_;
      consecutive_failures = 0;
      last_ = {t_, dt, gamma, err, true};
      if (adaptive) {
        const double e = std::max(err, 1e-10);
        double fac = ctrl_.safety * std::pow(e, -0.7 / 4.0) * std::pow(err_prev_, 0.4 / 4.0);
        fac = std::clamp(fac, ctrl_.min_factor, ctrl_.max_factor);
        dt_next_ = dt * fac;
        err_prev_ = e;
      }
      if (observer_) observer_(last_, u_);
      if (clipped) break;
    }
    return RunStatus::ok;
  }

 private:
  double step_floor() const {
    return 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
  }

  RunStatus fail(RunStatus s, std::string msg) {
    failed_ = true;
    status_ = s;
    message_ = std::move(msg) + " at t = " + std::to_string(t_);
    return s;
  }

  /// Runs the explicit stages; fills d_ and returns the scaled error norm.
  /// M is a multiple of the identity, so the M-weighted scaled norm is the
  /// plain RMS of the componentwise-scaled error.
  double compute_stages(double dt) {
    const std::size_t n = u_.size();
    Vec y(n);
    for (std::size_t i = 0; i < tb_.stages; ++i) {
      y = u_;
      for (std::size_t j = 0; j < i; ++j) {
        const double aij = tb_.a[i][j];
        if (aij == 0.0) continue;
        const Vec& kj = k_[j];
        for (std::size_t m = 0; m < n; ++m) y[m] += dt * aij * kj[m];
      }
      model_->rhs(y, k_[i]);
    }
    d_.assign(n, 0.0);
    for (std::size_t i = 0; i < tb_.stages; ++i) {
      const double bi = tb_.b[i];
      if (bi == 0.0) continue;
      const Vec& ki = k_[i];
      for (std::size_t m = 0; m < n; ++m) d_[m] += bi * ki[m];
    }
    if (!all_finite(d_)) throw BlowUpError("non-finite update direction");
    double sumsq = 0.0;
    Vec ev(n, 0.0);
    for (std::size_t i = 0; i < tb_.stages; ++i) {
      const double wi = tb_.btilde[i];
      if (wi == 0.0) continue;
      const Vec& ki = k_[i];
      for (std::size_t m = 0; m < n; ++m) ev[m] += wi * ki[m];
    }
    for (std::size_t m = 0; m < n; ++m) {
      const double unew = u_[m] + dt * d_[m];
      const double sc = ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(u_[m]), std::abs(unew));
      const double e = dt * ev[m] / sc;
      sumsq += e * e;
    }
    return std::sqrt(sumsq / static_cast<double>(n));
  }

  /// Starting-step heuristic from the error tolerance (explicit order-5 pair).
  double initial_step(double t_target) {
    if (ctrl_.dt_init > 0.0) return ctrl_.dt_init;
    if (ctrl_.fixed_dt > 0.0) return ctrl_.fixed_dt;
    const std::size_t n = u_.size();
    Vec f0(n);
    model_->rhs(u_, f0);
    auto scaled_rms = [&](const Vec& v) {
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double sc = ctrl_.abs_tol + ctrl_.rel_tol * std::abs(u_[m]);
        s += (v[m] / sc) * (v[m] / sc);
      }
      return std::sqrt(s / static_cast<double>(n));
    };
    const double d0 = scaled_rms(u_);
    const double d1 = scaled_rms(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(t_target - t_));
    Vec u1(n), f1(n);
    for (std::size_t m = 0; m < n; ++m) u1[m] = u_[m] + h0 * f0[m];
    double d2 = 0.0;
    try {
      model_->rhs(u1, f1);
      for (std::size_t m = 0; m < n; ++m) f1[m] -= f0[m];
      d2 = scaled_rms(f1) / h0;
    } catch (const BlowUpError&) {
      d2 = 1.0 / h0;
    }
    double h1;
    if (std::max(d1, d2) <= 1e-15)
      h1 = std::max(1e-6, h0 * 1e-3);
    else
      h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 6.0);
    return std::min(100.0 * h0, h1);
  }

  std::shared_ptr<const Model> model_;
  StepMode mode_;
  StepController ctrl_;
  ButcherTableau tb_;
  const Invariant* target_ = nullptr;

  Vec u_, d_;
  std::vector<Vec> k_;
  double t_ = 0.0;
  double dt_next_ = 0.0;
  double err_prev_ = 1.0;
  double j_anchor_ = 0.0;
  bool failed_ = false;
  RunStatus status_ = RunStatus::ok;
  std::string message_;
  StepRecord last_;
  std::size_t accepted_ = 0, rejected_ = 0;
  std::function<void(const StepRecord&, const Vec&)> observer_;
};

struct IntegrationResult {
  RunStatus status = RunStatus::ok;
  double t = 0.0;
  Vec state;
  std::string message;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// One-shot convenience wrapper around Integrator.
inline IntegrationResult integrate(std::shared_ptr<const Model> model, Vec u0, double t0,
                                   double t_final, const StepController& ctrl, const StepMode& mode,
                                   std::function<void(const StepRecord&, const Vec&)> observer = {}) {
  Integrator integ(std::move(model), mode, ctrl);
  integ.set_state(std::move(u0), t0);
  if (observer) integ.set_observer(std::move(observer));
  const RunStatus s = integ.advance_to(t_final);
  return {s, integ.time(), integ.state(), std::string(integ.failure_message()),
          integ.accepted_steps(), integ.rejected_steps()};
}

}  // namespace conserva

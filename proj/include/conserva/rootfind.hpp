#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace conserva {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Brent's method on a sign-changing bracket [a, b].  Iterates until the
/// bracket collapses to floating point resolution or |f| drops below ftol,
/// whichever comes first.
template <typename F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb, double ftol,
                      int max_iter = 200) {
  if (fa == 0.0) return {a, 0.0, true, 0};
  if (fb == 0.0) return {b, 0.0, true, 0};
  if ((fa > 0.0) == (fb > 0.0)) throw std::invalid_argument("brent_root: no sign change");

  double c = a, fc = fa;
  double d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * eps;
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= ftol) return {b, fb, true, iter};
    if (std::abs(xm) <= tol1) return {b, fb, std::abs(fb) <= ftol, iter};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // inverse quadratic / secant step
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return {b, fb, std::abs(fb) <= ftol, max_iter};
}

}  // namespace conserva

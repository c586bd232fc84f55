#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace conserva {

using Vec = std::vector<double>;

/// Compensated (Kahan) summation.  All reductions in the library go through
/// these so that functional evaluations stay reproducible and accurate enough
/// for the 1e-13-level conservation checks.
inline double kahan_sum(const double* v, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = v[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

inline double kahan_sum(const Vec& v) { return kahan_sum(v.data(), v.size()); }

inline double kahan_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = a[i] * b[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

inline double kahan_dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kahan_dot: length mismatch");
  return kahan_dot(a.data(), b.data(), a.size());
}

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Deterministic uniform doubles in [0, 1).  Distributions from <random> are
/// not portable across standard libraries, so the mapping from raw bits is
/// done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_bits() {
    // xorshift64*
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  double uniform() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Shortest decimal representation that round-trips a double (17 significant
/// digits); used for every float that ends up in a CSV or JSON artifact.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace conserva

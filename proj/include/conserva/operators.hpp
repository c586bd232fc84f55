#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "conserva/core.hpp"
#include "conserva/fft.hpp"
#include "conserva/grid.hpp"

namespace conserva {

enum class OperatorKind { fourier, finite_difference };
enum class Deriv { d1, d2, d4 };

class OperatorSet;

/// Inverse of L = c0*I + c2*D2 + c4*D4 for a given operator set.  Periodic
/// constant-coefficient stencils are circulant, so the solve is an exact
/// per-mode division by the real circulant symbol.
class EllipticInverse {
 public:
  EllipticInverse(const OperatorSet& ops, double c0, double c2, double c4);

  void solve(const Vec& v, Vec& out) const;
  Vec solve(const Vec& v) const {
    Vec out(n_);
    solve(v, out);
    return out;
  }

  double c0() const { return c0_; }
  double c2() const { return c2_; }
  double c4() const { return c4_; }

  /// max |symbol| / min |symbol|; bounds the roundoff of solve-then-apply
  /// round trips.
  double condition() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double d : denom_) {
      lo = std::min(lo, std::abs(d));
      hi = std::max(hi, std::abs(d));
    }
    return hi / lo;
  }

 private:
  std::shared_ptr<const RealFft> fft_;
  std::vector<double> denom_;
  double c0_, c2_, c4_;
  std::size_t n_ = 0;
};

/// Periodic derivative operators D1, D2, D4 with the diagonal mass matrix
/// M = spacing * I.  Both kinds satisfy M D1 + D1^T M = 0, M D2 = -A2 and
/// M D4 = A4 with A2, A4 symmetric positive semidefinite, and all operators
/// commute (they are circulant).  Applications are matrix-free.
class OperatorSet {
 public:
  static OperatorSet fourier(const PeriodicGrid& grid) { return OperatorSet(grid, OperatorKind::fourier, 0); }

  static OperatorSet finite_difference(const PeriodicGrid& grid, int order) {
    return OperatorSet(grid, OperatorKind::finite_difference, order);
  }

  OperatorKind kind() const { return kind_; }
  int order() const { return order_; }
  const PeriodicGrid& grid() const { return grid_; }
  std::size_t n() const { return grid_.n; }
  double mass_weight() const { return grid_.spacing(); }
  std::shared_ptr<const RealFft> fft() const { return fft_; }

  void apply(Deriv which, const Vec& v, Vec& out) const {
    switch (which) {
      case Deriv::d1: apply_d1(v, out); break;
      case Deriv::d2: apply_d2(v, out); break;
      case Deriv::d4: apply_d4(v, out); break;
    }
  }

  Vec apply(Deriv which, const Vec& v) const {
    Vec out(n());
    apply(which, v, out);
    return out;
  }

  void apply_d1(const Vec& v, Vec& out) const {
    check_length(v);
    out.resize(n());
    if (kind_ == OperatorKind::fourier) {
      spectral_apply(v, out, SymbolUse::d1);
    } else {
      stencil_antisymmetric(v, out, d1_coeff_);
    }
  }

  void apply_d2(const Vec& v, Vec& out) const {
    check_length(v);
    out.resize(n());
    if (kind_ == OperatorKind::fourier) {
      spectral_apply(v, out, SymbolUse::d2);
    } else {
      const double h = grid_.spacing();
      stencil_symmetric(v, out, d2_coeff_, 1.0 / (h * h));
    }
  }

  void apply_d4(const Vec& v, Vec& out) const {
    check_length(v);
    out.resize(n());
    if (kind_ == OperatorKind::fourier) {
      spectral_apply(v, out, SymbolUse::d4);
    } else {
      const double h = grid_.spacing();
      stencil_symmetric(v, out, d4_coeff_, 1.0 / (h * h * h * h));
    }
  }

  Vec d1(const Vec& v) const { return apply(Deriv::d1, v); }
  Vec d2(const Vec& v) const { return apply(Deriv::d2, v); }
  Vec d4(const Vec& v) const { return apply(Deriv::d4, v); }

  /// u^T M v = spacing * sum_j u_j v_j.
  double mass_inner_product(const Vec& u, const Vec& v) const {
    if (u.size() != n() || v.size() != n())
      throw std::invalid_argument("mass_inner_product: length mismatch");
    return mass_weight() * kahan_dot(u, v);
  }

  double mass_norm(const Vec& u) const { return std::sqrt(std::max(0.0, mass_inner_product(u, u))); }

  EllipticInverse elliptic_inverse(double c0, double c2, double c4) const {
    return EllipticInverse(*this, c0, c2, c4);
  }

  /// Circulant symbol of D2 (resp. D4) at r2c mode m; exact zero at m = 0.
  double d2_symbol(std::size_t m) const { return sym2_[m]; }
  double d4_symbol(std::size_t m) const { return sym4_[m]; }
  std::size_t spectrum_size() const { return fft_->spectrum_size(); }

 private:
  enum class SymbolUse { d1, d2, d4 };

  OperatorSet(const PeriodicGrid& grid, OperatorKind kind, int order)
      : grid_(grid), kind_(kind), order_(order), fft_(std::make_shared<RealFft>(grid.n)) {
    if (kind_ == OperatorKind::finite_difference) {
      build_stencils(order);
      const std::size_t width = 2 * d4_coeff_.size() + 1;
      if (grid_.n < width)
        throw std::invalid_argument("OperatorSet: grid too small for requested stencil");
    }
    build_symbols();
  }

  void check_length(const Vec& v) const {
    if (v.size() != n()) throw std::invalid_argument("OperatorSet: length mismatch");
  }

  void spectral_apply(const Vec& v, Vec& out, SymbolUse use) const {
    const std::size_t ns = fft_->spectrum_size();
    std::vector<Complex> sp(ns);
    fft_->forward(v.data(), sp.data());
    const double two_pi = 2.0 * std::numbers::pi;
    const double dk = two_pi / grid_.length();
    const bool even = grid_.n % 2 == 0;
    for (std::size_t m = 0; m < ns; ++m) {
      const bool nyquist = even && m == ns - 1;
      const double k = dk * static_cast<double>(m);
      switch (use) {
        case SymbolUse::d1:
          // D1 zeroes the Nyquist mode so that it is exactly skew-symmetric;
          // D2 = D1^2 and D4 = D1^4 then hold as operator identities.
          sp[m] = nyquist ? Complex(0.0, 0.0) : Complex(-k * sp[m].imag(), k * sp[m].real());
          break;
        case SymbolUse::d2:
          sp[m] *= nyquist ? 0.0 : -k * k;
          break;
        case SymbolUse::d4:
          sp[m] *= nyquist ? 0.0 : k * k * k * k;
          break;
      }
    }
    fft_->inverse(sp.data(), out.data());
  }

  // D1 u_i = (1/h) sum_j a_j (u_{i+j} - u_{i-j}); exact on constants.
  void stencil_antisymmetric(const Vec& v, Vec& out, const std::vector<double>& a) const {
    const std::size_t nn = n();
    const std::ptrdiff_t w = static_cast<std::ptrdiff_t>(a.size());
    const double invh = 1.0 / grid_.spacing();
    for (std::size_t i = 0; i < nn; ++i) {
      double s = 0.0;
      for (std::ptrdiff_t j = 1; j <= w; ++j) {
        const std::size_t ip = wrap(static_cast<std::ptrdiff_t>(i) + j, nn);
        const std::size_t im = wrap(static_cast<std::ptrdiff_t>(i) - j, nn);
        s += a[static_cast<std::size_t>(j - 1)] * (v[ip] - v[im]);
      }
      out[i] = s * invh;
    }
  }

  // D2 u_i = (1/h^2) sum_j b_j ((u_{i+j} - u_i) + (u_{i-j} - u_i)), using the
  // zero-sum property of consistent stencils; exact on constants.
  void stencil_symmetric(const Vec& v, Vec& out, const std::vector<double>& b, double scale) const {
    const std::size_t nn = n();
    const std::ptrdiff_t w = static_cast<std::ptrdiff_t>(b.size());
    for (std::size_t i = 0; i < nn; ++i) {
      double s = 0.0;
      const double ui = v[i];
      for (std::ptrdiff_t j = 1; j <= w; ++j) {
        const std::size_t ip = wrap(static_cast<std::ptrdiff_t>(i) + j, nn);
        const std::size_t im = wrap(static_cast<std::ptrdiff_t>(i) - j, nn);
        s += b[static_cast<std::size_t>(j - 1)] * ((v[ip] - ui) + (v[im] - ui));
      }
      out[i] = s * scale;
    }
  }

  static std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
    if (i >= nn) i -= nn;
    if (i < 0) i += nn;
    return static_cast<std::size_t>(i);
  }

  void build_stencils(int order) {
    switch (order) {
      case 2:
        d1_coeff_ = {1.0 / 2.0};
        d2_coeff_ = {1.0};
        break;
      case 4:
        d1_coeff_ = {2.0 / 3.0, -1.0 / 12.0};
        d2_coeff_ = {4.0 / 3.0, -1.0 / 12.0};
        break;
      case 6:
        d1_coeff_ = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
        d2_coeff_ = {3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
        break;
      case 8:
        d1_coeff_ = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
        d2_coeff_ = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
        break;
      default:
        throw std::invalid_argument("OperatorSet: finite difference order must be one of 2, 4, 6, 8");
    }
    // D4 := D2 * D2.  The composition of circulant stencils is the circulant
    // with the convolved coefficients; M D4 = (M D2)^T M^{-1} (M D2) is then
    // positive semidefinite by construction.
    const std::size_t m = d2_coeff_.size();
    std::vector<double> full(2 * m + 1, 0.0);  // full[j + m] = b_j with b_0 = -2 sum b_j
    double b0 = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      full[m + j] = d2_coeff_[j - 1];
      full[m - j] = d2_coeff_[j - 1];
      b0 -= 2.0 * d2_coeff_[j - 1];
    }
    full[m] = b0;
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(2 * m);
    d4_coeff_.assign(static_cast<std::size_t>(half), 0.0);
    for (std::ptrdiff_t j = 1; j <= half; ++j) {
      double c = 0.0;
      for (std::ptrdiff_t i = -static_cast<std::ptrdiff_t>(m); i <= static_cast<std::ptrdiff_t>(m); ++i) {
        const std::ptrdiff_t k = j - i;
        if (k < -static_cast<std::ptrdiff_t>(m) || k > static_cast<std::ptrdiff_t>(m)) continue;
        c += full[static_cast<std::size_t>(i + static_cast<std::ptrdiff_t>(m))] *
             full[static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(m))];
      }
      d4_coeff_[static_cast<std::size_t>(j - 1)] = c;
    }
  }

  void build_symbols() {
    const std::size_t ns = fft_->spectrum_size();
    sym2_.assign(ns, 0.0);
    sym4_.assign(ns, 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    const bool even = grid_.n % 2 == 0;
    if (kind_ == OperatorKind::fourier) {
      const double dk = two_pi / grid_.length();
      for (std::size_t m = 1; m < ns; ++m) {
        if (even && m == ns - 1) continue;  // Nyquist zeroed, see spectral_apply
        const double k = dk * static_cast<double>(m);
        sym2_[m] = -k * k;
        sym4_[m] = k * k * k * k;
      }
    } else {
      const double h = grid_.spacing();
      for (std::size_t m = 1; m < ns; ++m) {
        const double theta = two_pi * static_cast<double>(m) / static_cast<double>(grid_.n);
        double s2 = 0.0, s4 = 0.0;
        for (std::size_t j = 1; j <= d2_coeff_.size(); ++j)
          s2 += 2.0 * d2_coeff_[j - 1] * (std::cos(theta * static_cast<double>(j)) - 1.0);
        for (std::size_t j = 1; j <= d4_coeff_.size(); ++j)
          s4 += 2.0 * d4_coeff_[j - 1] * (std::cos(theta * static_cast<double>(j)) - 1.0);
        sym2_[m] = s2 / (h * h);
        sym4_[m] = s4 / (h * h * h * h);
      }
    }
  }

  PeriodicGrid grid_;
  OperatorKind kind_;
  int order_;
  std::shared_ptr<const RealFft> fft_;
  std::vector<double> d1_coeff_, d2_coeff_, d4_coeff_;  // one-sided stencil weights
  std::vector<double> sym2_, sym4_;                     // circulant symbols per r2c mode

  friend class EllipticInverse;
};

inline EllipticInverse::EllipticInverse(const OperatorSet& ops, double c0, double c2, double c4)
    : fft_(ops.fft()), c0_(c0), c2_(c2), c4_(c4), n_(ops.n()) {
  const std::size_t ns = fft_->spectrum_size();
  denom_.resize(ns);
  double max_abs_sym = 0.0, min_abs_sym = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < ns; ++m) {
    denom_[m] = c0 + c2 * ops.d2_symbol(m) + c4 * ops.d4_symbol(m);
    max_abs_sym = std::max(max_abs_sym, std::abs(denom_[m]));
    min_abs_sym = std::min(min_abs_sym, std::abs(denom_[m]));
  }
  if (!(min_abs_sym > 1e-12 * max_abs_sym))
    throw std::domain_error("EllipticInverse: singular or near-singular symbol");
}

inline void EllipticInverse::solve(const Vec& v, Vec& out) const {
  if (v.size() != n_) throw std::invalid_argument("EllipticInverse: length mismatch");
  out.resize(n_);
  std::vector<Complex> sp(fft_->spectrum_size());
  fft_->forward(v.data(), sp.data());
  for (std::size_t m = 0; m < sp.size(); ++m) sp[m] /= denom_[m];
  fft_->inverse(sp.data(), out.data());
}

}  // namespace conserva

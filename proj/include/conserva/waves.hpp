#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "conserva/csv.hpp"
#include "conserva/models.hpp"
#include "conserva/timeloop.hpp"

namespace conserva {

struct WaveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class WaveProvenance { petviashvili, closed_form, bootstrap };

inline std::string_view to_string(WaveProvenance p) {
  switch (p) {
    case WaveProvenance::petviashvili: return "petviashvili";
    case WaveProvenance::closed_form: return "closed_form";
    case WaveProvenance::bootstrap: return "bootstrap";
  }
  return "?";
}

inline std::optional<WaveProvenance> provenance_from_string(std::string_view s) {
  for (auto p : {WaveProvenance::petviashvili, WaveProvenance::closed_form, WaveProvenance::bootstrap})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

/// A traveling-wave (or bootstrap) profile on its generation grid, ready to
/// be used as initial data.  `residual` is the discrete L2 norm of the
/// traveling-wave equation on the generation grid (for petviashvili
/// provenance) or the periodization bound of the closed form.
struct WaveProfile {
  ModelId model = ModelId::kdv;
  StateLayout layout;
  PeriodicGrid grid;                   // x grid
  std::optional<PeriodicGrid> grid_y;  // set for 2D profiles
  Vec data;
  double speed = 0.0;
  WaveProvenance provenance = WaveProvenance::closed_form;
  double residual = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// spectral helpers

/// Exact periodic translation u(x) -> u(x - shift) by phase rotation of the
/// spectrum.  The Nyquist mode is rotated by cos(k s), which keeps the
/// result real.
inline void translate_periodic(Vec& u, const PeriodicGrid& g, double shift) {
  if (u.size() != g.n) throw std::invalid_argument("translate_periodic: length mismatch");
  RealFft fft(g.n);
  std::vector<Complex> sp(fft.spectrum_size());
  fft.forward(u.data(), sp.data());
  const double dk = 2.0 * std::numbers::pi / g.length();
  const bool even = g.n % 2 == 0;
  for (std::size_t m = 1; m < sp.size(); ++m) {
    const double k = dk * static_cast<double>(m);
    if (even && m == sp.size() - 1) {
      sp[m] *= std::cos(k * shift);
    } else {
      sp[m] *= std::polar(1.0, -k * shift);
    }
  }
  fft.inverse(sp.data(), u.data());
}

inline Vec translated_periodic(const Vec& u, const PeriodicGrid& g, double shift) {
  Vec out(u);
  translate_periodic(out, g, shift);
  return out;
}

/// Translates every component of a flat state along x.  1D states translate
/// as a whole; 2D (row-major, x fastest) states translate row by row.
inline Vec translate_state_x(const Vec& state, const StateLayout& layout, const PeriodicGrid& gx,
                             double shift) {
  Vec out(state.size());
  if (layout.ny == 0) {
    for (std::size_t c = 0; c < layout.components.size(); ++c) {
      Vec comp = component_copy(state, layout, c);
      translate_periodic(comp, gx, shift);
      std::copy(comp.begin(), comp.end(), out.begin() + c * layout.points);
    }
    return out;
  }
  RealFft fft(gx.n);
  const double dk = 2.0 * std::numbers::pi / gx.length();
  const bool even = gx.n % 2 == 0;
  std::vector<Complex> sp(fft.spectrum_size());
  Vec row(gx.n);
  for (std::size_t c = 0; c < layout.components.size(); ++c) {
    const double* src = state.data() + c * layout.points;
    double* dst = out.data() + c * layout.points;
    for (std::size_t iy = 0; iy < layout.ny; ++iy) {
      std::copy(src + iy * layout.nx, src + (iy + 1) * layout.nx, row.begin());
      fft.forward(row.data(), sp.data());
      for (std::size_t m = 1; m < sp.size(); ++m) {
        const double k = dk * static_cast<double>(m);
        if (even && m == sp.size() - 1)
          sp[m] *= std::cos(k * shift);
        else
          sp[m] *= std::polar(1.0, -k * shift);
      }
      fft.inverse(sp.data(), row.data());
      std::copy(row.begin(), row.end(), dst + iy * layout.nx);
    }
  }
  return out;
}

/// Band-limited interpolation from a fine periodic grid to a coarser one on
/// the same domain (spectral truncation).
inline Vec spectral_resample(const Vec& fine, const PeriodicGrid& fine_grid, std::size_t coarse_n) {
  if (coarse_n == fine_grid.n) return fine;
  if (coarse_n > fine_grid.n)
    throw std::invalid_argument("spectral_resample: only downsampling is supported");
  RealFft fft_f(fine_grid.n), fft_c(coarse_n);
  std::vector<Complex> spf(fft_f.spectrum_size());
  fft_f.forward(fine.data(), spf.data());
  std::vector<Complex> spc(fft_c.spectrum_size(), Complex(0.0, 0.0));
  const double scale = static_cast<double>(coarse_n) / static_cast<double>(fine_grid.n);
  for (std::size_t m = 0; m + 1 < spc.size(); ++m) spc[m] = spf[m] * scale;
  if (coarse_n % 2 == 0)
    spc.back() = Complex(2.0 * spf[spc.size() - 1].real() * scale, 0.0);
  else
    spc.back() = spf[spc.size() - 1] * scale;
  Vec out(coarse_n);
  fft_c.inverse(spc.data(), out.data());
  return out;
}

// ---------------------------------------------------------------------------
// traveling-wave forms (integrated equations L_c phi = N(phi))

/// Per-equation data for the Petviashvili iteration: the linear symbol of
/// L_c as a components x components block at wavenumber k, and the purely
/// quadratic nonlinearity N evaluated with spectral derivatives.
struct TravelingWaveForm {
  std::size_t components = 1;
  bool pin_zero_mean = false;
  std::function<void(double k, double c, double* block)> symbol;
  std::function<Vec(const OperatorSet&, const Vec& phi)> nonlinearity;
};

inline TravelingWaveForm traveling_wave_form(ModelId id) {
  TravelingWaveForm f;
  switch (id) {
    case ModelId::kdv:
      // c phi - phi'' = phi^2 / 2
      f.symbol = [](double k, double c, double* b) { b[0] = c + k * k; };
      f.nonlinearity = [](const OperatorSet&, const Vec& phi) {
        Vec n(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i) n[i] = 0.5 * phi[i] * phi[i];
        return n;
      };
      return f;
    case ModelId::fornberg_whitham:
      // (c (1 + k^2) - 1) phi = (I - D2)(phi^2 / 2)
      f.symbol = [](double k, double c, double* b) { b[0] = c * (1.0 + k * k) - 1.0; };
      f.nonlinearity = [](const OperatorSet& ops, const Vec& phi) {
        Vec half_sq(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i) half_sq[i] = 0.5 * phi[i] * phi[i];
        Vec d2 = ops.d2(half_sq);
        for (std::size_t i = 0; i < phi.size(); ++i) half_sq[i] -= d2[i];
        return half_sq;
      };
      return f;
    case ModelId::camassa_holm:
      // c (phi - phi'') = 3/2 phi^2 - 1/2 (phi')^2 - phi phi''
      f.symbol = [](double k, double c, double* b) { b[0] = c * (1.0 + k * k); };
      f.nonlinearity = [](const OperatorSet& ops, const Vec& phi) {
        Vec d1 = ops.d1(phi), d2 = ops.d2(phi), n(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i)
          n[i] = 1.5 * phi[i] * phi[i] - 0.5 * d1[i] * d1[i] - phi[i] * d2[i];
        return n;
      };
      return f;
    case ModelId::degasperis_procesi:
      // c (phi - phi'') = (4 I - D2)(phi^2 / 2)
      f.symbol = [](double k, double c, double* b) { b[0] = c * (1.0 + k * k); };
      f.nonlinearity = [](const OperatorSet& ops, const Vec& phi) {
        Vec half_sq(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i) half_sq[i] = 0.5 * phi[i] * phi[i];
        Vec d2 = ops.d2(half_sq);
        for (std::size_t i = 0; i < phi.size(); ++i) half_sq[i] = 4.0 * half_sq[i] - d2[i];
        return half_sq;
      };
      return f;
    case ModelId::holm_hone:
      // c (4 - 5 d2 + d4) phi =
      //   phi phi'''' + phi' phi''' - (phi'')^2/2 - 5 phi phi'' - 5/2 (phi')^2 + 6 phi^2
      f.symbol = [](double k, double c, double* b) {
        b[0] = c * (4.0 + 5.0 * k * k + k * k * k * k);
      };
      f.nonlinearity = [](const OperatorSet& ops, const Vec& phi) {
        Vec d1 = ops.d1(phi), d2 = ops.d2(phi), d4 = ops.d4(phi);
        Vec d3 = ops.d1(d2);
        Vec n(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i)
          n[i] = phi[i] * d4[i] + d1[i] * d3[i] - 0.5 * d2[i] * d2[i] - 5.0 * phi[i] * d2[i] -
                 2.5 * d1[i] * d1[i] + 6.0 * phi[i] * phi[i];
        return n;
      };
      return f;
    case ModelId::bbm_bbm_H:
    case ModelId::bbm_bbm_I:
      // c (I - d2) eta - u = eta u,  c (I - d2) u - eta = u^2 / 2
      f.components = 2;
      f.symbol = [](double k, double c, double* b) {
        const double d = c * (1.0 + k * k);
        b[0] = d;
        b[1] = -1.0;
        b[2] = -1.0;
        b[3] = d;
      };
      f.nonlinearity = [](const OperatorSet& ops, const Vec& phi) {
        const std::size_t n = ops.n();
        Vec out(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
          const double eta = phi[i], u = phi[n + i];
          out[i] = eta * u;
          out[n + i] = 0.5 * u * u;
        }
        return out;
      };
      return f;
    default:
      throw WaveError("traveling_wave_form: no traveling-wave reduction for " +
                      std::string(to_string(id)));
  }
}

// ---------------------------------------------------------------------------
// Petviashvili iteration

struct PetviashviliOptions {
  double speed = 1.2;
  std::size_t fine_nodes = 1u << 12;
  std::size_t run_nodes = 1u << 8;
  double iterate_tol = 1e-12;   // successive-iterate L2 distance
  double residual_tol = 1e-10;  // traveling-wave equation residual
  int max_iterations = 10000;
  double guess_amplitude = 0.0;  // 0: 2 * speed
  double guess_width = 3.0;
};

namespace detail {

/// Applies either L_c or m^2 L_c^{-1} per Fourier mode (1 or 2 components).
inline void tw_linear_op(const TravelingWaveForm& form, const PeriodicGrid& g, double c,
                         const RealFft& fft, const Vec& in, Vec& out, bool inverse,
                         double scale) {
  const std::size_t n = g.n;
  const std::size_t nc = form.components;
  const std::size_t ns = fft.spectrum_size();
  const double dk = 2.0 * std::numbers::pi / g.length();
  std::vector<std::vector<Complex>> sp(nc, std::vector<Complex>(ns));
  for (std::size_t comp = 0; comp < nc; ++comp) fft.forward(in.data() + comp * n, sp[comp].data());
  std::vector<double> block(nc * nc);
  for (std::size_t m = 0; m < ns; ++m) {
    form.symbol(dk * static_cast<double>(m), c, block.data());
    if (nc == 1) {
      sp[0][m] = inverse ? sp[0][m] * (scale / block[0]) : sp[0][m] * (block[0] * scale);
    } else {
      const Complex a = sp[0][m], b = sp[1][m];
      if (!inverse) {
        sp[0][m] = (block[0] * a + block[1] * b) * scale;
        sp[1][m] = (block[2] * a + block[3] * b) * scale;
      } else {
        const double det = block[0] * block[3] - block[1] * block[2];
        sp[0][m] = (block[3] * a - block[1] * b) * (scale / det);
        sp[1][m] = (-block[2] * a + block[0] * b) * (scale / det);
      }
    }
  }
  out.resize(nc * n);
  for (std::size_t comp = 0; comp < nc; ++comp) fft.inverse(sp[comp].data(), out.data() + comp * n);
}

inline void pin_mean(Vec& v, std::size_t components, std::size_t n) {
  for (std::size_t c = 0; c < components; ++c) {
    double* p = v.data() + c * n;
    const double mean = kahan_sum(p, n) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) p[i] -= mean;
  }
}

}  // namespace detail

/// Computes a traveling-wave profile with the stabilized fixed-point
/// iteration u <- m^2 L_c^{-1} N(u), m = <u, L_c u>_M / <u, N(u)>_M
/// (quadratic nonlinearities), on a fine Fourier grid, then interpolates to
/// the run grid.
inline WaveProfile petviashvili_solve(ModelId id, const PeriodicGrid& run_grid,
                                      const PetviashviliOptions& opt) {
  const TravelingWaveForm form = traveling_wave_form(id);
  const PeriodicGrid fine(run_grid.x_min, run_grid.x_max, opt.fine_nodes);
  auto ops = OperatorSet::fourier(fine);
  RealFft& fft = const_cast<RealFft&>(*ops.fft());
  const std::size_t n = fine.n;
  const std::size_t nc = form.components;
  const double w = fine.spacing();

  // localized initial guess, identical in every component
  const double amp = opt.guess_amplitude != 0.0 ? opt.guess_amplitude : 2.0 * opt.speed;
  const double center = 0.5 * (fine.x_min + fine.x_max);
  Vec phi(nc * n);
  for (std::size_t comp = 0; comp < nc; ++comp)
    for (std::size_t i = 0; i < n; ++i) {
      const double x = fine.node(i) - center;
      phi[comp * n + i] = amp * std::exp(-x * x / (opt.guess_width * opt.guess_width));
    }

  Vec lphi, nphi, next;
  double dist = std::numeric_limits<double>::infinity();
  double m_factor = 1.0;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    nphi = form.nonlinearity(ops, phi);
    detail::tw_linear_op(form, fine, opt.speed, fft, phi, lphi, false, 1.0);
    const double num = w * kahan_dot(phi, lphi);
    const double den = w * kahan_dot(phi, nphi);
    m_factor = num / den;
    if (!(std::abs(m_factor) > 1e-8 && std::abs(m_factor) < 1e8))
      throw WaveError("petviashvili: stabilizing factor diverged (m = " +
                      std::to_string(m_factor) + ", iteration " + std::to_string(iter) + ")");
    detail::tw_linear_op(form, fine, opt.speed, fft, nphi, next, true, m_factor * m_factor);
    if (form.pin_zero_mean) detail::pin_mean(next, nc, n);
    double d2 = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) d2 += (next[i] - phi[i]) * (next[i] - phi[i]);
    dist = std::sqrt(w * d2);
    phi.swap(next);
    if (dist <= opt.iterate_tol) break;
  }

  // residual of the integrated traveling-wave equation on the fine grid
  nphi = form.nonlinearity(ops, phi);
  detail::tw_linear_op(form, fine, opt.speed, fft, phi, lphi, false, 1.0);
  double r2 = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) r2 += (lphi[i] - nphi[i]) * (lphi[i] - nphi[i]);
  const double residual = std::sqrt(w * r2);
  if (dist > opt.iterate_tol || residual > opt.residual_tol)
    throw WaveError("petviashvili did not converge: iterations = " + std::to_string(iter) +
                    ", last step = " + format_double(dist) + ", residual = " + format_double(residual) +
                    ", m = " + format_double(m_factor));

  WaveProfile prof;
  prof.model = id;
  prof.grid = run_grid;
  prof.speed = opt.speed;
  prof.provenance = WaveProvenance::petviashvili;
  prof.residual = residual;
  prof.layout.points = run_grid.n;
  prof.layout.components = (nc == 2) ? std::vector<std::string>{"eta", "u"}
                                     : std::vector<std::string>{"u"};
  prof.data.resize(nc * run_grid.n);
  for (std::size_t comp = 0; comp < nc; ++comp) {
    Vec fine_comp(phi.begin() + comp * n, phi.begin() + (comp + 1) * n);
    Vec coarse = spectral_resample(fine_comp, fine, run_grid.n);
    std::copy(coarse.begin(), coarse.end(), prof.data.begin() + comp * run_grid.n);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// closed-form peakon

/// Periodized Camassa-Holm peakon c exp(-|x - x0|) via nearest-image
/// evaluation; the neglected wrap correction is below c exp(-L/2), which is
/// also the advertised residual of the profile.
inline WaveProfile peakon_profile(double c, const PeriodicGrid& grid, double x0) {
  WaveProfile prof;
  prof.model = ModelId::camassa_holm;
  prof.grid = grid;
  prof.speed = c;
  prof.provenance = WaveProvenance::closed_form;
  prof.residual = std::abs(c) * std::exp(-0.5 * grid.length());
  prof.layout.components = {"u"};
  prof.layout.points = grid.n;
  prof.data.resize(grid.n);
  const double L = grid.length();
  for (std::size_t j = 0; j < grid.n; ++j) {
    double d = std::abs(grid.node(j) - x0);
    d = std::min(d, L - std::fmod(d, L) < d ? L - std::fmod(d, L) : d);
    double folded = std::fmod(std::abs(grid.node(j) - x0), L);
    folded = std::min(folded, L - folded);
    prof.data[j] = c * std::exp(-folded);
  }
  return prof;
}

/// The peakon at time t, evaluated in closed form (exact translation).
inline Vec peakon_at_time(double c, const PeriodicGrid& grid, double x0, double t) {
  Vec u(grid.n);
  const double L = grid.length();
  for (std::size_t j = 0; j < grid.n; ++j) {
    double folded = std::fmod(std::abs(grid.node(j) - x0 - c * t), L);
    folded = std::min(folded, L - folded);
    u[j] = c * std::exp(-folded);
  }
  return u;
}

// ---------------------------------------------------------------------------
// speed estimation

namespace detail {

/// Continuous-shift correlation maximizer: returns the shift s in [0, L)
/// maximizing <sig, T_s ref> from the averaged cross spectrum.
inline double correlation_shift(const std::vector<Complex>& cross, const PeriodicGrid& g,
                                std::size_t n) {
  const std::size_t ns = cross.size();
  const double dk = 2.0 * std::numbers::pi / g.length();
  // coarse scan over integer shifts through the correlation series
  RealFft fft(n);
  std::vector<Complex> z(cross);
  Vec corr(n);
  fft.inverse(z.data(), corr.data());  // corr[j] ~ C(j h) / n
  std::size_t jbest = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (corr[j] > corr[jbest]) jbest = j;
  double s = static_cast<double>(jbest) * g.spacing();
  // Newton refinement on C'(s) = 0
  const bool even = n % 2 == 0;
  for (int it = 0; it < 12; ++it) {
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t m = 1; m < ns; ++m) {
      if (even && m == ns - 1) continue;
      const double k = dk * static_cast<double>(m);
      const Complex e = std::polar(1.0, k * s);
      const Complex ze = cross[m] * e;
      c1 += -k * ze.imag();
      c2 += -k * k * ze.real();
    }
    if (c2 == 0.0) break;
    double step = -c1 / c2;
    step = std::clamp(step, -g.spacing(), g.spacing());
    s += step;
    if (std::abs(step) < 1e-14 * g.length()) break;
  }
  s = std::fmod(s, g.length());
  if (s < 0.0) s += g.length();
  return s;
}

}  // namespace detail

/// Shift of `sig` relative to `ref` (both sampled on g), in [0, L).
inline double relative_shift(const Vec& sig, const Vec& ref, const PeriodicGrid& g) {
  RealFft fft(g.n);
  std::vector<Complex> a(fft.spectrum_size()), b(fft.spectrum_size());
  fft.forward(sig.data(), a.data());
  fft.forward(ref.data(), b.data());
  for (std::size_t m = 0; m < a.size(); ++m) a[m] *= std::conj(b[m]);
  return detail::correlation_shift(a, g, g.n);
}

/// Shift in x of a 2D field (row-major, x fastest), correlations averaged
/// over the rows.
inline double relative_shift_x(const Vec& sig, const Vec& ref, const PeriodicGrid& gx,
                               std::size_t ny) {
  RealFft fft(gx.n);
  const std::size_t ns = fft.spectrum_size();
  std::vector<Complex> acc(ns, Complex(0.0, 0.0)), a(ns), b(ns);
  Vec row(gx.n);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    std::copy(sig.begin() + iy * gx.n, sig.begin() + (iy + 1) * gx.n, row.begin());
    fft.forward(row.data(), a.data());
    std::copy(ref.begin() + iy * gx.n, ref.begin() + (iy + 1) * gx.n, row.begin());
    fft.forward(row.data(), b.data());
    for (std::size_t m = 0; m < ns; ++m) acc[m] += a[m] * std::conj(b[m]);
  }
  return detail::correlation_shift(acc, gx, gx.n);
}

/// Least-squares wave speed from snapshots (t_i, first component).  Shifts
/// are measured against the first snapshot by correlation, unwrapped by
/// continuity (snapshot spacing must keep per-interval displacements under
/// half a period), and fitted linearly in t.
inline double estimate_speed(const std::vector<std::pair<double, Vec>>& snapshots,
                             const PeriodicGrid& g, std::size_t ny = 0) {
  if (snapshots.size() < 2) throw WaveError("estimate_speed: need at least two snapshots");
  const Vec& ref = snapshots.front().second;
  const double L = g.length();
  std::vector<double> ts, ss;
  double prev = 0.0;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const double raw = (ny == 0) ? relative_shift(snapshots[i].second, ref, g)
                                 : relative_shift_x(snapshots[i].second, ref, g, ny);
    double s;
    if (i == 0) {
      s = (raw > 0.5 * L) ? raw - L : raw;  // first shift should be ~0
    } else {
      double d = std::fmod(raw - prev, L);
      if (d > 0.5 * L) d -= L;
      if (d < -0.5 * L) d += L;
      s = ss.back() + d;
    }
    prev = std::fmod(s, L);
    if (prev < 0.0) prev += L;
    ts.push_back(snapshots[i].first);
    ss.push_back(s);
  }
  // monotonicity of the unwrapped positions
  int dir = 0;
  for (std::size_t i = 1; i < ss.size(); ++i) {
    const double d = ss[i] - ss[i - 1];
    if (d == 0.0) continue;
    const int sgn = d > 0.0 ? 1 : -1;
    if (dir == 0) dir = sgn;
    else if (dir != sgn)
      throw WaveError("estimate_speed: non-monotone unwrapped positions");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double nn = static_cast<double>(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sx += ts[i];
    sy += ss[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * ss[i];
  }
  const double denom = nn * sxx - sx * sx;
  if (denom == 0.0) throw WaveError("estimate_speed: degenerate time samples");
  return (nn * sxy - sx * sy) / denom;
}

}  // namespace conserva

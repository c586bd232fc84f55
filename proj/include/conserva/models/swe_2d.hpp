#pragma once

#include <memory>
#include <numbers>
#include <utility>

#include "conserva/fft.hpp"
#include "conserva/model.hpp"

namespace conserva {

/// 2D shallow water equations with variable bathymetry on a periodic
/// rectangle, components (h, hvx, hvy).  The operators are tensor products
/// of 1D Fourier operators; fields are stored row-major with x fastest.
///
/// The split form pairs each cross flux with the transporting momentum
/// ((h vy) carrying vx in the y direction and vice versa), which together
/// with the skew-symmetry of D1 makes the semidiscretization conserve the
/// total energy and keeps the lake-at-rest state exactly steady.
class Swe2dModel final : public Model {
 public:
  Swe2dModel(std::shared_ptr<const OperatorSet> ops_x, std::shared_ptr<const OperatorSet> ops_y,
             const ModelConfig& cfg)
      : ops_x_(std::move(ops_x)),
        ops_y_(std::move(ops_y)),
        gravity_(cfg.gravity),
        nx_(ops_x_->n()),
        ny_(ops_y_->n()),
        fft_x_(nx_, ny_, 1, nx_),
        fft_y_(ny_, nx_, nx_, 1) {
    if (ops_x_->kind() != OperatorKind::fourier || ops_y_->kind() != OperatorKind::fourier)
      throw std::invalid_argument("Swe2dModel: tensor operators must be Fourier collocation");
    layout_.components = {"h", "hvx", "hvy"};
    layout_.points = nx_ * ny_;
    layout_.nx = nx_;
    layout_.ny = ny_;
    bathymetry_.resize(layout_.points);
    for (std::size_t iy = 0; iy < ny_; ++iy)
      for (std::size_t ix = 0; ix < nx_; ++ix)
        bathymetry_[iy * nx_ + ix] = cfg.bathymetry(ops_x_->grid().node(ix), ops_y_->grid().node(iy));
    build_wavenumbers();
    build_invariants();
  }

  ModelId id() const override { return ModelId::swe_2d; }
  const StateLayout& layout() const override { return layout_; }
  double mass_weight() const override { return ops_x_->mass_weight() * ops_y_->mass_weight(); }
  const std::vector<Invariant>& invariants() const override { return invariants_; }
  const Vec& bathymetry() const { return bathymetry_; }
  double gravity() const { return gravity_; }
  const TensorGrid grid() const { return TensorGrid{ops_x_->grid(), ops_y_->grid()}; }

  void rhs(const Vec& state, Vec& out) const override {
    require_finite(state);
    const std::size_t np = layout_.points;
    auto h = component(state, layout_, 0);
    auto px = component(state, layout_, 1);
    auto py = component(state, layout_, 2);
    for (std::size_t i = 0; i < np; ++i)
      if (!(h[i] > 0.0)) throw BlowUpError("swe_2d: non-positive water height");

    Vec vx(np), vy(np), work(np), t(np);
    for (std::size_t i = 0; i < np; ++i) {
      vx[i] = px[i] / h[i];
      vy[i] = py[i] / h[i];
    }

    out.assign(layout_.size(), 0.0);
    auto dh = component(out, layout_, 0);
    auto dpx = component(out, layout_, 1);
    auto dpy = component(out, layout_, 2);

    Vec pxv(px.begin(), px.end()), pyv(py.begin(), py.end());
    Vec dx_px(np), dy_py(np), dx_vx(np), dy_vy(np);
    dx(pxv, dx_px);
    dy(pyv, dy_py);
    dx(vx, dx_vx);
    dy(vy, dy_vy);

    // continuity
    for (std::size_t i = 0; i < np; ++i) dh[i] = -dx_px[i] - dy_py[i];

    // x-momentum
    for (std::size_t i = 0; i < np; ++i) work[i] = px[i] * vx[i];
    dx(work, t);
    for (std::size_t i = 0; i < np; ++i)
      dpx[i] -= 0.5 * (t[i] + px[i] * dx_vx[i] + vx[i] * dx_px[i]);
    for (std::size_t i = 0; i < np; ++i) work[i] = py[i] * vx[i];
    dy(work, t);
    Vec dy_vx(np);
    dy(vx, dy_vx);
    for (std::size_t i = 0; i < np; ++i)
      dpx[i] -= 0.5 * (t[i] + py[i] * dy_vx[i] + vx[i] * dy_py[i]);

    // y-momentum
    for (std::size_t i = 0; i < np; ++i) work[i] = px[i] * vy[i];
    dx(work, t);
    Vec dx_vy(np);
    dx(vy, dx_vy);
    for (std::size_t i = 0; i < np; ++i)
      dpy[i] -= 0.5 * (t[i] + px[i] * dx_vy[i] + vy[i] * dx_px[i]);
    for (std::size_t i = 0; i < np; ++i) work[i] = py[i] * vy[i];
    dy(work, t);
    for (std::size_t i = 0; i < np; ++i)
      dpy[i] -= 0.5 * (t[i] + py[i] * dy_vy[i] + vy[i] * dy_py[i]);

    // hydrostatic source, well-balanced against the lake-at-rest state
    for (std::size_t i = 0; i < np; ++i) work[i] = h[i] + bathymetry_[i];
    dx(work, t);
    for (std::size_t i = 0; i < np; ++i) dpx[i] -= gravity_ * h[i] * t[i];
    dy(work, t);
    for (std::size_t i = 0; i < np; ++i) dpy[i] -= gravity_ * h[i] * t[i];
  }

  /// d/dx along rows (batched Fourier differentiation).
  void dx(const Vec& f, Vec& out) const {
    out.resize(layout_.points);
    std::vector<Complex> sp(fft_x_.spectrum_buffer_size());
    fft_x_.forward(f.data(), sp.data());
    const std::size_t ms = nx_ / 2 + 1;
    for (std::size_t iy = 0; iy < ny_; ++iy) {
      Complex* row = sp.data() + iy * nx_;
      for (std::size_t m = 0; m < ms; ++m) {
        const double k = kx_[m];
        row[m] = Complex(-k * row[m].imag(), k * row[m].real());
      }
    }
    fft_x_.inverse(sp.data(), out.data());
  }

  /// d/dy along columns.
  void dy(const Vec& f, Vec& out) const {
    out.resize(layout_.points);
    std::vector<Complex> sp(fft_y_.spectrum_buffer_size());
    fft_y_.forward(f.data(), sp.data());
    const std::size_t ms = ny_ / 2 + 1;
    for (std::size_t m = 0; m < ms; ++m) {
      const double k = ky_[m];
      Complex* band = sp.data() + m * nx_;
      for (std::size_t ix = 0; ix < nx_; ++ix)
        band[ix] = Complex(-k * band[ix].imag(), k * band[ix].real());
    }
    fft_y_.inverse(sp.data(), out.data());
  }

 private:
  void build_wavenumbers() {
    const double two_pi = 2.0 * std::numbers::pi;
    kx_.assign(nx_ / 2 + 1, 0.0);
    ky_.assign(ny_ / 2 + 1, 0.0);
    for (std::size_t m = 1; m < kx_.size(); ++m)
      kx_[m] = (nx_ % 2 == 0 && m == kx_.size() - 1) ? 0.0
                                                     : two_pi * static_cast<double>(m) / ops_x_->grid().length();
    for (std::size_t m = 1; m < ky_.size(); ++m)
      ky_[m] = (ny_ % 2 == 0 && m == ky_.size() - 1) ? 0.0
                                                     : two_pi * static_cast<double>(m) / ops_y_->grid().length();
  }

  void build_invariants() {
    const double w = mass_weight();
    const StateLayout layout = layout_;
    invariants_.push_back({"mass_h", true,
                           [w, layout](const Vec& s) {
                             auto h = component(s, layout, 0);
                             return w * kahan_sum(h.data(), h.size());
                           },
                           [layout](const Vec&) {
                             Vec g(layout.size(), 0.0);
                             for (std::size_t i = 0; i < layout.points; ++i) g[i] = 1.0;
                             return g;
                           }});
    invariants_.push_back({"energy", false,
                           [w, layout, this](const Vec& s) {
                             auto h = component(s, layout, 0);
                             auto px = component(s, layout, 1);
                             auto py = component(s, layout, 2);
                             Vec dens(layout.points);
                             for (std::size_t i = 0; i < layout.points; ++i)
                               dens[i] = 0.5 * (px[i] * px[i] + py[i] * py[i]) / h[i] +
                                         0.5 * gravity_ * h[i] * h[i] + gravity_ * h[i] * bathymetry_[i];
                             return w * kahan_sum(dens);
                           },
                           [layout, this](const Vec& s) {
                             auto h = component(s, layout, 0);
                             auto px = component(s, layout, 1);
                             auto py = component(s, layout, 2);
                             Vec g(layout.size());
                             for (std::size_t i = 0; i < layout.points; ++i) {
                               const double vx = px[i] / h[i];
                               const double vy = py[i] / h[i];
                               g[i] = gravity_ * (h[i] + bathymetry_[i]) - 0.5 * (vx * vx + vy * vy);
                               g[layout.points + i] = vx;
                               g[2 * layout.points + i] = vy;
                             }
                             return g;
                           }});
  }

  std::shared_ptr<const OperatorSet> ops_x_, ops_y_;
  double gravity_;
  std::size_t nx_, ny_;
  BatchRealFft fft_x_, fft_y_;
  StateLayout layout_;
  std::vector<Invariant> invariants_;
  Vec bathymetry_;
  std::vector<double> kx_, ky_;
};

}  // namespace conserva

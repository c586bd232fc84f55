#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace conserva {

using Complex = std::complex<double>;

namespace detail {
// FFTW's planner is not thread-safe; executing plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Real-to-complex FFT of fixed length.  Plans are created once with
/// FFTW_UNALIGNED so they can be executed on any caller-provided buffers via
/// the new-array interface; this keeps apply/solve free of shared mutable
/// state and thus safe to call from several threads at once.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    if (n_ < 2) throw std::invalid_argument("RealFft: need n >= 2");
    std::vector<double> re(n_);
    std::vector<Complex> sp(spectrum_size());
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), re.data(),
                                reinterpret_cast<fftw_complex*>(sp.data()), flags);
    bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_),
                                reinterpret_cast<fftw_complex*>(sp.data()), re.data(), flags);
    if (!fwd_ || !bwd_) throw std::runtime_error("RealFft: planning failed");
  }

  ~RealFft() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  /// Unnormalized forward transform; input is not modified.
  void forward(const double* in, Complex* out) const {
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  }

  /// Inverse transform including the 1/n normalization.  The spectrum buffer
  /// is destroyed (FFTW c2r semantics).
  void inverse(Complex* spectrum, double* out) const {
    fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(spectrum), out);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] *= inv;
  }

 private:
  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// Batched strided real FFTs, used for applying 1D operators along one axis
/// of a tensor-product grid in a single FFTW call.
class BatchRealFft {
 public:
  BatchRealFft(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist)
      : n_(n), howmany_(howmany), stride_(stride), dist_(dist) {
    std::vector<double> re(real_buffer_size());
    std::vector<Complex> sp(spectrum_buffer_size());
    const int ni = static_cast<int>(n_);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_many_dft_r2c(1, &ni, static_cast<int>(howmany_),
                                  re.data(), nullptr, static_cast<int>(stride_), static_cast<int>(dist_),
                                  reinterpret_cast<fftw_complex*>(sp.data()), nullptr,
                                  static_cast<int>(stride_), static_cast<int>(dist_), flags);
    bwd_ = fftw_plan_many_dft_c2r(1, &ni, static_cast<int>(howmany_),
                                  reinterpret_cast<fftw_complex*>(sp.data()), nullptr,
                                  static_cast<int>(stride_), static_cast<int>(dist_),
                                  re.data(), nullptr, static_cast<int>(stride_), static_cast<int>(dist_), flags);
    if (!fwd_ || !bwd_) throw std::runtime_error("BatchRealFft: planning failed");
  }

  ~BatchRealFft() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  BatchRealFft(const BatchRealFft&) = delete;
  BatchRealFft& operator=(const BatchRealFft&) = delete;

  std::size_t transform_size() const { return n_; }
  std::size_t batch() const { return howmany_; }
  std::size_t stride() const { return stride_; }
  std::size_t dist() const { return dist_; }
  std::size_t real_buffer_size() const { return buffer_extent(n_); }
  std::size_t spectrum_buffer_size() const { return buffer_extent(n_ / 2 + 1); }

  void forward(const double* in, Complex* out) const {
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  }

  void inverse(Complex* spectrum, double* out) const {
    fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(spectrum), out);
    const double inv = 1.0 / static_cast<double>(n_);
    const std::size_t total = buffer_extent(n_);
    for (std::size_t i = 0; i < total; ++i) out[i] *= inv;
  }

 private:
  std::size_t buffer_extent(std::size_t len) const {
    // Last element index + 1 for `len` strided entries in `howmany_` batches.
    return (howmany_ - 1) * dist_ + (len - 1) * stride_ + 1;
  }

  std::size_t n_, howmany_, stride_, dist_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace conserva

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "fraclab/errors.hpp"

namespace fraclab {

/// Real samples on the uniform periodic grid of [-L,L)^n, n in {1,2,3}, M points per axis.
/// Row-major: the last axis varies fastest.
class PeriodicField {
 public:
  PeriodicField(int dim, double half_length, std::size_t points)
      : n_(dim), L_(half_length), M_(points) {
    if (dim < 1 || dim > 3) throw domain_error("PeriodicField: dimension must be 1, 2 or 3");
    if (!(half_length > 0.0)) throw domain_error("PeriodicField: L must be positive");
    if (points < 2 || (points & (points - 1)) != 0) throw domain_error("PeriodicField: M must be a power of two");
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= points;
    values_.assign(total, 0.0);
  }

  int dim() const { return n_; }
  double half_length() const { return L_; }
  std::size_t points() const { return M_; }
  std::size_t size() const { return values_.size(); }
  double spacing() const { return 2.0 * L_ / double(M_); }
  double cell_volume() const { return std::pow(spacing(), n_); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double coord(std::size_t j) const { return -L_ + double(j) * spacing(); }

  /// Physical coordinates of flat index i (unused axes are 0).
  std::array<double, 3> point(std::size_t i) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = n_ - 1; a >= 0; --a) {
      x[std::size_t(a)] = coord(i % M_);
      i /= M_;
    }
    return x;
  }

  double radius(std::size_t i) const {
    const auto x = point(i);
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  }

  template <class F>
  void fill(F&& f) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = f(point(i));
  }

  template <class F>
  void fill_radial(F&& f) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = f(radius(i));
  }

  bool same_grid(const PeriodicField& o) const { return n_ == o.n_ && M_ == o.M_ && L_ == o.L_; }

  double sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }
  double integral() const { return sum() * cell_volume(); }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  int n_;
  double L_;
  std::size_t M_;
  std::vector<double> values_;
};

namespace detail {
// Plan creation/destruction in FFTW is not thread safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Real-to-complex transform pair for one grid shape, with its own scratch buffers.
class SpectralPlan {
 public:
  using complex = std::complex<double>;

  SpectralPlan(int dim, double half_length, std::size_t points) : n_(dim), L_(half_length), M_(points) {
    std::array<int, 3> dims{};
    real_size_ = 1;
    for (int a = 0; a < dim; ++a) {
      dims[std::size_t(a)] = int(points);
      real_size_ *= points;
    }
    spec_size_ = real_size_ / points * (points / 2 + 1);
    real_ = fftw_alloc_real(real_size_);
    spec_ = fftw_alloc_complex(spec_size_);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fwd_ = fftw_plan_dft_r2c(dim, dims.data(), real_, spec_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r(dim, dims.data(), spec_, real_, FFTW_ESTIMATE);
    }
    knorm_.resize(spec_size_);
    const double k0 = std::numbers::pi / half_length;
    const std::size_t last = points / 2 + 1;
    for (std::size_t i = 0; i < spec_size_; ++i) {
      std::size_t rest = i;
      double k2 = 0.0;
      for (int a = dim - 1; a >= 0; --a) {
        std::size_t j;
        double kj;
        if (a == dim - 1) {
          j = rest % last;
          rest /= last;
          kj = k0 * double(j);
        } else {
          j = rest % points;
          rest /= points;
          kj = k0 * (j <= points / 2 ? double(j) : double(j) - double(points));
        }
        k2 += kj * kj;
      }
      knorm_[i] = std::sqrt(k2);
    }
  }

  explicit SpectralPlan(const PeriodicField& f) : SpectralPlan(f.dim(), f.half_length(), f.points()) {}

  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  ~SpectralPlan() {
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(bwd_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }

  std::size_t spectrum_size() const { return spec_size_; }
  std::size_t real_size() const { return real_size_; }

  /// |k| for every stored mode, aligned with the spectrum layout.
  std::span<const double> wavenumber_norms() const { return knorm_; }

  /// Unnormalised forward transform.
  void forward(std::span<const double> in, std::span<complex> out) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(fwd_);
    const auto* c = reinterpret_cast<const complex*>(spec_);
    std::copy(c, c + spec_size_, out.begin());
  }

  /// Inverse transform including the 1/M^n normalisation.
  void inverse(std::span<const complex> in, std::span<double> out) {
    auto* c = reinterpret_cast<complex*>(spec_);
    std::copy(in.begin(), in.end(), c);
    fftw_execute(bwd_);
    const double scale = 1.0 / double(real_size_);
    for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i] * scale;
  }

  /// out = F^{-1}[ symbol(|k|) F[in] ].
  template <class Symbol>
  void apply(std::span<const double> in, std::span<double> out, Symbol&& symbol) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(fwd_);
    auto* c = reinterpret_cast<complex*>(spec_);
    for (std::size_t i = 0; i < spec_size_; ++i) c[i] *= symbol(knorm_[i]);
    fftw_execute(bwd_);
    const double scale = 1.0 / double(real_size_);
    for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i] * scale;
  }

 private:
  int n_;
  double L_;
  std::size_t M_;
  std::size_t real_size_ = 0, spec_size_ = 0;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
  std::vector<double> knorm_;
};

}  // namespace fraclab

#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace lasalt {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform n-by-n discretization of the square torus [0,L)^2 with FFT-based
/// spectral transforms. Immutable after construction; transform execution is
/// thread-safe, so one grid can be shared by all solvers.
///
/// Real fields are stored row-major with the y-index outermost:
/// value(i, j) = data[j * n + i], x_i = i L/n, y_j = j L/n.
///
/// Spectral arrays use the half-complex r2c layout: coefficient of the mode
/// (mx, my) lives at [my_wrapped * (n/2+1) + mx] for 0 <= mx <= n/2; the
/// missing half is implied by Hermitian symmetry.
class TorusGrid {
 public:
  explicit TorusGrid(int n, double length = kTwoPi,
                     double dealias_fraction = 2.0 / 3.0);
  ~TorusGrid();

  TorusGrid(const TorusGrid&) = delete;
  TorusGrid& operator=(const TorusGrid&) = delete;

  int n() const { return n_; }
  double length() const { return length_; }
  double dealias_fraction() const { return dealias_fraction_; }
  std::size_t size() const { return std::size_t(n_) * n_; }
  std::size_t spec_size() const { return std::size_t(n_) * (n_ / 2 + 1); }
  int spec_nx() const { return n_ / 2 + 1; }

  double dx() const { return length_ / n_; }
  double x(int i) const { return i * dx(); }
  double y(int j) const { return j * dx(); }

  /// Signed integer wavenumber for a full-axis index in [0, n).
  int wavenumber(int idx) const { return idx <= n_ / 2 ? idx : idx - n_; }
  /// Physical wavenumber 2*pi*m / L.
  double k_of(int m) const { return kTwoPi * m / length_; }

  /// Retained-mode bound of the dealias mask: modes with |m| above this are
  /// zeroed on either axis.
  int dealias_cut() const { return cut_; }
  bool keep_mode(int mx, int my) const {
    return std::abs(mx) <= cut_ && std::abs(my) <= cut_;
  }

  /// Unnormalized forward r2c transform.
  void forward(const double* in, std::complex<double>* out) const;
  /// Inverse c2r transform including the 1/n^2 normalization. The input is
  /// left untouched.
  void inverse(const std::complex<double>* in, double* out) const;

  std::vector<std::complex<double>> to_spectral(
      const std::vector<double>& values) const;
  std::vector<double> to_real(
      const std::vector<std::complex<double>>& coeffs) const;

  void apply_dealias(std::complex<double>* coeffs) const;

  /// In-place spectral derivative along x or y (axis 0 or 1). The Nyquist
  /// column/row is zeroed, as usual for odd-order spectral derivatives.
  void spectral_derivative(std::complex<double>* coeffs, int axis) const;

 private:
  int n_;
  double length_;
  double dealias_fraction_;
  int cut_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

inline GridPtr make_grid(int n, double length = kTwoPi,
                         double dealias_fraction = 2.0 / 3.0) {
  return std::make_shared<const TorusGrid>(n, length, dealias_fraction);
}

}  // namespace lasalt

#include "lasalt/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace lasalt {

namespace {
// FFTW plan creation is not thread-safe; execution via the new-array
// interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct TorusGrid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

TorusGrid::TorusGrid(int n, double length, double dealias_fraction)
    : n_(n), length_(length), dealias_fraction_(dealias_fraction) {
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("TorusGrid: n must be even and >= 8");
  if (length <= 0.0)
    throw std::invalid_argument("TorusGrid: length must be positive");
  if (dealias_fraction <= 0.0 || dealias_fraction > 1.0)
    throw std::invalid_argument("TorusGrid: dealias_fraction in (0,1]");
  cut_ = int(std::floor(dealias_fraction * (n / 2) + 1e-12));

  plans_ = std::make_unique<Plans>();
  std::vector<double> rbuf(size());
  std::vector<std::complex<double>> cbuf(spec_size());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->fwd = fftw_plan_dft_r2c_2d(
      n_, n_, rbuf.data(), reinterpret_cast<fftw_complex*>(cbuf.data()),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->bwd = fftw_plan_dft_c2r_2d(
      n_, n_, reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plans_->fwd || !plans_->bwd)
    throw std::runtime_error("TorusGrid: FFTW plan creation failed");
}

TorusGrid::~TorusGrid() = default;

void TorusGrid::forward(const double* in, std::complex<double>* out) const {
  // r2c destroys its input for some algorithms; copy to scratch.
  std::vector<double> scratch(in, in + size());
  fftw_execute_dft_r2c(plans_->fwd, scratch.data(),
                       reinterpret_cast<fftw_complex*>(out));
}

void TorusGrid::inverse(const std::complex<double>* in, double* out) const {
  std::vector<std::complex<double>> scratch(in, in + spec_size());
  fftw_execute_dft_c2r(plans_->bwd,
                       reinterpret_cast<fftw_complex*>(scratch.data()), out);
  const double norm = 1.0 / double(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] *= norm;
}

std::vector<std::complex<double>> TorusGrid::to_spectral(
    const std::vector<double>& values) const {
  std::vector<std::complex<double>> coeffs(spec_size());
  forward(values.data(), coeffs.data());
  return coeffs;
}

std::vector<double> TorusGrid::to_real(
    const std::vector<std::complex<double>>& coeffs) const {
  std::vector<double> values(size());
  inverse(coeffs.data(), values.data());
  return values;
}

void TorusGrid::apply_dealias(std::complex<double>* coeffs) const {
  const int nxh = spec_nx();
  for (int jy = 0; jy < n_; ++jy) {
    const int my = wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      if (!keep_mode(ix, my)) coeffs[std::size_t(jy) * nxh + ix] = 0.0;
    }
  }
}

void TorusGrid::spectral_derivative(std::complex<double>* coeffs,
                                    int axis) const {
  const int nxh = spec_nx();
  const std::complex<double> iunit(0.0, 1.0);
  for (int jy = 0; jy < n_; ++jy) {
    const int my = wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      std::complex<double>& c = coeffs[std::size_t(jy) * nxh + ix];
      if (axis == 0) {
        c *= (ix == n_ / 2) ? 0.0 : iunit * k_of(ix);
      } else {
        c *= (jy == n_ / 2) ? 0.0 : iunit * k_of(my);
      }
    }
  }
}

}  // namespace lasalt

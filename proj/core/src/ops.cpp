#include "lasalt/ops.hpp"

#include <algorithm>
#include <cmath>

namespace lasalt {

namespace {

std::vector<double> spectral_deriv(const TorusGrid& g,
                                   const std::vector<double>& values,
                                   int axis) {
  auto coeffs = g.to_spectral(values);
  g.spectral_derivative(coeffs.data(), axis);
  return g.to_real(coeffs);
}

double cell_area(const TorusGrid& g) {
  const double h = g.dx();
  return h * h;
}

}  // namespace

ScalarField deriv(const ScalarField& f, int axis) {
  ScalarField out(f.grid);
  out.v = spectral_deriv(*f.grid, f.v, axis);
  return out;
}

OneFormField gradient(const ScalarField& f) {
  OneFormField out(f.grid);
  out.c[0] = spectral_deriv(*f.grid, f.v, 0);
  out.c[1] = spectral_deriv(*f.grid, f.v, 1);
  return out;
}

OneFormField exterior_d(const ScalarField& f) { return gradient(f); }

ScalarField divergence(const VectorField& v) {
  ScalarField out(v.grid);
  auto dx = spectral_deriv(*v.grid, v.c[0], 0);
  auto dy = spectral_deriv(*v.grid, v.c[1], 1);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = dx[k] + dy[k];
  return out;
}

ScalarField curl2d(const VectorField& v) {
  ScalarField out(v.grid);
  auto dxv2 = spectral_deriv(*v.grid, v.c[1], 0);
  auto dyv1 = spectral_deriv(*v.grid, v.c[0], 1);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = dxv2[k] - dyv1[k];
  return out;
}

VectorField biot_savart(const ScalarField& omega) {
  const TorusGrid& g = *omega.grid;
  const double m = mean(omega);
  if (std::abs(m) * g.length() > 1e-10 * (l2_norm(omega) + 1e-300) &&
      std::abs(m) > 1e-13)
    throw NonZeroMean("biot_savart: vorticity has non-zero spatial mean");

  auto coeffs = g.to_spectral(omega.v);
  // psi_hat = omega_hat / |k|^2, then V = (d_y, -d_x) psi, the orientation
  // that makes curl2d a left inverse.
  const int nxh = g.spec_nx();
  std::vector<std::complex<double>> psix(coeffs.size()), psiy(coeffs.size());
  const std::complex<double> iunit(0.0, 1.0);
  for (int jy = 0; jy < g.n(); ++jy) {
    const int my = g.wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      const std::size_t idx = std::size_t(jy) * nxh + ix;
      const double kx = g.k_of(ix);
      const double ky = g.k_of(my);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) {
        psix[idx] = psiy[idx] = 0.0;
        continue;
      }
      const std::complex<double> psi = coeffs[idx] / k2;
      const double kx_d = (ix == g.n() / 2) ? 0.0 : kx;
      const double ky_d = (jy == g.n() / 2) ? 0.0 : ky;
      psix[idx] = iunit * ky_d * psi;
      psiy[idx] = -iunit * kx_d * psi;
    }
  }
  VectorField out(omega.grid);
  out.c[0] = g.to_real(psix);
  out.c[1] = g.to_real(psiy);
  return out;
}

ScalarField poisson_solve(const ScalarField& src) {
  const TorusGrid& g = *src.grid;
  if (std::abs(mean(src)) > 1e-10 * (l2_norm(src) / g.length() + 1e-300) &&
      std::abs(mean(src)) > 1e-13)
    throw NonZeroMean("poisson_solve: source has non-zero spatial mean");
  auto coeffs = g.to_spectral(src.v);
  const int nxh = g.spec_nx();
  for (int jy = 0; jy < g.n(); ++jy) {
    const int my = g.wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      const std::size_t idx = std::size_t(jy) * nxh + ix;
      const double kx = g.k_of(ix);
      const double ky = g.k_of(my);
      const double k2 = kx * kx + ky * ky;
      coeffs[idx] = (k2 == 0.0) ? 0.0 : coeffs[idx] / k2;
    }
  }
  ScalarField out(src.grid);
  out.v = g.to_real(coeffs);
  return out;
}

ScalarField dealias_product(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f.grid, g.grid);
  ScalarField out(f.grid);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = f.v[k] * g.v[k];
  dealias_inplace(out);
  return out;
}

void dealias_inplace(ScalarField& f) {
  auto coeffs = f.grid->to_spectral(f.v);
  f.grid->apply_dealias(coeffs.data());
  f.v = f.grid->to_real(coeffs);
}

void dealias_inplace(VectorField& f) {
  for (int d = 0; d < 2; ++d) {
    auto coeffs = f.grid->to_spectral(f.c[d]);
    f.grid->apply_dealias(coeffs.data());
    f.c[d] = f.grid->to_real(coeffs);
  }
}

void dealias_inplace(OneFormField& f) {
  for (int d = 0; d < 2; ++d) {
    auto coeffs = f.grid->to_spectral(f.c[d]);
    f.grid->apply_dealias(coeffs.data());
    f.c[d] = f.grid->to_real(coeffs);
  }
}

double mean(const ScalarField& f) {
  double s = 0.0;
  for (double e : f.v) s += e;
  return s / double(f.v.size());
}

void subtract_mean(ScalarField& f) {
  const double m = mean(f);
  for (double& e : f.v) e -= m;
}

ConstantVector mean(const VectorField& v) {
  ConstantVector m;
  for (double e : v.c[0]) m.x += e;
  for (double e : v.c[1]) m.y += e;
  m.x /= double(v.c[0].size());
  m.y /= double(v.c[1].size());
  return m;
}

ConstantVector mean(const OneFormField& v) {
  ConstantVector m;
  for (double e : v.c[0]) m.x += e;
  for (double e : v.c[1]) m.y += e;
  m.x /= double(v.c[0].size());
  m.y /= double(v.c[1].size());
  return m;
}

namespace {
double sumsq(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}
double vmax(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s = std::max(s, std::abs(e));
  return s;
}
}  // namespace

double l2_norm(const ScalarField& f) {
  return std::sqrt(sumsq(f.v) * cell_area(*f.grid));
}
double l2_norm(const OneFormField& f) {
  return std::sqrt((sumsq(f.c[0]) + sumsq(f.c[1])) * cell_area(*f.grid));
}
double l2_norm(const VectorField& f) {
  return std::sqrt((sumsq(f.c[0]) + sumsq(f.c[1])) * cell_area(*f.grid));
}
double l2_norm(const Tensor2Field& f) {
  double s = 0.0;
  for (const auto& comp : f.c) s += sumsq(comp);
  return std::sqrt(s * cell_area(*f.grid));
}
double linf_norm(const ScalarField& f) { return vmax(f.v); }
double linf_norm(const OneFormField& f) {
  return std::max(vmax(f.c[0]), vmax(f.c[1]));
}
double linf_norm(const VectorField& f) {
  return std::max(vmax(f.c[0]), vmax(f.c[1]));
}
double linf_norm(const Tensor2Field& f) {
  double s = 0.0;
  for (const auto& comp : f.c) s = std::max(s, vmax(comp));
  return s;
}

double rel_l2_error(const ScalarField& a, const ScalarField& b) {
  check_same_grid(a.grid, b.grid);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k) {
    const double d = a.v[k] - b.v[k];
    num += d * d;
    den += b.v[k] * b.v[k];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

namespace {
double sobolev_sq(const TorusGrid& g, const std::vector<double>& values,
                  int k) {
  auto coeffs = g.to_spectral(values);
  const int nxh = g.spec_nx();
  double total = 0.0;
  for (int jy = 0; jy < g.n(); ++jy) {
    const int my = g.wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      const std::size_t idx = std::size_t(jy) * nxh + ix;
      const double kx = g.k_of(ix);
      const double ky = g.k_of(my);
      const double k2 = kx * kx + ky * ky;
      // half-spectrum: interior columns count twice
      const double mult = (ix == 0 || ix == g.n() / 2) ? 1.0 : 2.0;
      double w = 0.0, p = 1.0;
      for (int j = 0; j <= k; ++j) {
        w += p;
        p *= k2;
      }
      total += mult * w * std::norm(coeffs[idx]);
    }
  }
  // Parseval: grid-sum L2 norm = (L/n^2) * sqrt(sum |c|^2)
  const double scale = g.length() * g.length() / (double(g.size()) * g.size());
  return total * scale;
}
}  // namespace

double sobolev_norm(const ScalarField& f, int k) {
  return std::sqrt(sobolev_sq(*f.grid, f.v, k));
}
double sobolev_norm(const VectorField& f, int k) {
  return std::sqrt(sobolev_sq(*f.grid, f.c[0], k) +
                   sobolev_sq(*f.grid, f.c[1], k));
}

double integral(const ScalarField& f) {
  double s = 0.0;
  for (double e : f.v) s += e;
  return s * cell_area(*f.grid);
}

bool all_finite(const ScalarField& f) {
  for (double e : f.v)
    if (!std::isfinite(e)) return false;
  return true;
}

}  // namespace lasalt

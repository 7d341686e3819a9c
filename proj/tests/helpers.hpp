#pragma once

// Shared fixtures for the unit suites: deterministic random band-limited
// fields, finite-difference oracles, and hand-built trajectories.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lasalt/expectation.hpp"
#include "lasalt/ops.hpp"

namespace testutil {

using namespace lasalt;

// Real random field with spectral support |mx|,|my| <= kmax, zero mode
// removed, normalized to unit L-infinity.
inline ScalarField random_bandlimited(const GridPtr& grid, int kmax,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  ScalarField f(grid);
  const int n = grid->n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) f.at(i, j) = dist(rng);
  auto coeffs = grid->to_spectral(f.v);
  const int nxh = grid->spec_nx();
  for (int jy = 0; jy < n; ++jy) {
    const int my = grid->wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      if (std::abs(my) > kmax || ix > kmax || (ix == 0 && my == 0))
        coeffs[std::size_t(jy) * nxh + ix] = 0.0;
    }
  }
  f.v = grid->to_real(coeffs);
  const double m = linf_norm(f);
  if (m > 0.0) f.scale(1.0 / m);
  return f;
}

inline VectorField random_bandlimited_vec(const GridPtr& grid, int kmax,
                                          std::uint64_t seed) {
  VectorField v(grid);
  v.c[0] = random_bandlimited(grid, kmax, seed).v;
  v.c[1] = random_bandlimited(grid, kmax, seed + 1).v;
  return v;
}

// Divergence-free random field: grad-perp of a random stream function.
inline VectorField random_divfree(const GridPtr& grid, int kmax,
                                  std::uint64_t seed) {
  ScalarField psi = random_bandlimited(grid, kmax, seed);
  VectorField v(grid);
  v.c[0] = deriv(psi, 1).v;
  for (double& e : v.c[0]) e = -e;
  v.c[1] = deriv(psi, 0).v;
  return v;
}

// 4th-order centered finite difference along one axis (periodic).
inline ScalarField fd_deriv(const ScalarField& f, int axis) {
  const GridPtr& grid = f.grid;
  const int n = grid->n();
  const double h = grid->dx();
  ScalarField out(grid);
  auto wrap = [n](int i) { return (i % n + n) % n; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      auto v = [&](int s) {
        return axis == 0 ? f.at(wrap(i + s), j) : f.at(i, wrap(j + s));
      };
      out.at(i, j) = (-v(2) + 8.0 * v(1) - 8.0 * v(-1) + v(-2)) / (12.0 * h);
    }
  return out;
}

// Periodized Gaussian bump, seam-avoiding when centered.
inline ScalarField blob(const GridPtr& grid, double cx, double cy, double r,
                        double amp) {
  ScalarField f(grid);
  const double L = grid->length();
  const int n = grid->n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int px = -1; px <= 1; ++px)
        for (int py = -1; py <= 1; ++py) {
          const double dx = grid->x(i) - cx + px * L;
          const double dy = grid->y(j) - cy + py * L;
          s += std::exp(-(dx * dx + dy * dy) / (2.0 * r * r));
        }
      f.at(i, j) = amp * s;
    }
  return f;
}

inline ScalarField taylor_green(const GridPtr& grid, double a) {
  ScalarField f(grid);
  const int n = grid->n();
  const double w = kTwoPi / grid->length();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      f.at(i, j) = a * (std::cos(w * grid->x(i)) + std::cos(w * grid->y(j)));
  return f;
}

// Constant-in-time trajectory holding the supplied fields over [0, t_end].
inline ExpectationTrajectory frozen_trajectory(const GridPtr& grid,
                                               const VectorField& U,
                                               const ScalarField& Theta,
                                               const ScalarField& ptilde,
                                               double g, double dt,
                                               double t_end) {
  ExpectationTrajectory traj;
  traj.grid = grid;
  traj.dt = dt;
  traj.save_every = 1;
  traj.g = g;
  const long n_steps = std::lround(t_end / dt);
  for (long s : {0l, n_steps}) {
    ExpectationSnapshot snap;
    snap.t = s * dt;
    snap.step_index = s;
    snap.Omega = curl2d(U);
    snap.Theta = Theta;
    snap.ptilde = ptilde;
    snap.U = U;
    snap.Ubar = mean(U);
    traj.snapshots.push_back(std::move(snap));
  }
  return traj;
}

inline ExpectationTrajectory zero_trajectory(const GridPtr& grid, double g,
                                             double dt, double t_end) {
  return frozen_trajectory(grid, VectorField(grid), ScalarField(grid),
                           ScalarField(grid), g, dt, t_end);
}

// Spectral shift f(x - sx, y - sy) for closed-form transport oracles.
inline ScalarField spectral_shift(const ScalarField& f, double sx, double sy) {
  const GridPtr& grid = f.grid;
  auto coeffs = grid->to_spectral(f.v);
  const int nxh = grid->spec_nx();
  for (int jy = 0; jy < grid->n(); ++jy) {
    const int my = grid->wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      const double ph = -(grid->k_of(ix) * sx + grid->k_of(my) * sy);
      coeffs[std::size_t(jy) * nxh + ix] *=
          std::complex<double>(std::cos(ph), std::sin(ph));
    }
  }
  ScalarField out(grid);
  out.v = grid->to_real(coeffs);
  return out;
}

}  // namespace testutil

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lasalt/expectation.hpp"
#include "lasalt/lie.hpp"

using namespace lasalt;
using testutil::blob;
using testutil::random_bandlimited;
using testutil::taylor_green;

TEST_CASE("zero data is a fixed point") {
  auto grid = make_grid(16);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.2), grid);
  ExpectationOptions opts;
  opts.dt = 1e-3;
  opts.t_end = 0.02;
  auto traj = run_expectation(basis, ScalarField(grid), ScalarField(grid),
                              {0.0, 0.0}, opts);
  for (const auto& snap : traj.snapshots) {
    CHECK(linf_norm(snap.Omega) == 0.0);
    CHECK(linf_norm(snap.Theta) == 0.0);
    CHECK(linf_norm(snap.U) == 0.0);
    CHECK(snap.Ubar.x == 0.0);
    CHECK(snap.Ubar.y == 0.0);
  }
}

TEST_CASE("frozen-velocity theta matches the heat kernel per mode") {
  auto grid = make_grid(64);
  const double eps = 0.4, t_end = 0.1;
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(eps), grid);
  ScalarField th0 = random_bandlimited(grid, 10, 77);
  ExpectationOptions opts;
  opts.dt = 1e-3;
  opts.t_end = t_end;
  opts.save_every = 100;
  opts.freeze_velocity = true;
  opts.g = 0.0;
  auto traj = run_expectation(basis, ScalarField(grid), th0, {0, 0}, opts);

  auto coeffs = grid->to_spectral(th0.v);
  const int nxh = grid->spec_nx();
  for (int jy = 0; jy < grid->n(); ++jy) {
    const int my = grid->wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      const double kx = grid->k_of(ix), ky = grid->k_of(my);
      coeffs[std::size_t(jy) * nxh + ix] *=
          std::exp(-0.5 * eps * eps * (kx * kx + ky * ky) * t_end);
    }
  }
  ScalarField ref(grid);
  ref.v = grid->to_real(coeffs);
  CHECK(rel_l2_error(traj.snapshots.back().Theta, ref) < 1e-6);
}

TEST_CASE("g=0 scalar norm is nonincreasing") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    ScalarField th0 = random_bandlimited(grid, 8, 200 + s);
    ScalarField om0 = random_bandlimited(grid, 6, 300 + s);
    ExpectationOptions opts;
    opts.dt = 1e-3;
    opts.t_end = 0.02;
    opts.g = 0.0;
    auto traj = run_expectation(basis, om0, th0, {0, 0}, opts);
    double prev = 1e300;
    for (const auto& snap : traj.snapshots) {
      const double cur = l2_norm(snap.Theta);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("mean ODE: constant buoyancy gives linear growth of Ubar_y") {
  auto grid = make_grid(16);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.2), grid);
  ScalarField Theta(grid);
  const double c = 0.8, g = 1.3, dt = 1e-3;
  Theta.fill(c);
  VectorField V(grid);
  ConstantVector ub{0.0, 0.0};
  for (int s = 0; s < 100; ++s) ub = evolve_mean(ub, Theta, V, basis, g, dt);
  // dUbar_y/dt = g * average(Theta); the average is normalized, not the raw
  // integral, so a constant Theta=c drives Ubar_y = g c t.
  CHECK(std::abs(ub.y - g * c * 0.1) < 1e-12);
  CHECK(std::abs(ub.x) < 1e-14);

  ConstantVector fixed = evolve_mean({0.3, -0.2}, ScalarField(grid), V, basis,
                                     g, dt);
  CHECK(fixed.x == 0.3);
  CHECK(fixed.y == -0.2);
}

TEST_CASE("buoyancy quadrature equals the spectral zero mode") {
  auto grid = make_grid(32);
  ScalarField th = random_bandlimited(grid, 9, 404);
  th.axpy(1.0, blob(grid, 3.0, 3.0, 0.8, 0.5));
  auto coeffs = grid->to_spectral(th.v);
  const double zero_mode = coeffs[0].real() / double(grid->size());
  CHECK(std::abs(mean(th) - zero_mode) < 1e-12);
}

TEST_CASE("recover_pressure: single-mode buoyancy") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.2), grid);
  const double g = 2.0;
  ScalarField Theta(grid);
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i) Theta.at(i, j) = std::sin(grid->y(j));
  ScalarField p = recover_pressure(VectorField(grid), Theta, basis, g);
  // -Lap p = -g cos y  =>  p = -g cos y
  ScalarField ref(grid);
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i)
      ref.at(i, j) = -g * std::cos(grid->y(j));
  CHECK(rel_l2_error(p, ref) < 1e-12);

  CHECK(linf_norm(recover_pressure(VectorField(grid), ScalarField(grid), basis,
                                   g)) == 0.0);
}

TEST_CASE("recover_pressure round trip on a real flow state") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  ScalarField Om = taylor_green(grid, 0.5);
  subtract_mean(Om);
  VectorField U = biot_savart(Om);
  ScalarField Theta = blob(grid, 3.1, 3.1, 0.7, 1.0);
  double residual = 0.0;
  ScalarField p = recover_pressure(U, Theta, basis, 1.0, &residual);
  // independently assembled Poisson source
  ScalarField src = divergence(as_vector(lie_oneform(U, as_oneform(U))));
  src.axpy(-1.0, deriv(Theta, 1));
  src.axpy(-0.5,
           divergence(as_vector(double_lie(basis.xis, as_oneform(U)))));
  subtract_mean(src);
  ScalarField lap = deriv(deriv(p, 0), 0);
  lap.axpy(1.0, deriv(deriv(p, 1), 1));
  lap.scale(-1.0);
  CHECK(rel_l2_error(lap, src) < 1e-10);
  CHECK(std::abs(residual) < 1e-8);  // divergence-free U: source mean tiny
}

TEST_CASE("theta mass is conserved for constant noise") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  ScalarField Om = taylor_green(grid, 0.5);
  subtract_mean(Om);
  ScalarField Theta = blob(grid, 3.1, 3.1, 0.7, 1.0);
  ExpectationOptions opts;
  opts.dt = 1e-3;
  opts.t_end = 0.1;
  auto traj = run_expectation(basis, Om, Theta, {0, 0}, opts);
  const double m0 = integral(traj.snapshots.front().Theta);
  const double m1 = integral(traj.snapshots.back().Theta);
  CHECK(std::abs(m1 - m0) / 0.1 < 1e-10);
  // Omega stays mean-free
  CHECK(std::abs(mean(traj.snapshots.back().Omega)) < 1e-10);
}

TEST_CASE("degenerate noise is rejected, CFL violation raises Instability") {
  auto grid = make_grid(16);
  NoiseSpec degenerate;
  XiSpec xs;
  xs.constant = {0.3, 0.0};
  degenerate.xis.push_back(xs);
  NoiseBasis db = build_noise_basis(degenerate, grid);
  ExpectationOptions opts;
  opts.dt = 1e-3;
  opts.t_end = 0.01;
  CHECK_THROWS_AS(run_expectation(db, ScalarField(grid), ScalarField(grid),
                                  {0, 0}, opts),
                  EllipticityViolation);

  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.2), grid);
  ScalarField Om = taylor_green(grid, 5.0);
  subtract_mean(Om);
  ExpectationOptions bad;
  bad.dt = 0.5;  // grossly violates the advective CFL
  bad.t_end = 1.0;
  CHECK_THROWS_AS(run_expectation(basis, Om, ScalarField(grid), {0, 0}, bad),
                  Instability);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lasalt/moments.hpp"

using namespace lasalt;
using testutil::blob;
using testutil::frozen_trajectory;
using testutil::taylor_green;

namespace {

ExpectationTrajectory real_trajectory(const GridPtr& grid,
                                      const NoiseBasis& basis, double t_end) {
  ScalarField Om = taylor_green(grid, 0.5);
  subtract_mean(Om);
  ScalarField Th =
      blob(grid, grid->length() / 2, grid->length() / 2, 0.7, 1.0);
  ExpectationOptions opts;
  opts.dt = 1e-3;
  opts.t_end = t_end;
  return run_expectation(basis, Om, Th, {0, 0}, opts);
}

}  // namespace

TEST_CASE("constant mean field produces no moment growth") {
  auto grid = make_grid(16);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  ScalarField Theta(grid);
  Theta.fill(0.9);
  auto traj = frozen_trajectory(grid, VectorField(grid), Theta,
                                ScalarField(grid), 1.0, 1e-3, 0.02);
  MomentState st = make_zero_moments(grid, 4);
  for (int s = 0; s < 20; ++s)
    st = step_moments(st, traj, basis, 1.0, 1e-3, true);
  CHECK(linf_norm(st.Theta2) == 0.0);
  CHECK(linf_norm(st.dTheta2) == 0.0);
  CHECK(linf_norm(st.Cross) == 0.0);
  CHECK(linf_norm(st.U2) == 0.0);
  for (const auto& ap : st.Ap) CHECK(linf_norm(ap) == 0.0);
}

TEST_CASE("theta covariance matches the closed-form Fourier solution") {
  // frozen E[u]=0, single xi=(eps,0), frozen E[theta]=sin x:
  //   d_t T = (eps^2/2) T_xx + eps^2 cos^2 x.
  // With cos^2 x = 1/2 + cos(2x)/2 the solution stays in {1, cos 2x}:
  //   T = (eps^2/2) t + (1 - e^{-2 eps^2 t}) cos(2x)/4.
  auto grid = make_grid(64);
  const double eps = 0.4, dt = 1e-3, t_end = 0.1;
  NoiseSpec spec;
  XiSpec xs;
  xs.constant = {eps, 0.0};
  spec.xis.push_back(xs);
  NoiseBasis basis = build_noise_basis(spec, grid);
  ScalarField Theta(grid);
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i) Theta.at(i, j) = std::sin(grid->x(i));
  auto traj = frozen_trajectory(grid, VectorField(grid), Theta,
                                ScalarField(grid), 0.0, dt, t_end);
  ScalarField T(grid);
  double t = 0.0;
  for (int s = 0; s < 100; ++s) {
    T = step_theta_covariance(T, traj, basis, t, dt);
    t += dt;
  }
  ScalarField ref(grid);
  const double e2 = eps * eps;
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i)
      ref.at(i, j) = 0.5 * e2 * t_end +
                     0.25 * (1.0 - std::exp(-2.0 * e2 * t_end)) *
                         std::cos(2.0 * grid->x(i));
  CHECK(rel_l2_error(T, ref) < 1e-4);
}

TEST_CASE("tensor moments stay symmetric along a real trajectory") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  auto traj = real_trajectory(grid, basis, 0.05);
  MomentState st = make_zero_moments(grid, 2);
  for (int s = 0; s < 50; ++s)
    st = step_moments(st, traj, basis, 1.0, 1e-3, true);
  for (const Tensor2Field* T : {&st.dTheta2, &st.U2, &st.Cross}) {
    double asym = 0.0;
    for (std::size_t k = 0; k < grid->size(); ++k)
      asym = std::max(asym, std::abs(T->comp(0, 1)[k] - T->comp(1, 0)[k]));
    CHECK(asym < 1e-10);
  }
  CHECK(linf_norm(st.Theta2) > 0.0);  // sources actually active
}

TEST_CASE("p=2 recursion member reproduces the covariance stepper") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  auto traj = real_trajectory(grid, basis, 0.02);
  ScalarField T(grid);
  std::vector<ScalarField> Ap{ScalarField(grid)};  // holds p=2 only
  double t = 0.0;
  for (int s = 0; s < 20; ++s) {
    ScalarField T2 = step_theta_covariance(T, traj, basis, t, 1e-3);
    ScalarField A2 = step_pth_moment(Ap, traj, basis, 2, t, 1e-3);
    CHECK(rel_l2_error(A2, T2) < 1e-12);
    T = std::move(T2);
    Ap[0] = std::move(A2);
    t += 1e-3;
  }
}

TEST_CASE("U2 decays under pure transport-diffusion") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  // constant E[u], g=0: source vanishes, leaving advection-diffusion
  VectorField U(grid);
  U.fill(0.4);
  auto traj = frozen_trajectory(grid, U, ScalarField(grid), ScalarField(grid),
                                0.0, 1e-3, 0.05);
  Tensor2Field U2(grid, true);
  ScalarField bump = blob(grid, 3.1, 3.1, 0.8, 1.0);
  U2.comp(0, 0) = bump.v;
  U2.comp(1, 1) = bump.v;
  Tensor2Field zero(grid, true);
  double prev = l2_norm(U2), t = 0.0;
  for (int s = 0; s < 50; ++s) {
    U2 = step_u_covariance(U2, zero, zero, traj, basis, 0.0, t, 1e-3);
    const double cur = l2_norm(U2);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
    t += 1e-3;
  }
}

TEST_CASE("positivity report finds the minimum and run_moments keeps A2 sane") {
  auto grid = make_grid(32);
  std::vector<ScalarField> zeros{ScalarField(grid), ScalarField(grid),
                                 ScalarField(grid)};
  PositivityReport r0 = even_moment_positivity_check(zeros);
  CHECK(r0.min_A2 == 0.0);
  CHECK(r0.has_A4);
  CHECK(r0.min_A4 == 0.0);

  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  auto traj = real_trajectory(grid, basis, 0.1);
  MomentOptions mo;
  mo.dt = 1e-3;
  mo.t_end = 0.1;
  mo.P = 4;
  MomentState fin = run_moments(traj, basis, mo);
  PositivityReport r = even_moment_positivity_check(fin.Ap);
  const double scale = linf_norm(fin.Ap.front());
  CHECK(r.min_A2 >= -1e-4 * scale);
}

TEST_CASE("identity log accumulates both sides without gating") {
  auto grid = make_grid(32);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.3), grid);
  auto traj = real_trajectory(grid, basis, 0.02);
  IdentityLog log;
  MomentOptions mo;
  mo.dt = 1e-3;
  mo.t_end = 0.02;
  run_moments(traj, basis, mo, [&](const MomentState& st) {
    log.accumulate(st.Theta2, traj.theta_at(st.t), traj.dt);
  });
  CHECK(log.lhs >= 0.0);
  CHECK(log.rhs > 0.0);  // the mean field has gradients from the start
}

TEST_CASE("moment run is bitwise repeatable") {
  auto grid = make_grid(16);
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.25), grid);
  auto traj = real_trajectory(grid, basis, 0.02);
  MomentOptions mo;
  mo.dt = 1e-3;
  mo.t_end = 0.02;
  mo.P = 3;
  MomentState a = run_moments(traj, basis, mo);
  MomentState b = run_moments(traj, basis, mo);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    CHECK(a.Theta2.v[k] == b.Theta2.v[k]);
    CHECK(a.Ap.back().v[k] == b.Ap.back().v[k]);
  }
}

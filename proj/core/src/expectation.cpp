#include "lasalt/expectation.hpp"

#include <algorithm>
#include <cmath>

#include "lasalt/lie.hpp"
#include "lasalt/ops.hpp"

namespace lasalt {

namespace {

struct StateVec {
  ScalarField Omega;
  ScalarField Theta;
  ConstantVector Ubar;

  void axpy(double a, const StateVec& o) {
    Omega.axpy(a, o.Omega);
    Theta.axpy(a, o.Theta);
    Ubar.x += a * o.Ubar.x;
    Ubar.y += a * o.Ubar.y;
  }
};

VectorField reconstruct_velocity(const ScalarField& Omega,
                                 const ConstantVector& Ubar) {
  VectorField U = biot_savart(Omega);
  for (double& e : U.c[0]) e += Ubar.x;
  for (double& e : U.c[1]) e += Ubar.y;
  return U;
}

ConstantVector mean_rhs(const ScalarField& Theta, const VectorField& V,
                        const ConstantVector& Ubar, const NoiseBasis& basis,
                        double g, MeanDiagnostics* diag) {
  ConstantVector r{0.0, g * mean(Theta)};
  if (diag) {
    diag->buoyancy_term[0] = 0.0;
    diag->buoyancy_term[1] = r.y;
  }
  if (!basis.all_constant()) {
    // (1/2) sum_k avg(L^2_xi V), V as the momentum one-form
    const OneFormField dlV = double_lie(basis.xis, as_oneform(V));
    const ConstantVector mV = mean(dlV);
    r.x += 0.5 * mV.x;
    r.y += 0.5 * mV.y;
    // (1/2) sum_k avg(L^2_xi Ubar), Ubar as a constant vector field
    VectorField ub(V.grid);
    ub.c[0].assign(ub.c[0].size(), Ubar.x);
    ub.c[1].assign(ub.c[1].size(), Ubar.y);
    const VectorField dlU = double_lie(basis.xis, ub);
    const ConstantVector mU = mean(dlU);
    r.x += 0.5 * mU.x;
    r.y += 0.5 * mU.y;
    if (diag) {
      diag->lie_v_term[0] = 0.5 * mV.x;
      diag->lie_v_term[1] = 0.5 * mV.y;
      diag->lie_ubar_term[0] = 0.5 * mU.x;
      diag->lie_ubar_term[1] = 0.5 * mU.y;
    }
  } else if (diag) {
    diag->lie_v_term[0] = diag->lie_v_term[1] = 0.0;
    diag->lie_ubar_term[0] = diag->lie_ubar_term[1] = 0.0;
  }
  return r;
}

StateVec rhs(const StateVec& s, const NoiseBasis& basis, double g,
             bool freeze_velocity, bool include_diffusion) {
  StateVec out{ScalarField(s.Omega.grid), ScalarField(s.Theta.grid), {}};
  if (freeze_velocity) {
    out.Omega = deriv(s.Theta, 0);
    out.Omega.scale(g);
    // Theta RHS stays zero (no advection), Ubar frozen too.
  } else {
    const VectorField U = reconstruct_velocity(s.Omega, s.Ubar);
    out.Omega = lie_scalar(U, s.Omega);
    out.Omega.scale(-1.0);
    out.Omega.axpy(g, deriv(s.Theta, 0));
    out.Theta = lie_scalar(U, s.Theta);
    out.Theta.scale(-1.0);
    VectorField V = U;
    for (double& e : V.c[0]) e -= s.Ubar.x;
    for (double& e : V.c[1]) e -= s.Ubar.y;
    out.Ubar = mean_rhs(s.Theta, V, s.Ubar, basis, g, nullptr);
  }
  if (include_diffusion) {
    out.Omega.axpy(0.5, double_lie(basis.xis, s.Omega));
    out.Theta.axpy(0.5, double_lie(basis.xis, s.Theta));
  }
  return out;
}

StateVec rk4(const StateVec& s, const NoiseBasis& basis, double g, double dt,
             bool freeze_velocity, bool include_diffusion) {
  const StateVec k1 = rhs(s, basis, g, freeze_velocity, include_diffusion);
  StateVec s2 = s;
  s2.axpy(0.5 * dt, k1);
  const StateVec k2 = rhs(s2, basis, g, freeze_velocity, include_diffusion);
  StateVec s3 = s;
  s3.axpy(0.5 * dt, k2);
  const StateVec k3 = rhs(s3, basis, g, freeze_velocity, include_diffusion);
  StateVec s4 = s;
  s4.axpy(dt, k3);
  const StateVec k4 = rhs(s4, basis, g, freeze_velocity, include_diffusion);
  StateVec out = s;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  return out;
}

/// Exact integrator of the constant-coefficient diffusion
/// (1/2) sum_k (xi_k . grad)^2, spectral symbol -(1/2) sum_k (xi_k . k)^2.
void apply_heat_factor(ScalarField& f, const NoiseBasis& basis, double h) {
  const TorusGrid& g = *f.grid;
  auto coeffs = g.to_spectral(f.v);
  const int nxh = g.spec_nx();
  for (int jy = 0; jy < g.n(); ++jy) {
    const int my = g.wavenumber(jy);
    for (int ix = 0; ix < nxh; ++ix) {
      double s = 0.0;
      for (const XiSpec& xi : basis.spec.xis) {
        const double dot =
            xi.constant[0] * g.k_of(ix) + xi.constant[1] * g.k_of(my);
        s += dot * dot;
      }
      coeffs[std::size_t(jy) * nxh + ix] *= std::exp(-0.5 * s * h);
    }
  }
  f.v = g.to_real(coeffs);
}

}  // namespace

ExpectationState step_expectation(const ExpectationState& state,
                                  const NoiseBasis& basis, double g, double dt,
                                  bool freeze_velocity) {
  StateVec s{state.Omega, state.Theta, state.Ubar};
  const bool constant_xi = basis.all_constant();
  if (constant_xi) {
    // Strang split: exact diffusion half-steps around the RK4 transport step.
    apply_heat_factor(s.Omega, basis, 0.5 * dt);
    apply_heat_factor(s.Theta, basis, 0.5 * dt);
    s = rk4(s, basis, g, dt, freeze_velocity, false);
    apply_heat_factor(s.Omega, basis, 0.5 * dt);
    apply_heat_factor(s.Theta, basis, 0.5 * dt);
  } else {
    s = rk4(s, basis, g, dt, freeze_velocity, true);
  }
  return ExpectationState{std::move(s.Omega), std::move(s.Theta), s.Ubar,
                          state.t + dt};
}

ConstantVector evolve_mean(const ConstantVector& Ubar, const ScalarField& Theta,
                           const VectorField& V, const NoiseBasis& basis,
                           double g, double dt, MeanDiagnostics* diag) {
  // Theta and V are frozen over the substep, so the ODE RHS is constant and
  // the RK4 substep collapses to a single increment.
  const ConstantVector r = mean_rhs(Theta, V, Ubar, basis, g, diag);
  return ConstantVector{Ubar.x + dt * r.x, Ubar.y + dt * r.y};
}

ScalarField recover_pressure(const VectorField& U, const ScalarField& Theta,
                             const NoiseBasis& basis, double g,
                             double* mean_residual) {
  const OneFormField u_form = as_oneform(U);
  const OneFormField adv = lie_oneform(U, u_form);
  const OneFormField dl = double_lie(basis.xis, u_form);
  ScalarField src = divergence(as_vector(adv));
  src.axpy(-g, deriv(Theta, 1));
  src.axpy(-0.5, divergence(as_vector(dl)));
  const double m = mean(src);
  if (mean_residual) *mean_residual = m;
  for (double& e : src.v) e -= m;
  return poisson_solve(src);
}

void ExpectationTrajectory::locate(double t, std::size_t& i0, std::size_t& i1,
                                   double& w) const {
  if (snapshots.empty()) throw TrajectoryExhausted("trajectory is empty");
  const double tol = 1e-9 * std::max(1.0, std::abs(t_end()));
  if (t < t_begin() - tol || t > t_end() + tol)
    throw TrajectoryExhausted("time " + std::to_string(t) +
                              " outside trajectory range");
  if (snapshots.size() == 1) {
    i0 = i1 = 0;
    w = 0.0;
    return;
  }
  auto it = std::lower_bound(
      snapshots.begin(), snapshots.end(), t,
      [](const ExpectationSnapshot& s, double tt) { return s.t < tt; });
  if (it == snapshots.end()) {
    i0 = i1 = snapshots.size() - 1;
    w = 0.0;
    return;
  }
  i1 = std::size_t(it - snapshots.begin());
  if (i1 == 0 || std::abs(it->t - t) <= tol) {
    i0 = i1;
    w = 0.0;
    return;
  }
  i0 = i1 - 1;
  const double span = snapshots[i1].t - snapshots[i0].t;
  w = (t - snapshots[i0].t) / span;
}

VectorField ExpectationTrajectory::velocity_at(double t) const {
  std::size_t i0, i1;
  double w;
  locate(t, i0, i1, w);
  VectorField out = snapshots[i0].U;
  if (w != 0.0) {
    out.scale(1.0 - w);
    out.axpy(w, snapshots[i1].U);
  }
  return out;
}

ScalarField ExpectationTrajectory::theta_at(double t) const {
  std::size_t i0, i1;
  double w;
  locate(t, i0, i1, w);
  ScalarField out = snapshots[i0].Theta;
  if (w != 0.0) {
    out.scale(1.0 - w);
    out.axpy(w, snapshots[i1].Theta);
  }
  return out;
}

ScalarField ExpectationTrajectory::ptilde_at(double t) const {
  std::size_t i0, i1;
  double w;
  locate(t, i0, i1, w);
  ScalarField out = snapshots[i0].ptilde;
  if (w != 0.0) {
    out.scale(1.0 - w);
    out.axpy(w, snapshots[i1].ptilde);
  }
  return out;
}

ConstantVector ExpectationTrajectory::ubar_at(double t) const {
  std::size_t i0, i1;
  double w;
  locate(t, i0, i1, w);
  const ConstantVector& a = snapshots[i0].Ubar;
  const ConstantVector& b = snapshots[i1].Ubar;
  return ConstantVector{(1.0 - w) * a.x + w * b.x, (1.0 - w) * a.y + w * b.y};
}

ExpectationTrajectory run_expectation(const NoiseBasis& basis,
                                      const ScalarField& Omega0,
                                      const ScalarField& Theta0,
                                      const ConstantVector& Ubar0,
                                      const ExpectationOptions& opts) {
  if (!opts.allow_degenerate) basis.require_elliptic();
  if (opts.dt <= 0.0 || opts.t_end < 0.0 || opts.save_every < 1)
    throw ConfigError("run_expectation: invalid dt/t_end/save_every");

  ExpectationState state;
  state.Omega = Omega0;
  state.Theta = Theta0;
  state.Ubar = Ubar0;
  state.t = 0.0;
  if (std::abs(mean(state.Omega)) > 1e-8)
    throw NonZeroMean("run_expectation: initial vorticity must be mean-free");
  subtract_mean(state.Omega);
  dealias_inplace(state.Omega);
  dealias_inplace(state.Theta);

  const GridPtr grid = Omega0.grid;
  const long n_steps = std::lround(opts.t_end / opts.dt);
  const double init_norm =
      l2_norm(state.Omega) + l2_norm(state.Theta) + 1.0;

  // max spectral radius of a(x) = sum xi xi^T over nodes (diffusive CFL)
  double a_max = 0.0;
  for (std::size_t m = 0; m < grid->size(); ++m) {
    double a11 = 0.0, a22 = 0.0, a12 = 0.0;
    for (const VectorField& xi : basis.xis) {
      a11 += xi.c[0][m] * xi.c[0][m];
      a22 += xi.c[1][m] * xi.c[1][m];
      a12 += xi.c[0][m] * xi.c[1][m];
    }
    const double disc =
        std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
    a_max = std::max(a_max, 0.5 * (a11 + a22) + disc);
  }
  const bool constant_xi = basis.all_constant();
  const double h = grid->dx();

  ExpectationTrajectory traj;
  traj.grid = grid;
  traj.dt = opts.dt;
  traj.save_every = opts.save_every;
  traj.g = opts.g;

  auto snapshot = [&](long step) {
    ExpectationSnapshot snap;
    snap.t = state.t;
    snap.step_index = step;
    snap.Omega = state.Omega;
    snap.Theta = state.Theta;
    snap.Ubar = state.Ubar;
    snap.U = opts.freeze_velocity ? VectorField(grid)
                                  : reconstruct_velocity(state.Omega,
                                                         state.Ubar);
    snap.ptilde = recover_pressure(snap.U, state.Theta, basis, opts.g);
    traj.snapshots.push_back(std::move(snap));
  };

  for (long step = 0; step < n_steps; ++step) {
    if (step % opts.save_every == 0) snapshot(step);
    if (!opts.freeze_velocity) {
      const double u_max =
          linf_norm(reconstruct_velocity(state.Omega, state.Ubar));
      if (u_max > 0.0 && opts.dt > 0.5 * h / u_max)
        throw Instability("advective CFL violated (dt too large)", step);
    }
    if (!constant_xi && a_max > 0.0 && opts.dt > 0.25 * h * h / a_max)
      throw Instability("diffusive stability bound violated", step);

    state = step_expectation(state, basis, opts.g, opts.dt,
                             opts.freeze_velocity);
    if (l2_norm(state.Omega) + l2_norm(state.Theta) > 1e6 * init_norm)
      throw Instability("expectation solve diverged", step + 1);
  }
  snapshot(n_steps);
  return traj;
}

}  // namespace lasalt

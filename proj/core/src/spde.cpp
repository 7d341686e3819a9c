#include "lasalt/spde.hpp"

#include <cmath>
#include <functional>

#include "lasalt/lie.hpp"
#include "lasalt/ops.hpp"

namespace lasalt {

namespace {

ScalarField sawtooth_y(const GridPtr& grid) {
  ScalarField y(grid);
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i) y.at(i, j) = grid->y(j);
  return y;
}

struct SVec {
  ScalarField theta;
  ScalarField omega;
  std::optional<OneFormField> u;

  void axpy(double a, const SVec& o) {
    theta.axpy(a, o.theta);
    omega.axpy(a, o.omega);
    if (u) u->axpy(a, *o.u);
  }
  void scale(double a) {
    theta.scale(a);
    omega.scale(a);
    if (u) u->scale(a);
  }
};

SVec from_state(const SpdeState& s, bool enable_u) {
  SVec v{s.theta, s.omega, {}};
  if (enable_u) {
    if (!s.u) throw ConfigError("u-equation enabled but state carries no u");
    v.u = *s.u;
  }
  return v;
}

// Deterministic drift of the linear "weather" system at time t.
SVec drift(const SVec& s, const ExpectationTrajectory& traj,
           const NoiseBasis& basis, double g, double t, bool ito) {
  const VectorField U = traj.velocity_at(t);
  SVec out{lie_scalar(U, s.theta), lie_scalar(U, s.omega), {}};
  out.theta.scale(-1.0);
  out.omega.scale(-1.0);
  out.omega.axpy(g, deriv(s.theta, 0));
  if (s.u) {
    const ScalarField Theta = traj.theta_at(t);
    const ScalarField ptilde = traj.ptilde_at(t);
    OneFormField du = lie_oneform(U, *s.u);
    du.scale(-1.0);
    du.axpy(-1.0, gradient(ptilde));
    for (std::size_t m = 0; m < du.c[1].size(); ++m)
      du.c[1][m] += g * Theta.v[m];
    // -g y d(theta - Theta); quantitative runs keep support off the y seam
    ScalarField theta_prime = s.theta;
    theta_prime.axpy(-1.0, Theta);
    const OneFormField dtp = exterior_d(theta_prime);
    const ScalarField y = sawtooth_y(s.theta.grid);
    for (int d = 0; d < 2; ++d) {
      ScalarField prod(s.theta.grid);
      for (std::size_t m = 0; m < prod.v.size(); ++m)
        prod.v[m] = y.v[m] * dtp.c[d][m];
      dealias_inplace(prod);
      for (std::size_t m = 0; m < prod.v.size(); ++m)
        du.c[d][m] -= g * prod.v[m];
    }
    out.u = std::move(du);
  }
  if (ito) {
    out.theta.axpy(0.5, double_lie(basis.xis, s.theta));
    out.omega.axpy(0.5, double_lie(basis.xis, s.omega));
    if (s.u) out.u->axpy(0.5, double_lie(basis.xis, *s.u));
  }
  return out;
}

// L_{xi_k} applied to every evolved field (enters with a minus sign).
SVec noise_op(const SVec& s, const VectorField& xi) {
  SVec out{lie_scalar(xi, s.theta), lie_scalar(xi, s.omega), {}};
  if (s.u) out.u = lie_oneform(xi, *s.u);
  return out;
}

double state_norm(const SVec& s) {
  double n = l2_norm(s.theta) + l2_norm(s.omega);
  if (s.u) n += l2_norm(*s.u);
  return n;
}

SpdeState to_state(SVec&& v, double t, long step_index) {
  SpdeState out;
  out.theta = std::move(v.theta);
  out.omega = std::move(v.omega);
  if (v.u) out.u = std::move(*v.u);
  out.t = t;
  out.step_index = step_index;
  return out;
}

void guard_growth(double before, double after, long step) {
  if (after > 10.0 * (before + 1e-12))
    throw Instability("stochastic step grew by more than 10x in L2", step);
}

}  // namespace

SpdeState step_stratonovich(const SpdeState& state,
                            const ExpectationTrajectory& traj,
                            const NoiseBasis& basis, double g, double dt,
                            const std::vector<double>& increments,
                            bool enable_u) {
  if (increments.size() != basis.count())
    throw ConfigError("increment row does not match noise basis size");
  const SVec x = from_state(state, enable_u);
  const double norm0 = state_norm(x);

  const SVec b0 = drift(x, traj, basis, g, state.t, false);
  std::vector<SVec> s0;
  s0.reserve(basis.count());
  for (const VectorField& xi : basis.xis) s0.push_back(noise_op(x, xi));

  SVec pred = x;
  pred.axpy(dt, b0);
  for (std::size_t k = 0; k < basis.count(); ++k)
    pred.axpy(-increments[k], s0[k]);

  const SVec b1 = drift(pred, traj, basis, g, state.t + dt, false);
  SVec next = x;
  next.axpy(0.5 * dt, b0);
  next.axpy(0.5 * dt, b1);
  for (std::size_t k = 0; k < basis.count(); ++k) {
    next.axpy(-0.5 * increments[k], s0[k]);
    next.axpy(-0.5 * increments[k], noise_op(pred, basis.xis[k]));
  }
  guard_growth(norm0, state_norm(next), state.step_index);
  return to_state(std::move(next), state.t + dt, state.step_index + 1);
}

SpdeState step_ito(const SpdeState& state, const ExpectationTrajectory& traj,
                   const NoiseBasis& basis, double g, double dt,
                   const std::vector<double>& increments, bool enable_u) {
  if (increments.size() != basis.count())
    throw ConfigError("increment row does not match noise basis size");
  const SVec x = from_state(state, enable_u);
  const double norm0 = state_norm(x);
  SVec next = x;
  next.axpy(dt, drift(x, traj, basis, g, state.t, true));
  for (std::size_t k = 0; k < basis.count(); ++k)
    next.axpy(-increments[k], noise_op(x, basis.xis[k]));
  guard_growth(norm0, state_norm(next), state.step_index);
  return to_state(std::move(next), state.t + dt, state.step_index + 1);
}

std::pair<OneFormField, ScalarField> fluctuations(
    const SpdeState& state, const ExpectationTrajectory& traj) {
  if (state.t < traj.t_begin() - 1e-9 || state.t > traj.t_end() + 1e-9)
    throw TimeMisaligned("state time outside the expectation trajectory");
  ScalarField theta_prime = state.theta;
  theta_prime.axpy(-1.0, traj.theta_at(state.t));
  OneFormField u_prime(state.theta.grid);
  if (state.u) {
    u_prime = *state.u;
    u_prime.axpy(-1.0, as_oneform(traj.velocity_at(state.t)));
  }
  return {std::move(u_prime), std::move(theta_prime)};
}

SpdeState make_initial_state(const ScalarField& theta0,
                             const ScalarField& omega0,
                             const std::optional<OneFormField>& u0) {
  SpdeState s;
  s.theta = theta0;
  s.omega = omega0;
  dealias_inplace(s.theta);
  dealias_inplace(s.omega);
  if (u0) {
    s.u = *u0;
    dealias_inplace(*s.u);
  }
  return s;
}

SpdeState run_member(const ExpectationTrajectory& traj, const NoiseBasis& basis,
                     const SpdeOptions& opts, const BrownianPath& path,
                     const SpdeState& initial,
                     const std::function<void(const SpdeState&)>& observe) {
  SpdeState state = initial;
  if (observe) observe(state);
  std::vector<double> incs(basis.count());
  for (int step = 0; step < path.n_steps; ++step) {
    for (std::size_t k = 0; k < basis.count(); ++k)
      incs[k] = path.increments[k][step];
    state = (opts.scheme == SpdeScheme::stratonovich)
                ? step_stratonovich(state, traj, basis, opts.g, opts.dt, incs,
                                    opts.enable_u)
                : step_ito(state, traj, basis, opts.g, opts.dt, incs,
                           opts.enable_u);
    if (observe) observe(state);
  }
  return state;
}

ForcingCache assemble_forcing(const ExpectationTrajectory& traj, double g) {
  ForcingCache cache;
  for (const ExpectationSnapshot& snap : traj.snapshots) {
    const ScalarField y = sawtooth_y(traj.grid);
    ScalarField q = snap.ptilde;
    for (std::size_t m = 0; m < q.v.size(); ++m)
      q.v[m] -= g * snap.Theta.v[m] * y.v[m];
    OneFormField f = gradient(q);
    f.scale(-1.0);
    for (std::size_t m = 0; m < f.c[1].size(); ++m)
      f.c[1][m] += g * snap.Theta.v[m];
    cache.times.push_back(snap.t);
    cache.f_literal.push_back(std::move(f));
  }
  return cache;
}

OneFormField ForcingCache::at(double t) const {
  if (times.empty()) throw TrajectoryExhausted("forcing cache is empty");
  const double tol = 1e-9 * std::max(1.0, std::abs(times.back()));
  if (t < times.front() - tol || t > times.back() + tol)
    throw TrajectoryExhausted("time outside forcing cache range");
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  std::size_t i1 = std::size_t(it - times.begin());
  if (i1 >= times.size()) i1 = times.size() - 1;
  if (i1 == 0 || std::abs(times[i1] - t) <= tol) return f_literal[i1];
  const std::size_t i0 = i1 - 1;
  const double w = (t - times[i0]) / (times[i1] - times[i0]);
  OneFormField out = f_literal[i0];
  out.scale(1.0 - w);
  out.axpy(w, f_literal[i1]);
  return out;
}

OneFormField char_forcing(const ExpectationTrajectory& traj, double g,
                          double t) {
  const ScalarField Theta = traj.theta_at(t);
  const ScalarField ptilde = traj.ptilde_at(t);
  OneFormField f = gradient(ptilde);
  for (std::size_t m = 0; m < f.c[1].size(); ++m)
    f.c[1][m] -= g * Theta.v[m];
  const ScalarField y = sawtooth_y(traj.grid);
  const OneFormField dTheta = exterior_d(Theta);
  for (int d = 0; d < 2; ++d) {
    ScalarField prod(traj.grid);
    for (std::size_t m = 0; m < prod.v.size(); ++m)
      prod.v[m] = y.v[m] * dTheta.c[d][m];
    dealias_inplace(prod);
    for (std::size_t m = 0; m < prod.v.size(); ++m)
      f.c[d][m] -= g * prod.v[m];
  }
  return f;
}

bool seam_safe(const ScalarField& f, double margin_fraction, double tol) {
  const TorusGrid& g = *f.grid;
  const double L = g.length();
  double seam_max = 0.0;
  const double total_max = linf_norm(f);
  for (int j = 0; j < g.n(); ++j) {
    const double y = g.y(j);
    const double dist = std::min(y, L - y);
    if (dist < margin_fraction * L) {
      for (int i = 0; i < g.n(); ++i)
        seam_max = std::max(seam_max, std::abs(f.at(i, j)));
    }
  }
  return seam_max <= tol * (total_max + 1e-300);
}

}  // namespace lasalt

#include "lasalt/characteristics.hpp"

#include <cmath>

#include "lasalt/ops.hpp"

namespace lasalt {

namespace {

double wrap_coord(double x, double L) {
  x = std::fmod(x, L);
  if (x < 0.0) x += L;
  return x;
}

// Catmull-Rom weights for the four stencil points at offsets -1..2.
void cr_weights(double f, double w[4]) {
  const double f2 = f * f, f3 = f2 * f;
  w[0] = 0.5 * (-f + 2.0 * f2 - f3);
  w[1] = 0.5 * (2.0 - 5.0 * f2 + 3.0 * f3);
  w[2] = 0.5 * (f + 4.0 * f2 - 3.0 * f3);
  w[3] = 0.5 * (-f2 + f3);
}

struct VelocitySampler {
  const VectorField& U;

  void operator()(double x, double y, double out[2]) const {
    const TorusGrid& g = *U.grid;
    const int n = g.n();
    const double h = g.dx();
    const double ux = wrap_coord(x, g.length()) / h;
    const double uy = wrap_coord(y, g.length()) / h;
    int i0 = int(std::floor(ux)), j0 = int(std::floor(uy));
    double wx[4], wy[4];
    cr_weights(ux - i0, wx);
    cr_weights(uy - j0, wy);
    out[0] = out[1] = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int j = ((j0 + b - 1) % n + n) % n;
      double rowx = 0.0, rowy = 0.0;
      for (int a = 0; a < 4; ++a) {
        const int i = ((i0 + a - 1) % n + n) % n;
        const std::size_t m = std::size_t(j) * n + i;
        rowx += wx[a] * U.c[0][m];
        rowy += wx[a] * U.c[1][m];
      }
      out[0] += wy[b] * rowx;
      out[1] += wy[b] * rowy;
    }
  }
};

}  // namespace

double FlowMap::wrapped(int d, std::size_t m) const {
  return wrap_coord(pos[d][m], grid->length());
}

double sample_bicubic(const ScalarField& f, double x, double y) {
  const TorusGrid& g = *f.grid;
  const int n = g.n();
  const double h = g.dx();
  const double ux = wrap_coord(x, g.length()) / h;
  const double uy = wrap_coord(y, g.length()) / h;
  int i0 = int(std::floor(ux)), j0 = int(std::floor(uy));
  double wx[4], wy[4];
  cr_weights(ux - i0, wx);
  cr_weights(uy - j0, wy);
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    const int j = ((j0 + b - 1) % n + n) % n;
    double row = 0.0;
    for (int a = 0; a < 4; ++a) {
      const int i = ((i0 + a - 1) % n + n) % n;
      row += wx[a] * f.v[std::size_t(j) * n + i];
    }
    acc += wy[b] * row;
  }
  return acc;
}

FlowMap integrate_flow(const ExpectationTrajectory& traj,
                       const NoiseBasis& basis, const BrownianPath& path,
                       double s, double t, FlowDirection direction) {
  const double dt = path.dt;
  const long i0 = std::lround(s / dt);
  const long i1 = std::lround(t / dt);
  if (i0 < 0 || i1 > path.n_steps || i0 > i1 ||
      std::abs(i0 * dt - s) > 1e-9 || std::abs(i1 * dt - t) > 1e-9)
    throw TrajectoryExhausted("flow interval off the Brownian step grid");
  if (t > traj.t_end() + 1e-9 || s < traj.t_begin() - 1e-9)
    throw TrajectoryExhausted("flow interval outside the trajectory");

  const TorusGrid& g = *traj.grid;
  const int n = g.n();
  const double L = g.length();
  FlowMap map;
  map.grid = traj.grid;
  map.s = s;
  map.t = t;
  map.direction = direction;
  map.pos[0].resize(g.size());
  map.pos[1].resize(g.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      map.pos[0][std::size_t(j) * n + i] = g.x(i);
      map.pos[1][std::size_t(j) * n + i] = g.y(j);
    }

  const std::size_t K = basis.count();
  auto xi_at = [&](std::size_t k, double x, double y, double out[2]) {
    basis.spec.evaluate(k, x, y, L, out);
  };

  auto do_step = [&](long step, double sign) {
    // sign=+1: advance over [step*dt, (step+1)*dt]; sign=-1: undo it.
    const double ta = (sign > 0) ? step * dt : (step + 1) * dt;
    const double tb = (sign > 0) ? (step + 1) * dt : step * dt;
    const VectorField Ua = traj.velocity_at(ta);
    const VectorField Ub = traj.velocity_at(tb);
    const VelocitySampler sa{Ua}, sb{Ub};
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double x = map.pos[0][m], y = map.pos[1][m];
      double b0[2], xi0[2], xi1[2];
      sa(x, y, b0);
      double px = x + sign * dt * b0[0];
      double py = y + sign * dt * b0[1];
      for (std::size_t k = 0; k < K; ++k) {
        xi_at(k, x, y, xi0);
        const double dw = sign * path.increments[k][step];
        px += dw * xi0[0];
        py += dw * xi0[1];
      }
      double b1[2];
      sb(px, py, b1);
      double nx = x + 0.5 * sign * dt * (b0[0] + b1[0]);
      double ny = y + 0.5 * sign * dt * (b0[1] + b1[1]);
      for (std::size_t k = 0; k < K; ++k) {
        xi_at(k, x, y, xi0);
        xi_at(k, px, py, xi1);
        const double dw = sign * path.increments[k][step];
        nx += 0.5 * dw * (xi0[0] + xi1[0]);
        ny += 0.5 * dw * (xi0[1] + xi1[1]);
      }
      map.pos[0][m] = nx;
      map.pos[1][m] = ny;
    }
  };

  if (direction == FlowDirection::forward) {
    for (long step = i0; step < i1; ++step) do_step(step, +1.0);
  } else {
    for (long step = i1 - 1; step >= i0; --step) do_step(step, -1.0);
  }
  return map;
}

ScalarField theta_by_pullback(const ScalarField& theta0,
                              const FlowMap& inverse_map) {
  check_same_grid(theta0.grid, inverse_map.grid);
  ScalarField out(theta0.grid);
  for (std::size_t m = 0; m < out.v.size(); ++m)
    out.v[m] = sample_bicubic(theta0, inverse_map.pos[0][m],
                              inverse_map.pos[1][m]);
  return out;
}

namespace {

// J^i_j = delta_ij + d_j (pos^i - x^i), computed spectrally on the unwrapped
// displacement.
std::array<std::vector<double>, 4> flow_jacobian(const FlowMap& map) {
  const TorusGrid& g = *map.grid;
  const int n = g.n();
  std::array<std::vector<double>, 4> J;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> disp(g.size());
    for (int j = 0; j < n; ++j)
      for (int ii = 0; ii < n; ++ii) {
        const std::size_t m = std::size_t(j) * n + ii;
        const double node = (i == 0) ? g.x(ii) : g.y(j);
        disp[m] = map.pos[i][m] - node;
      }
    const auto spec = g.to_spectral(disp);
    for (int ax = 0; ax < 2; ++ax) {
      auto d = spec;
      g.spectral_derivative(d.data(), ax);
      J[2 * i + ax] = g.to_real(d);
      const double diag = (i == ax) ? 1.0 : 0.0;
      for (double& e : J[2 * i + ax]) e += diag;
    }
  }
  return J;
}

}  // namespace

ScalarField jacobian_determinant(const FlowMap& map) {
  const auto J = flow_jacobian(map);
  ScalarField det(map.grid);
  for (std::size_t m = 0; m < det.v.size(); ++m)
    det.v[m] = J[0][m] * J[3][m] - J[1][m] * J[2][m];
  return det;
}

OneFormField pushforward_oneform(const OneFormField& alpha,
                                 const FlowMap& inverse_map) {
  check_same_grid(alpha.grid, inverse_map.grid);
  const auto J = flow_jacobian(inverse_map);
  double worst = 1.0;
  std::size_t worst_m = 0;
  for (std::size_t m = 0; m < inverse_map.pos[0].size(); ++m) {
    const double det = J[0][m] * J[3][m] - J[1][m] * J[2][m];
    if (det < worst) {
      worst = det;
      worst_m = m;
    }
  }
  if (worst < 1e-6) {
    const int n = inverse_map.grid->n();
    throw JacobianDegenerate("flow Jacobian determinant " +
                             std::to_string(worst) + " at node (" +
                             std::to_string(int(worst_m) % n) + ", " +
                             std::to_string(int(worst_m) / n) + ")");
  }
  OneFormField out(alpha.grid);
  ScalarField a0(alpha.grid), a1(alpha.grid);
  a0.v = alpha.c[0];
  a1.v = alpha.c[1];
  for (std::size_t m = 0; m < out.c[0].size(); ++m) {
    const double x = inverse_map.pos[0][m], y = inverse_map.pos[1][m];
    const double v0 = sample_bicubic(a0, x, y);
    const double v1 = sample_bicubic(a1, x, y);
    out.c[0][m] = v0 * J[0][m] + v1 * J[2][m];
    out.c[1][m] = v0 * J[1][m] + v1 * J[3][m];
  }
  return out;
}

OneFormField u_by_characteristics(
    const OneFormField& u0, const ExpectationTrajectory& traj,
    const NoiseBasis& basis, const BrownianPath& path, double g,
    const std::function<OneFormField(double)>& forcing, double t,
    int n_levels) {
  const double dt = path.dt;
  const long N = std::lround(t / dt);
  if (n_levels > N) n_levels = int(N);
  if (n_levels < 1) n_levels = 1;

  const TorusGrid& grid = *traj.grid;
  const ScalarField& theta0 = traj.snapshots.front().Theta;

  std::vector<double> s_levels;
  for (int j = 0; j <= n_levels; ++j)
    s_levels.push_back(std::lround(double(j) * N / n_levels) * dt);

  // integrand alpha(s) = g y dtheta(s) + f(s), theta(s) by pullback
  auto integrand = [&](double s) {
    OneFormField a = forcing ? forcing(s) : OneFormField(traj.grid);
    if (g != 0.0) {
      ScalarField theta_s = theta0;
      if (s > 0.0) {
        const FlowMap inv =
            integrate_flow(traj, basis, path, 0.0, s, FlowDirection::inverse);
        theta_s = theta_by_pullback(theta0, inv);
      }
      const OneFormField dth = exterior_d(theta_s);
      for (int d = 0; d < 2; ++d)
        for (int jj = 0; jj < grid.n(); ++jj) {
          const double y = grid.y(jj);
          for (int ii = 0; ii < grid.n(); ++ii) {
            const std::size_t m = std::size_t(jj) * grid.n() + ii;
            a.c[d][m] += g * y * dth.c[d][m];
          }
        }
    }
    return a;
  };

  const FlowMap inv_full =
      integrate_flow(traj, basis, path, 0.0, t, FlowDirection::inverse);
  OneFormField u = pushforward_oneform(u0, inv_full);

  std::vector<OneFormField> pushed;
  pushed.reserve(s_levels.size());
  for (double s : s_levels) {
    OneFormField a = integrand(s);
    if (t - s > 1e-12) {
      const FlowMap inv =
          integrate_flow(traj, basis, path, s, t, FlowDirection::inverse);
      a = pushforward_oneform(a, inv);
    }
    pushed.push_back(std::move(a));
  }
  for (std::size_t j = 0; j + 1 < s_levels.size(); ++j) {
    const double w = 0.5 * (s_levels[j + 1] - s_levels[j]);
    u.axpy(-w, pushed[j]);
    u.axpy(-w, pushed[j + 1]);
  }
  return u;
}

}  // namespace lasalt

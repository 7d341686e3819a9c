#include "lasalt/moments.hpp"

#include <cmath>

#include "lasalt/lie.hpp"
#include "lasalt/ops.hpp"

namespace lasalt {

namespace {

template <class S, class RHS>
S rk4(const S& y0, double t, double dt, RHS rhs) {
  S k1 = rhs(y0, t);
  S y = y0;
  y.axpy(0.5 * dt, k1);
  S k2 = rhs(y, t + 0.5 * dt);
  y = y0;
  y.axpy(0.5 * dt, k2);
  S k3 = rhs(y, t + 0.5 * dt);
  y = y0;
  y.axpy(dt, k3);
  S k4 = rhs(y, t + dt);
  y = y0;
  y.axpy(dt / 6.0, k1);
  y.axpy(dt / 3.0, k2);
  y.axpy(dt / 3.0, k3);
  y.axpy(dt / 6.0, k4);
  return y;
}

ScalarField wrap(const GridPtr& g, const std::vector<double>& v) {
  ScalarField s(g);
  s.v = v;
  return s;
}

// T_ij += w * dealias(a_i b_j)
void add_outer(Tensor2Field& T, const OneFormField& a, const OneFormField& b,
               double w) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const ScalarField p =
          dealias_product(wrap(a.grid, a.c[i]), wrap(b.grid, b.c[j]));
      std::vector<double>& dst = T.comp(i, j);
      for (std::size_t m = 0; m < dst.size(); ++m) dst[m] += w * p.v[m];
    }
}

// T_ij += w * dealias(y * S_ij) with the sawtooth coordinate y.
void add_y_tensor(Tensor2Field& T, const Tensor2Field& S, double w) {
  const TorusGrid& g = *T.grid;
  for (int d = 0; d < 4; ++d) {
    ScalarField p(T.grid);
    for (int j = 0; j < g.n(); ++j) {
      const double y = g.y(j);
      for (int i = 0; i < g.n(); ++i)
        p.at(i, j) = y * S.c[d][std::size_t(j) * g.n() + i];
    }
    dealias_inplace(p);
    for (std::size_t m = 0; m < T.c[d].size(); ++m) T.c[d][m] += w * p.v[m];
  }
}

ScalarField theta2_rhs(const ScalarField& f, const ExpectationTrajectory& traj,
                       const NoiseBasis& basis, double s) {
  const VectorField U = traj.velocity_at(s);
  const ScalarField Theta = traj.theta_at(s);
  ScalarField out = lie_scalar(U, f);
  out.scale(-1.0);
  out.axpy(0.5, double_lie(basis.xis, f));
  for (const VectorField& xi : basis.xis) {
    const ScalarField L = lie_scalar(xi, Theta);
    out.axpy(1.0, dealias_product(L, L));
  }
  return out;
}

Tensor2Field dtheta2_rhs(const Tensor2Field& T,
                         const ExpectationTrajectory& traj,
                         const NoiseBasis& basis, double s) {
  const VectorField U = traj.velocity_at(s);
  const OneFormField dTheta = exterior_d(traj.theta_at(s));
  Tensor2Field out = lie_tensor2(U, T);
  out.scale(-1.0);
  out.axpy(0.5, double_lie(basis.xis, T));
  for (const VectorField& xi : basis.xis) {
    const OneFormField L = lie_oneform(xi, dTheta);
    add_outer(out, L, L, 1.0);
  }
  out.symmetric = true;
  return out;
}

Tensor2Field cross_rhs(const Tensor2Field& C, const Tensor2Field& dTheta2,
                       const ExpectationTrajectory& traj,
                       const NoiseBasis& basis, double g, double s) {
  const VectorField U = traj.velocity_at(s);
  const OneFormField Eu = as_oneform(U);
  const OneFormField dTheta = exterior_d(traj.theta_at(s));
  Tensor2Field out = lie_tensor2(U, C);
  out.scale(-1.0);
  out.axpy(0.5, double_lie(basis.xis, C));
  for (const VectorField& xi : basis.xis) {
    const OneFormField Lu = lie_oneform(xi, Eu);
    const OneFormField Ld = lie_oneform(xi, dTheta);
    add_outer(out, Lu, Ld, 1.0);
    add_outer(out, Ld, Lu, 1.0);
  }
  add_y_tensor(out, dTheta2, -2.0 * g);
  out.symmetric = true;
  return out;
}

Tensor2Field u2_rhs(const Tensor2Field& U2, const Tensor2Field& C,
                    const ExpectationTrajectory& traj, const NoiseBasis& basis,
                    double g, double s) {
  const VectorField U = traj.velocity_at(s);
  const OneFormField Eu = as_oneform(U);
  Tensor2Field out = lie_tensor2(U, U2);
  out.scale(-1.0);
  out.axpy(0.5, double_lie(basis.xis, U2));
  for (const VectorField& xi : basis.xis) {
    const OneFormField Lu = lie_oneform(xi, Eu);
    add_outer(out, Lu, Lu, 1.0);
  }
  add_y_tensor(out, C, -g);
  out.symmetric = true;
  return out;
}

// RHS of recursion member p given the full stage chain (a[idx] = A^(idx+2)).
ScalarField ap_rhs(const std::vector<ScalarField>& a, int p,
                   const ExpectationTrajectory& traj, const NoiseBasis& basis,
                   double s) {
  const GridPtr grid = traj.grid;
  const VectorField U = traj.velocity_at(s);
  const ScalarField Theta = traj.theta_at(s);
  const ScalarField& Ap = a[p - 2];
  ScalarField out = lie_scalar(U, Ap);
  out.scale(-1.0);
  out.axpy(0.5, double_lie(basis.xis, Ap));
  for (const VectorField& xi : basis.xis) {
    const ScalarField Lmean = lie_scalar(xi, Theta);
    if (p >= 3) {
      const ScalarField Lprev = lie_scalar(xi, a[p - 3]);  // A^(p-1)
      out.axpy(double(p), dealias_product(Lprev, Lmean));
    }
    const ScalarField q = dealias_product(Lmean, Lmean);
    const double c = 0.5 * p * (p - 1);
    if (p == 2) {
      out.axpy(c, q);  // A^(0) = 1
    } else if (p >= 4) {
      out.axpy(c, dealias_product(a[p - 4], q));
    }
    // p == 3: A^(1) = 0, term drops
  }
  (void)grid;
  return out;
}

struct ApChain {
  std::vector<ScalarField> a;
  void axpy(double w, const ApChain& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i].axpy(w, o.a[i]);
  }
};

struct TensorTriple {
  Tensor2Field T;  // dTheta2
  Tensor2Field C;  // Cross
  Tensor2Field U2;
  void axpy(double w, const TensorTriple& o) {
    T.axpy(w, o.T);
    C.axpy(w, o.C);
    U2.axpy(w, o.U2);
  }
};

}  // namespace

MomentState make_zero_moments(const GridPtr& grid, int P) {
  MomentState s;
  s.Theta2 = ScalarField(grid);
  s.dTheta2 = Tensor2Field(grid, true);
  s.U2 = Tensor2Field(grid, true);
  s.Cross = Tensor2Field(grid, true);
  for (int p = 2; p <= P; ++p) s.Ap.emplace_back(grid);
  return s;
}

ScalarField step_theta_covariance(const ScalarField& Theta2,
                                  const ExpectationTrajectory& traj,
                                  const NoiseBasis& basis, double t,
                                  double dt) {
  ScalarField out = rk4(Theta2, t, dt, [&](const ScalarField& f, double s) {
    return theta2_rhs(f, traj, basis, s);
  });
  if (!all_finite(out))
    throw Instability("theta covariance step produced non-finite values",
                      long(std::llround(t / dt)));
  return out;
}

Tensor2Field step_dtheta_covariance(const Tensor2Field& dTheta2,
                                    const ExpectationTrajectory& traj,
                                    const NoiseBasis& basis, double t,
                                    double dt) {
  return rk4(dTheta2, t, dt, [&](const Tensor2Field& f, double s) {
    return dtheta2_rhs(f, traj, basis, s);
  });
}

Tensor2Field step_cross_covariance(const Tensor2Field& Cross,
                                   const Tensor2Field& dTheta2,
                                   const ExpectationTrajectory& traj,
                                   const NoiseBasis& basis, double g, double t,
                                   double dt) {
  struct Pair {
    Tensor2Field T, C;
    void axpy(double w, const Pair& o) {
      T.axpy(w, o.T);
      C.axpy(w, o.C);
    }
  };
  Pair y{dTheta2, Cross};
  y = rk4(y, t, dt, [&](const Pair& p, double s) {
    return Pair{dtheta2_rhs(p.T, traj, basis, s),
                cross_rhs(p.C, p.T, traj, basis, g, s)};
  });
  return y.C;
}

Tensor2Field step_u_covariance(const Tensor2Field& U2,
                               const Tensor2Field& Cross,
                               const Tensor2Field& dTheta2,
                               const ExpectationTrajectory& traj,
                               const NoiseBasis& basis, double g, double t,
                               double dt) {
  TensorTriple y{dTheta2, Cross, U2};
  y = rk4(y, t, dt, [&](const TensorTriple& p, double s) {
    return TensorTriple{dtheta2_rhs(p.T, traj, basis, s),
                        cross_rhs(p.C, p.T, traj, basis, g, s),
                        u2_rhs(p.U2, p.C, traj, basis, g, s)};
  });
  return y.U2;
}

ScalarField step_pth_moment(const std::vector<ScalarField>& Ap,
                            const ExpectationTrajectory& traj,
                            const NoiseBasis& basis, int p, double t,
                            double dt) {
  if (p < 2 || std::size_t(p - 1) > Ap.size())
    throw ConfigError("pth moment order outside the stored chain");
  ApChain y;
  y.a.assign(Ap.begin(), Ap.begin() + (p - 1));
  y = rk4(y, t, dt, [&](const ApChain& c, double s) {
    ApChain d;
    d.a.reserve(c.a.size());
    for (int q = 2; q <= p; ++q) d.a.push_back(ap_rhs(c.a, q, traj, basis, s));
    return d;
  });
  return y.a[p - 2];
}

MomentState step_moments(const MomentState& state,
                         const ExpectationTrajectory& traj,
                         const NoiseBasis& basis, double g, double dt,
                         bool with_tensors) {
  MomentState out = state;
  out.Theta2 = step_theta_covariance(state.Theta2, traj, basis, state.t, dt);
  if (with_tensors) {
    TensorTriple y{state.dTheta2, state.Cross, state.U2};
    y = rk4(y, state.t, dt, [&](const TensorTriple& p, double s) {
      return TensorTriple{dtheta2_rhs(p.T, traj, basis, s),
                          cross_rhs(p.C, p.T, traj, basis, g, s),
                          u2_rhs(p.U2, p.C, traj, basis, g, s)};
    });
    out.dTheta2 = std::move(y.T);
    out.Cross = std::move(y.C);
    out.U2 = std::move(y.U2);
  }
  if (!state.Ap.empty()) {
    const int P = int(state.Ap.size()) + 1;
    ApChain y{state.Ap};
    y = rk4(y, state.t, dt, [&](const ApChain& c, double s) {
      ApChain d;
      d.a.reserve(c.a.size());
      for (int q = 2; q <= P; ++q)
        d.a.push_back(ap_rhs(c.a, q, traj, basis, s));
      return d;
    });
    out.Ap = std::move(y.a);
  }
  out.t = state.t + dt;
  if (!all_finite(out.Theta2))
    throw Instability("moment step produced non-finite values",
                      long(std::llround(out.t / dt)));
  return out;
}

PositivityReport even_moment_positivity_check(
    const std::vector<ScalarField>& Ap) {
  PositivityReport r;
  auto scan = [](const ScalarField& f, double& mn, int* loc) {
    const int n = f.grid->n();
    mn = f.v.empty() ? 0.0 : f.v[0];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (f.at(i, j) < mn) {
          mn = f.at(i, j);
          loc[0] = i;
          loc[1] = j;
        }
  };
  if (!Ap.empty()) scan(Ap[0], r.min_A2, r.loc_A2);
  if (Ap.size() >= 3) {
    scan(Ap[2], r.min_A4, r.loc_A4);
    r.has_A4 = true;
  }
  return r;
}

void IdentityLog::accumulate(const ScalarField& Theta2,
                             const ScalarField& Theta, double dt) {
  const double g2 = std::pow(l2_norm(gradient(Theta2)), 2);
  const double gm = std::pow(l2_norm(gradient(Theta)), 2);
  if (prev_grad_theta2 >= 0.0) {
    int_grad_theta2 += 0.5 * dt * (prev_grad_theta2 + g2);
    rhs += 0.5 * dt * (prev_grad_mean + gm);
  }
  prev_grad_theta2 = g2;
  prev_grad_mean = gm;
  const double norm = l2_norm(Theta2);
  lhs = norm * norm + 0.5 * int_grad_theta2;
}

MomentState run_moments(const ExpectationTrajectory& traj,
                        const NoiseBasis& basis, const MomentOptions& opts,
                        const std::function<void(const MomentState&)>& observe) {
  MomentState state = make_zero_moments(traj.grid, opts.P);
  state.t = traj.t_begin();
  const double t_end = std::min(opts.t_end, traj.t_end());
  const long steps = std::lround((t_end - state.t) / opts.dt);
  if (observe) observe(state);
  for (long s = 0; s < steps; ++s) {
    state = step_moments(state, traj, basis, opts.g, opts.dt,
                         opts.with_tensors);
    if (observe && ((s + 1) % opts.save_every == 0 || s + 1 == steps))
      observe(state);
  }
  return state;
}

}  // namespace lasalt

#pragma once

#include <functional>
#include <vector>

#include "lasalt/expectation.hpp"

namespace lasalt {

/// State of the closed deterministic moment system. Tensor moments are kept
/// symmetric; variances may carry small negative discretization excursions
/// (reported by diagnostics, never clipped here).
struct MomentState {
  ScalarField Theta2;    // E[(theta')^2]
  Tensor2Field dTheta2;  // E[dtheta' (x) dtheta']
  Tensor2Field U2;       // E[u' (x) u']
  Tensor2Field Cross;    // E[u' (x) dtheta' + dtheta' (x) u']
  std::vector<ScalarField> Ap;  // p-th central moments of theta, p = 2..P
  double t = 0.0;
};

MomentState make_zero_moments(const GridPtr& grid, int P);

ScalarField step_theta_covariance(const ScalarField& Theta2,
                                  const ExpectationTrajectory& traj,
                                  const NoiseBasis& basis, double t, double dt);

Tensor2Field step_dtheta_covariance(const Tensor2Field& dTheta2,
                                    const ExpectationTrajectory& traj,
                                    const NoiseBasis& basis, double t,
                                    double dt);

/// Co-advances the (dTheta2, Cross) pair one step and returns the new Cross;
/// dTheta2 feeds the -2 g y dTheta2 sink at every internal stage.
Tensor2Field step_cross_covariance(const Tensor2Field& Cross,
                                   const Tensor2Field& dTheta2,
                                   const ExpectationTrajectory& traj,
                                   const NoiseBasis& basis, double g, double t,
                                   double dt);

/// Co-advances (dTheta2, Cross, U2) and returns the new U2.
Tensor2Field step_u_covariance(const Tensor2Field& U2,
                               const Tensor2Field& Cross,
                               const Tensor2Field& dTheta2,
                               const ExpectationTrajectory& traj,
                               const NoiseBasis& basis, double g, double t,
                               double dt);

/// One step of recursion member p. Ap holds members 2..P; the chain up to p
/// is co-advanced internally (A1 = 0 and A0 = 1 close the recursion below).
ScalarField step_pth_moment(const std::vector<ScalarField>& Ap,
                            const ExpectationTrajectory& traj,
                            const NoiseBasis& basis, int p, double t,
                            double dt);

/// Advances the whole moment system one coupled step of size dt.
MomentState step_moments(const MomentState& state,
                         const ExpectationTrajectory& traj,
                         const NoiseBasis& basis, double g, double dt,
                         bool with_tensors);

struct PositivityReport {
  double min_A2 = 0.0;
  int loc_A2[2] = {0, 0};
  double min_A4 = 0.0;
  int loc_A4[2] = {0, 0};
  bool has_A4 = false;
};

PositivityReport even_moment_positivity_check(const std::vector<ScalarField>& Ap);

/// Both sides of the energy identity logged for diagnostics (no gate):
/// lhs = ||Theta2(t)||^2 + (1/2) int_0^t ||grad Theta2||^2 ds,
/// rhs = int_0^t ||grad E[theta]||^2 ds. Trapezoid accumulation.
struct IdentityLog {
  double lhs = 0.0;
  double rhs = 0.0;
  double int_grad_theta2 = 0.0;
  double prev_grad_theta2 = -1.0;
  double prev_grad_mean = -1.0;

  void accumulate(const ScalarField& Theta2, const ScalarField& Theta,
                  double dt);
};

struct MomentOptions {
  double dt = 1e-3;
  double t_end = 0.1;
  int save_every = 1;
  double g = 1.0;
  int P = 2;
  bool with_tensors = false;
};

/// Runs the moment system over [traj.t_begin(), min(t_end, traj.t_end())];
/// observe fires on the initial state and after each saved step.
MomentState run_moments(const ExpectationTrajectory& traj,
                        const NoiseBasis& basis, const MomentOptions& opts,
                        const std::function<void(const MomentState&)>& observe = {});

}  // namespace lasalt

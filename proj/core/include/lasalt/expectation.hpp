#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lasalt/noise.hpp"

namespace lasalt {

struct ExpectationState {
  ScalarField Omega;  // E[omega], mean-free
  ScalarField Theta;  // E[theta]
  ConstantVector Ubar;
  double t = 0.0;
};

struct ExpectationSnapshot {
  double t = 0.0;
  long step_index = 0;
  ScalarField Omega;
  ScalarField Theta;
  ScalarField ptilde;  // E[p - |u|^2/2], mean-free
  VectorField U;       // biot_savart(Omega) + Ubar
  ConstantVector Ubar;
};

/// Archive of the closed deterministic "climate" run; shared read-only by the
/// SPDE, moment and characteristics solvers. Queries between stored snapshots
/// interpolate linearly in time.
struct ExpectationTrajectory {
  GridPtr grid;
  double dt = 0.0;
  int save_every = 1;
  double g = 1.0;
  std::uint64_t config_hash = 0;
  std::vector<ExpectationSnapshot> snapshots;

  double t_begin() const { return snapshots.front().t; }
  double t_end() const { return snapshots.back().t; }

  VectorField velocity_at(double t) const;
  ScalarField theta_at(double t) const;
  ScalarField ptilde_at(double t) const;
  ConstantVector ubar_at(double t) const;

 private:
  /// Bracketing snapshot pair and interpolation weight for time t.
  void locate(double t, std::size_t& i0, std::size_t& i1, double& w) const;
};

struct ExpectationOptions {
  double dt = 1e-3;
  double t_end = 0.1;
  int save_every = 1;
  double g = 1.0;
  /// Heat-kernel oracle mode: transport velocity held at zero.
  bool freeze_velocity = false;
  /// Skip the ellipticity gate (used by oracle tests with zero noise).
  bool allow_degenerate = false;
};

/// Per-step diagnostics for the mean ODE (the two Lie-derivative integral
/// terms of the open-question reading are reported separately).
struct MeanDiagnostics {
  double buoyancy_term[2] = {0.0, 0.0};
  double lie_v_term[2] = {0.0, 0.0};
  double lie_ubar_term[2] = {0.0, 0.0};
};

ExpectationState step_expectation(const ExpectationState& state,
                                  const NoiseBasis& basis, double g, double dt,
                                  bool freeze_velocity = false);

ConstantVector evolve_mean(const ConstantVector& Ubar, const ScalarField& Theta,
                           const VectorField& V, const NoiseBasis& basis,
                           double g, double dt,
                           MeanDiagnostics* diag = nullptr);

/// Mean-free solution of the pressure Poisson problem
///   -Lap ptilde = div L_U U - g d_y Theta - (1/2) sum_k div L^2_xi U.
/// The source's (diagnostic) mean is removed before inversion and reported
/// through mean_residual when non-null.
ScalarField recover_pressure(const VectorField& U, const ScalarField& Theta,
                             const NoiseBasis& basis, double g,
                             double* mean_residual = nullptr);

ExpectationTrajectory run_expectation(const NoiseBasis& basis,
                                      const ScalarField& Omega0,
                                      const ScalarField& Theta0,
                                      const ConstantVector& Ubar0,
                                      const ExpectationOptions& opts);

}  // namespace lasalt

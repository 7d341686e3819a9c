#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "lasalt/expectation.hpp"
#include "lasalt/noise.hpp"

namespace lasalt {

enum class SpdeScheme { stratonovich, ito };

/// One ensemble member's stochastic state. The u one-form is optional; the
/// theta/omega transport pair is the always-on core.
struct SpdeState {
  ScalarField theta;
  ScalarField omega;
  std::optional<OneFormField> u;
  double t = 0.0;
  long step_index = 0;
};

struct SpdeOptions {
  double dt = 1e-3;
  double g = 1.0;
  SpdeScheme scheme = SpdeScheme::stratonovich;
  bool enable_u = false;
};

/// Forcing f of the linear u-equation, one snapshot per trajectory entry.
/// f_literal is the modified-pressure/buoyancy combination
///   f = -d(ptilde - g Theta y) + g Theta yhat
/// evaluated with the sawtooth coordinate y. The evolution and the
/// characteristics reconstruction use the sign-fixed variant
///   f_char = d ptilde - g Theta yhat - g y dTheta = -(f_literal - g Theta yhat),
/// which is the orientation that makes the explicit flow-map solution agree
/// with the strong-solution identity and reproduces the deterministic
/// Euler-Boussinesq balance in the zero-noise limit.
struct ForcingCache {
  std::vector<double> times;
  std::vector<OneFormField> f_literal;

  OneFormField at(double t) const;
};

ForcingCache assemble_forcing(const ExpectationTrajectory& traj, double g);

/// Sign-fixed forcing used by the characteristics u-reconstruction.
OneFormField char_forcing(const ExpectationTrajectory& traj, double g,
                          double t);

/// One Heun (Stratonovich-consistent predictor-corrector) step.
/// `increments` points at the per-noise Brownian increments of this step.
SpdeState step_stratonovich(const SpdeState& state,
                            const ExpectationTrajectory& traj,
                            const NoiseBasis& basis, double g, double dt,
                            const std::vector<double>& increments,
                            bool enable_u);

/// One Euler-Maruyama step of the Ito form (explicit (1/2) sum L^2 drift).
SpdeState step_ito(const SpdeState& state, const ExpectationTrajectory& traj,
                   const NoiseBasis& basis, double g, double dt,
                   const std::vector<double>& increments, bool enable_u);

std::pair<OneFormField, ScalarField> fluctuations(
    const SpdeState& state, const ExpectationTrajectory& traj);

SpdeState make_initial_state(const ScalarField& theta0,
                             const ScalarField& omega0,
                             const std::optional<OneFormField>& u0);

/// Runs one member over [0, n_steps*dt]; invokes `observe` after every step
/// (and once for the initial state) when non-null.
SpdeState run_member(const ExpectationTrajectory& traj, const NoiseBasis& basis,
                     const SpdeOptions& opts, const BrownianPath& path,
                     const SpdeState& initial,
                     const std::function<void(const SpdeState&)>& observe = {});

/// True when the field carries negligible mass within `margin` of the y seam;
/// quantitative gy-coupled runs require seam-avoiding data.
bool seam_safe(const ScalarField& f, double margin_fraction = 0.125,
               double tol = 1e-6);

}  // namespace lasalt

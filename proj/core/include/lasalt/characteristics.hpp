#pragma once

#include <array>
#include <functional>

#include "lasalt/spde.hpp"

namespace lasalt {

enum class FlowDirection { forward, inverse };

/// Image of every grid node under the stochastic flow phi_{s,t} (forward) or
/// its inverse (integrated backward with the reversed, negated increments).
/// Positions are unwrapped: winding is retained so spectral derivatives of
/// the displacement stay seam-free.
struct FlowMap {
  GridPtr grid;
  double s = 0.0;
  double t = 0.0;
  FlowDirection direction = FlowDirection::forward;
  std::array<std::vector<double>, 2> pos;

  double wrapped(int d, std::size_t m) const;
};

/// Periodic bicubic (Catmull-Rom) sampling of a grid field.
double sample_bicubic(const ScalarField& f, double x, double y);

/// Heun integration of the node trajectories over [s, t]; s and t must sit
/// on the Brownian path's step grid. E[u] is sampled bicubically, the xi_k
/// analytically.
FlowMap integrate_flow(const ExpectationTrajectory& traj,
                       const NoiseBasis& basis, const BrownianPath& path,
                       double s, double t, FlowDirection direction);

/// theta(t, x) = theta0(phi_t^{-1}(x)); expects the inverse map.
ScalarField theta_by_pullback(const ScalarField& theta0,
                              const FlowMap& inverse_map);

/// (phi_* a)(x)_j = a_i(phi^{-1}(x)) d(phi^{-1})^i / dx^j; expects the
/// inverse map. Throws JacobianDegenerate when det < 1e-6 anywhere.
OneFormField pushforward_oneform(const OneFormField& alpha,
                                 const FlowMap& inverse_map);

/// det of the Jacobian of the map (identity plus displacement gradient).
ScalarField jacobian_determinant(const FlowMap& map);

/// Explicit-solution oracle for the u one-form,
///   u(t) = (phi_t)_* u0 - int_0^t (phi_{s,t})_* [ g y dtheta(s) + f(s) ] ds,
/// with theta(s) reconstructed by pullback on the same path and f supplied by
/// the caller (char_forcing for the full system). Trapezoid quadrature over
/// n_levels stored s-levels. Coarse-grid oracle use only.
OneFormField u_by_characteristics(
    const OneFormField& u0, const ExpectationTrajectory& traj,
    const NoiseBasis& basis, const BrownianPath& path, double g,
    const std::function<OneFormField(double)>& forcing, double t,
    int n_levels = 8);

}  // namespace lasalt

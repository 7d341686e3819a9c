#include "lasalt/noise.hpp"

#include <cmath>
#include <limits>

#include "lasalt/lie.hpp"
#include "lasalt/ops.hpp"
#include "lasalt/rng.hpp"

namespace lasalt {

NoiseSpec NoiseSpec::canonical(double eps) {
  NoiseSpec spec;
  XiSpec x1, x2;
  x1.constant = {eps, 0.0};
  x2.constant = {0.0, eps};
  spec.xis = {x1, x2};
  return spec;
}

void NoiseSpec::evaluate(std::size_t k, double x, double y, double length,
                         double out[2]) const {
  const XiSpec& xi = xis.at(k);
  out[0] = xi.constant[0];
  out[1] = xi.constant[1];
  for (const NoiseMode& m : xi.modes) {
    const double phase = kTwoPi * (m.kx * x + m.ky * y) / length;
    const double val =
        m.amp_cos * std::cos(phase) + m.amp_sin * std::sin(phase);
    out[(m.component == 2) ? 1 : 0] += val;
  }
}

void NoiseBasis::require_elliptic() const {
  if (lambda_min <= 0.0)
    throw EllipticityViolation(
        "noise basis is degenerate (lambda_min = " +
        std::to_string(lambda_min) + "); parabolic solve needs lambda_min > 0");
}

bool NoiseBasis::all_constant() const {
  for (const XiSpec& xi : spec.xis)
    if (!xi.modes.empty()) return false;
  return true;
}

NoiseBasis build_noise_basis(const NoiseSpec& spec, GridPtr grid) {
  if (spec.count() == 0)
    throw ConfigError("noise spec must contain at least one xi");
  NoiseBasis basis;
  basis.grid = grid;
  basis.spec = spec;
  const int n = grid->n();
  for (std::size_t k = 0; k < spec.count(); ++k) {
    VectorField xi(grid);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double val[2];
        spec.evaluate(k, grid->x(i), grid->y(j), grid->length(), val);
        xi.c[0][std::size_t(j) * n + i] = val[0];
        xi.c[1][std::size_t(j) * n + i] = val[1];
      }
    }
    basis.xis.push_back(std::move(xi));
  }

  basis.ito_drift = VectorField(grid);
  for (const VectorField& xi : basis.xis) {
    for (int comp = 0; comp < 2; ++comp) {
      ScalarField c(grid);
      c.v = xi.c[comp];
      ScalarField adv = lie_scalar(xi, c);  // (xi . grad) xi^comp
      for (std::size_t m = 0; m < adv.v.size(); ++m)
        basis.ito_drift.c[comp][m] += 0.5 * adv.v[m];
    }
  }

  // lambda_min: exhaustive scan of the smallest eigenvalue of the 2x2
  // symmetric matrix a(x) = sum_k xi_k xi_k^T.
  double lam = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < grid->size(); ++m) {
    double a11 = 0.0, a22 = 0.0, a12 = 0.0;
    for (const VectorField& xi : basis.xis) {
      a11 += xi.c[0][m] * xi.c[0][m];
      a22 += xi.c[1][m] * xi.c[1][m];
      a12 += xi.c[0][m] * xi.c[1][m];
    }
    const double half_tr = 0.5 * (a11 + a22);
    const double disc =
        std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
    lam = std::min(lam, half_tr - disc);
  }
  basis.lambda_min = lam;

  basis.divergence_free = true;
  for (const VectorField& xi : basis.xis) {
    if (linf_norm(divergence(xi)) >= 1e-8) {
      basis.divergence_free = false;
      break;
    }
  }
  return basis;
}

VectorField ito_correction_vector(const NoiseBasis& basis) {
  return basis.ito_drift;
}

BrownianPath sample_path(std::uint64_t seed, int member_id, int n_steps,
                         double dt, std::size_t n_noise) {
  if (n_steps < 1 || dt <= 0.0)
    throw ConfigError("sample_path: need n_steps >= 1 and dt > 0");
  BrownianPath path;
  path.seed = seed;
  path.member_id = member_id;
  path.n_steps = n_steps;
  path.dt = dt;
  const double sd = std::sqrt(dt);
  path.increments.resize(n_noise);
  for (std::size_t k = 0; k < n_noise; ++k) {
    path.increments[k].resize(n_steps);
    for (int s = 0; s < n_steps; ++s) {
      path.increments[k][s] =
          sd * rng::standard_normal(rng::key(seed, std::uint64_t(member_id), k,
                                            std::uint64_t(s)));
    }
  }
  return path;
}

}  // namespace lasalt

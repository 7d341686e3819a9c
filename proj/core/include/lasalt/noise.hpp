#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lasalt/fields.hpp"

namespace lasalt {

/// One Fourier term of a noise field: adds
///   amp_cos * cos(2 pi (kx x + ky y)/L) + amp_sin * sin(...)
/// to the chosen component (1 or 2).
struct NoiseMode {
  int component = 1;
  int kx = 0;
  int ky = 0;
  double amp_cos = 0.0;
  double amp_sin = 0.0;
};

struct XiSpec {
  std::array<double, 2> constant{0.0, 0.0};
  std::vector<NoiseMode> modes;
};

struct NoiseSpec {
  std::vector<XiSpec> xis;

  static NoiseSpec canonical(double eps);
  std::size_t count() const { return xis.size(); }
  /// Exact pointwise evaluation of xi_k, used for off-grid sampling in the
  /// characteristics solver.
  void evaluate(std::size_t k, double x, double y, double length,
                double out[2]) const;
};

/// Materialized noise fields with precomputed Ito drift and the certified
/// ellipticity constant of a(x) = sum_k xi_k (x) xi_k(x)^T.
struct NoiseBasis {
  GridPtr grid;
  NoiseSpec spec;
  std::vector<VectorField> xis;
  VectorField ito_drift;  // (1/2) sum_k (xi_k . grad) xi_k
  double lambda_min = 0.0;
  bool divergence_free = false;

  std::size_t count() const { return xis.size(); }
  void require_elliptic() const;
  bool all_constant() const;
};

NoiseBasis build_noise_basis(const NoiseSpec& spec, GridPtr grid);
VectorField ito_correction_vector(const NoiseBasis& basis);

/// Per-member, per-noise table of Brownian increments; entry ~ N(0, dt).
struct BrownianPath {
  std::uint64_t seed = 0;
  int member_id = 0;
  int n_steps = 0;
  double dt = 0.0;
  /// increments[k][step]
  std::vector<std::vector<double>> increments;
};

BrownianPath sample_path(std::uint64_t seed, int member_id, int n_steps,
                         double dt, std::size_t n_noise);

}  // namespace lasalt

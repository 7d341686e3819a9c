#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lasalt/montecarlo.hpp"

namespace lasalt {

/// Analytic initial-condition preset (taylor_green / theta_blob / zero) or an
/// LSF1 file path.
struct InitialCondition {
  std::string preset = "zero";
  std::map<std::string, double> params;
  std::string file;
};

struct RunConfig {
  int grid_n = 32;
  double length = kTwoPi;
  double dealias_fraction = 2.0 / 3.0;
  double g = 1.0;
  NoiseSpec noise;
  InitialCondition ic_omega;
  InitialCondition ic_theta;
  double ubar0[2] = {0.0, 0.0};
  double dt = 1e-3;
  double t_end = 0.1;
  int save_every = 1;
  SpdeScheme scheme = SpdeScheme::stratonovich;
  bool enable_u = false;
  int members = 2;
  std::uint64_t seed = 1;
  int moments_P = 2;
  std::string output_dir = "out";
};

/// Strict parse: unknown keys and schema violations throw ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const RunConfig& cfg);

GridPtr make_grid_from(const RunConfig& cfg);
ScalarField make_initial_field(const InitialCondition& ic, const GridPtr& grid);
NoiseBasis make_noise_from(const RunConfig& cfg, const GridPtr& grid);

}  // namespace lasalt

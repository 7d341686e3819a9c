#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lasalt/spde.hpp"

namespace lasalt {

/// Streaming per-node central-moment accumulator (orders up to 4) with exact
/// pairwise merging, so sharded accumulation reproduces a single pass.
struct MomentFieldAccumulator {
  GridPtr grid;
  long count = 0;
  std::vector<double> mean, M2, M3, M4;

  MomentFieldAccumulator() = default;
  explicit MomentFieldAccumulator(GridPtr g);

  void add(const ScalarField& sample);
  void merge(const MomentFieldAccumulator& other);

  ScalarField mean_field() const;
  /// E[(x - mean)^p], p in {2, 3, 4}.
  ScalarField central_moment(int p) const;
  /// Standard error of the sample mean, per node.
  ScalarField stderr_field() const;
};

struct EnsembleStats {
  GridPtr grid;
  long count = 0;
  double t = 0.0;
  std::uint64_t config_hash = 0;
  std::map<std::string, MomentFieldAccumulator> acc;
  /// Full member states, kept only in retain_members debug mode.
  std::vector<SpdeState> members;
};

EnsembleStats merge(const EnsembleStats& a, const EnsembleStats& b);

struct EnsembleOptions {
  int members = 2;
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double t_end = 0.1;
  double g = 1.0;
  SpdeScheme scheme = SpdeScheme::stratonovich;
  bool enable_u = false;
  int moments_P = 4;
  int threads = 1;
  bool retain_members = false;
};

/// Runs `members` independent SPDE members from the trajectory's initial data
/// and accumulates final-time statistics. Members are partitioned into a
/// fixed number of shards independent of the thread count; shards accumulate
/// sequentially and merge in fixed order, so results are bit-identical for
/// any --threads. Tracked keys: theta_mean, theta_c2..theta_cP, and with the
/// u-equation enabled dtheta2_ij, cross_ij, u2_ij for ij in {00,01,10,11}.
EnsembleStats run_ensemble(const ExpectationTrajectory& traj,
                           const NoiseBasis& basis,
                           const EnsembleOptions& opts);

struct ClosureEntry {
  std::string name;
  double rel_error = 0.0;
  double three_stderr = 0.0;  // 3 * aggregated MC standard error, relative
  double tol = 0.0;           // configured discretization tolerance
  bool pass = false;
};

struct ClosureReport {
  double t = 0.0;
  std::vector<ClosureEntry> entries;
  bool all_pass() const;
};

/// Relative-L2 comparison of a tracked ensemble estimate against the closed
/// PDE solution; pass iff error <= max(3 * MC stderr, tol).
ClosureEntry closure_compare(const EnsembleStats& stats,
                             const std::string& key,
                             const ScalarField& reference, double reference_t,
                             double tol);

/// Aggregated comparison over the four components key_00..key_11.
ClosureEntry closure_compare_tensor(const EnsembleStats& stats,
                                    const std::string& prefix,
                                    const Tensor2Field& reference,
                                    double reference_t, double tol);

}  // namespace lasalt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lasalt/expectation.hpp"

namespace lasalt {

/// LSF1 snapshot: magic "LSF1", little-endian u32 grid_n, u32 n_components,
/// u64 step_index, f64 time, then n_components * grid_n^2 f64 values,
/// row-major with the y index outermost, components concatenated.
struct Lsf1Snapshot {
  std::uint32_t grid_n = 0;
  std::uint64_t step_index = 0;
  double time = 0.0;
  std::vector<std::vector<double>> components;
};

void write_lsf1(const std::string& path, const Lsf1Snapshot& snap);
Lsf1Snapshot read_lsf1(const std::string& path);

Lsf1Snapshot snapshot_of(const ScalarField& f, std::uint64_t step, double t);
Lsf1Snapshot snapshot_of(const OneFormField& f, std::uint64_t step, double t);
Lsf1Snapshot snapshot_of(const VectorField& f, std::uint64_t step, double t);
Lsf1Snapshot snapshot_of(const Tensor2Field& f, std::uint64_t step, double t);

ScalarField scalar_from(const Lsf1Snapshot& snap, const GridPtr& grid);
VectorField vector_from(const Lsf1Snapshot& snap, const GridPtr& grid);

/// meta.json plus one LSF1 file per field per saved step.
void save_trajectory(const std::string& dir, const ExpectationTrajectory& traj,
                     bool force);
ExpectationTrajectory load_trajectory(const std::string& dir);

/// Diagnostics CSV: columns t, field, l2, min, max, aux.
class DiagnosticsCsv {
 public:
  explicit DiagnosticsCsv(const std::string& path);
  ~DiagnosticsCsv();

  void row(double t, const std::string& field, double l2, double mn, double mx,
           double aux = 0.0);
  void row(double t, const std::string& field, const ScalarField& f,
           double aux = 0.0);

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace lasalt

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lasalt/montecarlo.hpp"

namespace lasalt {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  int threads = 1;
  std::uint64_t seed = 1;
  /// Skip the ensemble-heavy criteria (A-4..A-7); used by smoke tests.
  bool quick = false;
};

/// Runs the full acceptance ladder A-1..A-12 at desk scale. Deterministic for
/// a fixed seed, independent of the thread count. Prints one line per
/// criterion to `progress` as it completes, when non-null.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream* progress = nullptr);

/// Machine-readable summary; no timestamps, byte-identical across reruns.
std::string acceptance_report_json(const std::vector<CriterionResult>& results);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace lasalt

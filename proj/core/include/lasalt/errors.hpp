#pragma once

#include <stdexcept>
#include <string>

namespace lasalt {

struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonZeroMean : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EllipticityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a state field blows up; carries the offending step.
struct Instability : std::runtime_error {
  long step;
  Instability(const std::string& what, long step_)
      : std::runtime_error(what + " (step " + std::to_string(step_) + ")"),
        step(step_) {}
};

struct TrajectoryExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeMisaligned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HashMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct JacobianDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lasalt

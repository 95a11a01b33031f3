#pragma once

#include <stdexcept>
#include <cstddef>
#include <string>
#include <utility>

namespace porodg {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-manifold or otherwise inconsistent element connectivity.
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Case or boundary configuration that cannot be honoured.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a constitutive law.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Krylov iteration stopped without meeting the residual threshold.
struct NonConvergence : std::runtime_error {
  NonConvergence(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), final_residual(residual), iterations(iterations) {}
  double final_residual;
  int iterations;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A time-step sub-problem failed; carries where it happened.
struct StepError : std::runtime_error {
  StepError(const std::string& what, std::size_t step, std::string substep)
      : std::runtime_error(what), step(step), substep(std::move(substep)) {}
  std::size_t step;
  std::string substep;
};

}  // namespace porodg

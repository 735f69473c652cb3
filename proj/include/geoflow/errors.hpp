#pragma once

#include <stdexcept>
#include <string>

namespace geoflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometric data: non-positive warp/conformal factors, r² ≤ 0,
/// negative α, sphere extinction.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Fields whose backend does not match the state they are applied to.
class BackendMismatch : public Error {
 public:
  using Error::Error;
};

/// Operation not available for this field representation.
class UnsupportedRepresentation : public Error {
 public:
  using Error::Error;
};

/// Field content above what the grid or band limit can represent.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Explicit time step exceeds the parabolic stability bound.
class StepError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or collapsed metric during time integration.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A field required to stay positive went non-positive.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// Missing or invalid metadata that a check hypothesis depends on.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to reach tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Configuration schema violation; `path()` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace geoflow

#ifndef RSSKM_ERROR_HPP
#define RSSKM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rsskm {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag ("empty sample", "unbalanced design", ...).
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

struct EmptySampleError : Error {
  explicit EmptySampleError(const std::string& msg) : Error("empty sample", msg) {}
};

struct InvalidObservationError : Error {
  explicit InvalidObservationError(const std::string& msg) : Error("invalid observation", msg) {}
};

struct UnbalancedDesignError : Error {
  explicit UnbalancedDesignError(const std::string& msg) : Error("unbalanced design", msg) {}
};

struct EmptyDesignError : Error {
  explicit EmptyDesignError(const std::string& msg) : Error("empty design", msg) {}
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& msg) : Error("parameter", msg) {}
};

struct InferenceWindowError : Error {
  explicit InferenceWindowError(const std::string& msg) : Error("outside inference window", msg) {}
};

/// Raised when a concomitant correlation target exceeds what a noiseless
/// proxy can reach. Carries the attainable ceiling.
class CalibrationError : public Error {
public:
  CalibrationError(const std::string& msg, double ceiling)
      : Error("calibration", msg), ceiling_(ceiling) {}
  double ceiling() const noexcept { return ceiling_; }

private:
  double ceiling_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

} // namespace rsskm

#endif // RSSKM_ERROR_HPP

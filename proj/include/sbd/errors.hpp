#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbd {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SingularCirculant,
  OddLattice,
  SingularInnovation,
  NegativeEigenvalue,
  SingularConstraintGram,
  ConstraintViolated,
  IllConditioned,
  MaskNotKronecker,
  NonPositiveVariance,
  NonPositiveScale,
  IndefiniteY,
  IndefiniteS,
  StaleWorkspace,
  NonFiniteTrajectory,
  TooLarge,
  IndefiniteDense,
  DegenerateTrace,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Error raised by the numerical core. The code identifies the failure
/// class; the message carries context for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace sbd

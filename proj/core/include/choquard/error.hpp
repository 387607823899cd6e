#pragma once
#include <stdexcept>
#include <string>

namespace choquard {

enum class ErrorKind {
  InvalidConfiguration,
  InvalidParameter,
  IncompatibleGrid,
  DependencyMissing,
  DegenerateField,
  NoProjection,
  ConstraintViolation,
  ShootingFailure,
  InvalidInitialization,
  RescaleInconsistency,
  Resolution,
  NoRoot,
  InsufficientSpan,
  InsufficientOverlap,
  BracketFailure,
  Io,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

} // namespace choquard

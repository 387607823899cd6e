#include "choquard/error.hpp"

namespace choquard {

const char* to_string(ErrorKind k) {
  switch (k) {
  case ErrorKind::InvalidConfiguration: return "invalid-configuration";
  case ErrorKind::InvalidParameter: return "invalid-parameter";
  case ErrorKind::IncompatibleGrid: return "incompatible-grid";
  case ErrorKind::DependencyMissing: return "dependency-missing";
  case ErrorKind::DegenerateField: return "degenerate-field";
  case ErrorKind::NoProjection: return "no-projection";
  case ErrorKind::ConstraintViolation: return "constraint-violation";
  case ErrorKind::ShootingFailure: return "shooting-failure";
  case ErrorKind::InvalidInitialization: return "invalid-initialization";
  case ErrorKind::RescaleInconsistency: return "rescale-inconsistency";
  case ErrorKind::Resolution: return "resolution";
  case ErrorKind::NoRoot: return "no-root";
  case ErrorKind::InsufficientSpan: return "insufficient-span";
  case ErrorKind::InsufficientOverlap: return "insufficient-overlap";
  case ErrorKind::BracketFailure: return "bracket-failure";
  case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace choquard

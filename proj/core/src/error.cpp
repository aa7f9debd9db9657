#include "selint/error.hpp"

namespace selint {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::InsufficientSample: return "insufficient sample";
    case ErrorKind::DegenerateIndex: return "degenerate index";
    case ErrorKind::DegenerateLocalDesign: return "degenerate local design";
    case ErrorKind::NoEffectiveObservations: return "no effective observations";
    case ErrorKind::SingularDesign: return "singular design";
    case ErrorKind::InsufficientSelected: return "insufficient selected observations";
    case ErrorKind::ProbitFailed: return "probit failed";
    case ErrorKind::NormalizationImpossible: return "normalization impossible";
    case ErrorKind::NoConvergence: return "no convergence";
    case ErrorKind::DegenerateOutcome: return "degenerate outcome";
    case ErrorKind::EmptyTail: return "empty tail";
    case ErrorKind::OutOfNumericRange: return "out of numeric range";
    case ErrorKind::BootstrapFailed: return "bootstrap failed";
    case ErrorKind::RateCheckFailed: return "rate check failed";
    case ErrorKind::Io: return "io error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::MissingColumn: return "missing column";
  }
  return "unknown";
}

bool Error::is_usage() const noexcept {
  switch (kind_) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Io:
    case ErrorKind::Parse:
    case ErrorKind::MissingColumn:
      return true;
    default:
      return false;
  }
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace selint

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selint {

enum class ErrorKind {
  InvalidArgument,
  InsufficientSample,
  DegenerateIndex,
  DegenerateLocalDesign,
  NoEffectiveObservations,
  SingularDesign,
  InsufficientSelected,
  ProbitFailed,
  NormalizationImpossible,
  NoConvergence,
  DegenerateOutcome,
  EmptyTail,
  OutOfNumericRange,
  BootstrapFailed,
  RateCheckFailed,
  Io,
  Parse,
  MissingColumn,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the Monte
// Carlo harness, the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Input/usage problems as opposed to numerical breakdown of an estimator.
  bool is_usage() const noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace selint

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace conic {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  RepeatedRoot,
  DegreeTooLow,
  PathHitsBranchPoint,
  ToleranceNotReached,
  SingularPeriodMatrix,
  CoincidentPoints,
  NumericallyDegenerate,
  ProbePointsDegenerate,
  ExtrapolationUnstable,
  NotASimpleZero,
  UnsupportedChart,
  GenusNotTwo,
  PeriodsNotImaginary,
  PathThroughSingularity,
  FitResidualTooLarge,
  BudgetExhausted,
  DivisorNotCanonical,
  NotConnected,
  ResolutionTooLow,
  EigensolverFailure,
  InvalidArgument,
  ConfigInvalid,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every module; `kind()` names the failure class so
/// callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// what() without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

struct Tolerances {
  double period = 1e-10;
  double root = 1e-12;
  double root_separation = 1e-8;
  /// Largest condition number accepted for the a-period matrix.
  double max_condition = 1e8;

  Tolerances scaled(double factor) const {
    Tolerances t = *this;
    t.period *= factor;
    t.root *= factor;
    t.root_separation *= factor;
    return t;
  }
};

}  // namespace conic

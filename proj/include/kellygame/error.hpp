#pragma once

#include <stdexcept>
#include <string>

namespace kelly {

enum class Errc {
  dimension_mismatch,
  non_positive_volatility,
  invalid_correlation,
  singular_covariance,
  time_off_grid,
  division_degenerate,
  domain_violation,
  invalid_argument,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::non_positive_volatility: return "NonPositiveVolatility";
    case Errc::invalid_correlation: return "InvalidCorrelation";
    case Errc::singular_covariance: return "SingularCovariance";
    case Errc::time_off_grid: return "TimeOffGrid";
    case Errc::division_degenerate: return "DivisionDegenerate";
    case Errc::domain_violation: return "DomainViolation";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as an Error carrying
/// one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace kelly

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trdist {

enum class ErrorCode {
  dimension_mismatch,
  non_finite_input,
  invalid_argument,
  shift_not_positive,
  non_positive_shift,
  not_nonconvex,
  assumption_violated,
  no_convergence,
  dimension_too_large,
  kappa_nonexistent,
  not_one_dimensional,
  degenerate_denominator,
  parse_error,
  validation_error,
  io_error,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::shift_not_positive: return "ShiftNotPositive";
    case ErrorCode::non_positive_shift: return "NonPositiveShift";
    case ErrorCode::not_nonconvex: return "NotNonconvex";
    case ErrorCode::assumption_violated: return "AssumptionViolated";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::dimension_too_large: return "DimensionTooLarge";
    case ErrorCode::kappa_nonexistent: return "KappaNonexistent";
    case ErrorCode::not_one_dimensional: return "NotOneDimensional";
    case ErrorCode::degenerate_denominator: return "DegenerateDenominator";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trdist

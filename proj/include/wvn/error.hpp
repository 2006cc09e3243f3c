#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wvn {

enum class ErrorCode {
  overlapping_gaps,
  empty_set,
  malformed_tail_rule,
  outlier_inside_set,
  no_host_gap,
  pairing_overflow,
  length_mismatch,
  not_hermitian,
  no_convergence,
  not_obstructed,
  tail_exhausted,
  separation_violated,
  bound_violated,
  parse_error,
  invalid_argument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::overlapping_gaps: return "OverlappingGaps";
    case ErrorCode::empty_set: return "EmptySet";
    case ErrorCode::malformed_tail_rule: return "MalformedTailRule";
    case ErrorCode::outlier_inside_set: return "OutlierInsideM";
    case ErrorCode::no_host_gap: return "NoHostGap";
    case ErrorCode::pairing_overflow: return "PairingOverflow";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::not_hermitian: return "NotHermitian";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::not_obstructed: return "NotObstructed";
    case ErrorCode::tail_exhausted: return "TailExhausted";
    case ErrorCode::separation_violated: return "SeparationViolated";
    case ErrorCode::bound_violated: return "BoundViolated";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

// All library failures are reported through this type; `code()` is stable,
// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wvn

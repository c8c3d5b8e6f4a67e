#pragma once

#include <stdexcept>
#include <string>

namespace creditnet {

enum class Errc {
  non_square_matrix,
  negative_amount,
  nonzero_diagonal,
  duplicate_label,
  dimension_mismatch,
  payment_exceeds_liability,
  invalid_config,
  not_converged,
  cycle_limit_exceeded,
  stale_cycle,
  no_such_debt,
  duplicate_edge,
  search_space_too_large,
  invalid_spec,
  parse_error,
  schema_error,
  invariant_violation,
  malformed_record,
  unknown_template,
  malformed_plan,
  invalid_plan,
  transport_error,
  io_error,
};

const char* errc_name(Errc code);

// Single exception type for the whole engine; the code tells callers (and the
// CLI exit-code mapping) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::non_square_matrix: return "NonSquareMatrix";
    case Errc::negative_amount: return "NegativeAmount";
    case Errc::nonzero_diagonal: return "NonzeroDiagonal";
    case Errc::duplicate_label: return "DuplicateLabel";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::payment_exceeds_liability: return "PaymentExceedsLiability";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::not_converged: return "NotConverged";
    case Errc::cycle_limit_exceeded: return "CycleLimitExceeded";
    case Errc::stale_cycle: return "StaleCycle";
    case Errc::no_such_debt: return "NoSuchDebt";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::search_space_too_large: return "SearchSpaceTooLarge";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::parse_error: return "ParseError";
    case Errc::schema_error: return "SchemaError";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::unknown_template: return "UnknownTemplate";
    case Errc::malformed_plan: return "MalformedPlan";
    case Errc::invalid_plan: return "InvalidPlan";
    case Errc::transport_error: return "TransportError";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace creditnet

#include "lavs/error.hpp"

namespace lavs {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ReservedDelimiter: return "RESERVED_DELIMITER";
    case ErrorCode::MissingUsage: return "MISSING_USAGE";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::MalformedLine: return "MALFORMED_LINE";
    case ErrorCode::UnknownToken: return "UNKNOWN_TOKEN";
    case ErrorCode::SizeMismatch: return "SIZE_MISMATCH";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::TooFewLanguages: return "TOO_FEW_LANGUAGES";
    case ErrorCode::BudgetUnreachable: return "BUDGET_UNREACHABLE";
    case ErrorCode::PlanMismatch: return "PLAN_MISMATCH";
    case ErrorCode::UncoveredLanguage: return "UNCOVERED_LANGUAGE";
    case ErrorCode::EmptyDirection: return "EMPTY_DIRECTION";
    case ErrorCode::DegenerateVariance: return "DEGENERATE_VARIANCE";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
  }
  return "UNKNOWN";
}

}  // namespace lavs

#pragma once

#include <stdexcept>
#include <string>

namespace lavs {

enum class ErrorCode {
  ReservedDelimiter,
  MissingUsage,
  IoError,
  MalformedLine,
  UnknownToken,
  SizeMismatch,
  Domain,
  TooFewLanguages,
  BudgetUnreachable,
  PlanMismatch,
  UncoveredLanguage,
  EmptyDirection,
  DegenerateVariance,
  ConfigInvalid,
};

const char* to_string(ErrorCode code);

// Domain error carrying a stable machine-readable code. The CLI maps these
// to a structured JSON object on stderr.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace lavs

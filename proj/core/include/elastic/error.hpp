#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elastic {

enum class ErrorCode {
  kInvalidArgument,
  kExpiredMaturity,
  kInsufficientFunds,
  kInsufficientHoldings,
  kNotAuthorized,
  kUnknownOrder,
  kUnknownAccount,
  kInvalidBlock,
  kValidation,
  kInvariantViolation,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace elastic

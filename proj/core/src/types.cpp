#include "elastic/types.hpp"

#include <string>

namespace elastic {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kExpiredMaturity: return "expired_maturity";
    case ErrorCode::kInsufficientFunds: return "insufficient_funds";
    case ErrorCode::kInsufficientHoldings: return "insufficient_holdings";
    case ErrorCode::kNotAuthorized: return "not_authorized";
    case ErrorCode::kUnknownOrder: return "unknown_order";
    case ErrorCode::kUnknownAccount: return "unknown_account";
    case ErrorCode::kInvalidBlock: return "invalid_block";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kInvariantViolation: return "invariant_violation";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

DurationYears duration_of(Date maturity, Date today) {
  if (maturity <= today) {
    throw Error(ErrorCode::kExpiredMaturity,
                "maturity day " + std::to_string(maturity.day_index) +
                    " is not after day " + std::to_string(today.day_index));
  }
  return DurationYears(maturity - today);
}

Price Price::from_nanos(std::int64_t nanos) {
  if (nanos <= 0 || nanos > kNanosPerDollar) {
    throw Error(ErrorCode::kInvalidArgument,
                "price " + std::to_string(nanos) + " nanos outside (0, 1e9]");
  }
  return Price(nanos);
}

Money cash_amount(std::int64_t qty, Price price) {
  if (qty < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative quantity");
  }
  // qty * nanos stays below 2^63 for any qty under ~9.2e9 bonds.
  const std::int64_t product = qty * price.nanos();
  return Money{(product + kNanosPerCent / 2) / kNanosPerCent};
}

Money escrow_per_bond(Price limit) {
  return Money{(limit.nanos() + kNanosPerCent - 1) / kNanosPerCent};
}

}  // namespace elastic

#pragma once

// Exact value types shared by every module: calendar days, durations,
// integer-cent money, integer-nano prices and account identifiers.

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "elastic/error.hpp"

namespace elastic {

inline constexpr std::int64_t kDaysPerYear = 365;
inline constexpr std::int64_t kCentsPerBond = 100;
inline constexpr std::int64_t kNanosPerDollar = 1'000'000'000;
inline constexpr std::int64_t kNanosPerCent = 10'000'000;

/// Whole days since the simulation epoch (day 0).
struct Date {
  std::int64_t day_index = 0;

  constexpr auto operator<=>(const Date&) const = default;

  constexpr Date operator+(std::int64_t days) const { return Date{day_index + days}; }
  constexpr Date operator-(std::int64_t days) const { return Date{day_index - days}; }
  constexpr std::int64_t operator-(Date other) const { return day_index - other.day_index; }
};

/// A duration held exactly as whole days; years are days / 365.
class DurationYears {
 public:
  constexpr DurationYears() = default;
  constexpr explicit DurationYears(std::int64_t days) : days_(days) {}

  constexpr std::int64_t days() const { return days_; }
  constexpr double years() const {
    return static_cast<double>(days_) / static_cast<double>(kDaysPerYear);
  }

  constexpr auto operator<=>(const DurationYears&) const = default;

 private:
  std::int64_t days_ = 0;
};

/// Duration of a bond maturing on `maturity` as seen from `today`.
/// Throws kExpiredMaturity when maturity <= today.
DurationYears duration_of(Date maturity, Date today);

/// Signed integer US cents.
struct Money {
  std::int64_t cents = 0;

  constexpr auto operator<=>(const Money&) const = default;

  constexpr Money operator+(Money o) const { return Money{cents + o.cents}; }
  constexpr Money operator-(Money o) const { return Money{cents - o.cents}; }
  constexpr Money operator-() const { return Money{-cents}; }
  constexpr Money& operator+=(Money o) {
    cents += o.cents;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    cents -= o.cents;
    return *this;
  }
};

/// Dollars per $1 of face value, in units of 1e-9. Always in (0, 1e9].
class Price {
 public:
  static Price from_nanos(std::int64_t nanos);
  static constexpr Price par() { return Price(kNanosPerDollar); }

  constexpr std::int64_t nanos() const { return nanos_; }
  constexpr double as_double() const {
    return static_cast<double>(nanos_) / static_cast<double>(kNanosPerDollar);
  }

  constexpr auto operator<=>(const Price&) const = default;

 private:
  constexpr explicit Price(std::int64_t nanos) : nanos_(nanos) {}
  std::int64_t nanos_;
};

/// Opaque, totally ordered account identifier. Value 0 is the cash authority.
struct AccountId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const AccountId&) const = default;
};

inline constexpr AccountId kAuthority{0};

/// Cash exchanged for `qty` bonds at `price`: round_half_up(qty * nanos / 1e7).
Money cash_amount(std::int64_t qty, Price price);

/// Per-bond cash escrow for a buy limited at `limit`: ceil(nanos / 1e7) cents.
/// Linear in quantity and never below the cash of any fill at or under the limit.
Money escrow_per_bond(Price limit);

}  // namespace elastic

template <>
struct std::hash<elastic::AccountId> {
  std::size_t operator()(const elastic::AccountId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

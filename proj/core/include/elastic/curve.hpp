#pragma once

#include <map>

#include "elastic/types.hpp"

namespace elastic {

/// Annually compounded rate; 0.02 means 2% per year.
struct Rate {
  double per_year = 0.0;

  constexpr auto operator<=>(const Rate&) const = default;
};

struct BandConfig {
  DurationYears tau{7};
  Rate target{0.02};
  Rate half_width{0.001};

  /// Throws kValidation unless tau > 0 and 0 <= half_width < target.
  void validate() const;
  bool operator==(const BandConfig&) const = default;
};

struct BandPrices {
  Price minus = Price::par();  // authority standing buy; implies target + half_width
  Price plus = Price::par();   // authority standing sell; implies target - half_width
};

/// price^(-1/t) - 1. Rejects t <= 0.
Rate implied_rate(Price price, DurationYears t);

/// Unquantized form of implied_rate for prices in (0, 1].
Rate implied_rate(double price, double years);

/// (1 + rate)^(-t) as a real number, before rounding to nanos.
double discount_factor(Rate rate, double years);

/// (1 + rate)^(-t) rounded half-up to nanos. Rejects t <= 0 and rate < 0.
Price price_from_rate(Rate rate, DurationYears t);

/// Band edges for the tau-maturity bond, each rounded toward the band
/// interior so that every price in [minus, plus] implies a rate inside
/// [target - half_width, target + half_width]. A zero-width band (or one
/// narrower than a nano) collapses both edges onto price_from_rate(target).
BandPrices band_prices(const BandConfig& cfg);

struct CurvePoint {
  Price price;
  Rate rate;
  bool operator==(const CurvePoint&) const = default;
};

struct YieldCurve {
  Date as_of;
  std::map<Date, CurvePoint> points;  // untraded maturities are absent
};

/// Builds the curve from last traded prices. Maturities on or before
/// `as_of` are skipped.
YieldCurve yield_curve(const std::map<Date, Price>& last_prices, Date as_of);

}  // namespace elastic

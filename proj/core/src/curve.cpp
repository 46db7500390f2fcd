#include "elastic/curve.hpp"

#include <cmath>
#include <string>

namespace elastic {
namespace {

void require_positive_duration(double years) {
  if (!(years > 0.0) || !std::isfinite(years)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  }
}

}  // namespace

void BandConfig::validate() const {
  if (tau.days() <= 0) {
    throw Error(ErrorCode::kValidation, "band.tau_days must be positive");
  }
  if (!std::isfinite(target.per_year) || !std::isfinite(half_width.per_year)) {
    throw Error(ErrorCode::kValidation, "band rates must be finite");
  }
  if (half_width.per_year < 0.0) {
    throw Error(ErrorCode::kValidation, "band.half_width must be non-negative");
  }
  if (!(half_width.per_year < target.per_year)) {
    throw Error(ErrorCode::kValidation, "band.half_width must be below band.target_rate");
  }
}

Rate implied_rate(double price, double years) {
  require_positive_duration(years);
  if (!(price > 0.0) || price > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "price outside (0, 1]");
  }
  return Rate{std::expm1(-std::log(price) / years)};
}

Rate implied_rate(Price price, DurationYears t) {
  if (t.days() <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  }
  return implied_rate(price.as_double(), t.years());
}

double discount_factor(Rate rate, double years) {
  require_positive_duration(years);
  if (!(rate.per_year >= 0.0) || !std::isfinite(rate.per_year)) {
    throw Error(ErrorCode::kInvalidArgument, "rate must be finite and non-negative");
  }
  return std::exp(-years * std::log1p(rate.per_year));
}

Price price_from_rate(Rate rate, DurationYears t) {
  if (t.days() <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  }
  const double scaled = discount_factor(rate, t.years()) * static_cast<double>(kNanosPerDollar);
  const auto nanos = static_cast<std::int64_t>(std::floor(scaled + 0.5));
  if (nanos <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "rate too high: price rounds to zero");
  }
  return Price::from_nanos(nanos);
}

BandPrices band_prices(const BandConfig& cfg) {
  cfg.validate();
  const double years = cfg.tau.years();
  const double scale = static_cast<double>(kNanosPerDollar);
  const double low = discount_factor(Rate{cfg.target.per_year + cfg.half_width.per_year}, years);
  const double high = discount_factor(Rate{cfg.target.per_year - cfg.half_width.per_year}, years);
  const auto minus = static_cast<std::int64_t>(std::ceil(low * scale));
  const auto plus = static_cast<std::int64_t>(std::floor(high * scale));
  if (minus > plus || cfg.half_width.per_year == 0.0) {
    const Price mid = price_from_rate(cfg.target, cfg.tau);
    return BandPrices{mid, mid};
  }
  return BandPrices{Price::from_nanos(minus), Price::from_nanos(plus)};
}

YieldCurve yield_curve(const std::map<Date, Price>& last_prices, Date as_of) {
  YieldCurve curve{as_of, {}};
  for (auto it = last_prices.upper_bound(as_of); it != last_prices.end(); ++it) {
    const DurationYears t = duration_of(it->first, as_of);
    curve.points.emplace_hint(curve.points.end(), it->first,
                              CurvePoint{it->second, implied_rate(it->second, t)});
  }
  return curve;
}

}  // namespace elastic

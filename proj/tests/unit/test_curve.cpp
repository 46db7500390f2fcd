#include <gtest/gtest.h>

#include <cmath>

#include "elastic/curve.hpp"

using namespace elastic;

namespace {

const DurationYears kTau(7);

}  // namespace

TEST(ImpliedRate, ParIsZero) {
  for (std::int64_t d : {1, 7, 365, 3650}) {
    EXPECT_DOUBLE_EQ(implied_rate(Price::par(), DurationYears(d)).per_year, 0.0);
  }
}

TEST(ImpliedRate, HalfOverOneYear) {
  EXPECT_DOUBLE_EQ(implied_rate(Price::from_nanos(500'000'000), DurationYears(365)).per_year, 1.0);
}

TEST(ImpliedRate, LowerBandPrice) {
  EXPECT_NEAR(implied_rate(Price::from_nanos(999'601'510), kTau).per_year, 0.0210, 1e-4);
}

TEST(ImpliedRate, RejectsNonPositiveDuration) {
  EXPECT_THROW(implied_rate(Price::par(), DurationYears(0)), Error);
}

TEST(PriceFromRate, Examples) {
  EXPECT_EQ(price_from_rate(Rate{0.0}, DurationYears(365)).nanos(), 1'000'000'000);
  EXPECT_EQ(price_from_rate(Rate{1.0}, DurationYears(365)).nanos(), 500'000'000);
  // (1.021)^(-7/365) = 0.99960151017... (50-digit evaluation)
  EXPECT_NEAR(price_from_rate(Rate{0.021}, kTau).nanos(), 999'601'510, 1);
}

TEST(PriceFromRate, RejectsNegativeRate) {
  EXPECT_THROW(price_from_rate(Rate{-0.01}, kTau), Error);
}

// Exact band prices from a 50-digit evaluation:
//   1.021^(-7/365) = 0.999601510174 -> rounded up   999601511
//   1.019^(-7/365) = 0.999639099990 -> rounded down 999639099
TEST(BandPrices, DefaultsRoundInward) {
  const BandPrices b = band_prices(BandConfig{});
  EXPECT_EQ(b.minus.nanos(), 999'601'511);
  EXPECT_EQ(b.plus.nanos(), 999'639'099);
}

TEST(BandPrices, ImpliedRatesStayInsideTheBand) {
  const BandPrices b = band_prices(BandConfig{});
  const double lo = implied_rate(b.plus, kTau).per_year;
  const double hi = implied_rate(b.minus, kTau).per_year;
  EXPECT_GE(lo, 0.019);
  EXPECT_LE(hi, 0.021);
  // Half-up rounding of the exact lower price would fall just outside.
  EXPECT_GT(implied_rate(Price::from_nanos(999'601'510), kTau).per_year, 0.021);
}

TEST(BandPrices, ZeroHalfWidthCollapses) {
  BandConfig cfg;
  cfg.half_width = Rate{0.0};
  const BandPrices b = band_prices(cfg);
  EXPECT_EQ(b.minus, b.plus);
  EXPECT_EQ(b.minus, price_from_rate(Rate{0.02}, kTau));
}

TEST(BandPrices, ValidatesConfig) {
  BandConfig cfg;
  cfg.tau = DurationYears(0);
  EXPECT_THROW(band_prices(cfg), Error);
  cfg = BandConfig{};
  cfg.half_width = Rate{-0.001};
  EXPECT_THROW(band_prices(cfg), Error);
}

TEST(BandPrices, InsideBandForManyConfigs) {
  for (std::int64_t tau : {1, 7, 14, 30, 91}) {
    for (double target : {0.005, 0.02, 0.05, 0.1}) {
      for (double hw : {0.0001, 0.001, 0.004}) {
        BandConfig cfg{DurationYears(tau), Rate{target}, Rate{hw}};
        const BandPrices b = band_prices(cfg);
        if (b.minus == b.plus) continue;
        ASSERT_LE(implied_rate(b.minus, cfg.tau).per_year, target + hw + 1e-15);
        ASSERT_GE(implied_rate(b.plus, cfg.tau).per_year, target - hw - 1e-15);
      }
    }
  }
}

TEST(YieldCurve, EmptyInput) { EXPECT_TRUE(yield_curve({}, Date{0}).points.empty()); }

TEST(YieldCurve, ParPointHasZeroRate) {
  const YieldCurve c = yield_curve({{Date{10}, Price::par()}}, Date{0});
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_DOUBLE_EQ(c.points.at(Date{10}).rate.per_year, 0.0);
}

TEST(YieldCurve, DecreasingPricesGiveNonNegativeRates) {
  const YieldCurve c = yield_curve(
      {{Date{30}, Price::from_nanos(998'000'000)}, {Date{365}, Price::from_nanos(980'000'000)}},
      Date{0});
  for (const auto& [m, p] : c.points) EXPECT_GE(p.rate.per_year, 0.0);
}

TEST(YieldCurve, SkipsMaturedPoints) {
  const YieldCurve c = yield_curve(
      {{Date{3}, Price::par()}, {Date{5}, Price::par()}, {Date{9}, Price::par()}}, Date{5});
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_TRUE(c.points.contains(Date{9}));
}

TEST(DiscountFactor, InvertsImpliedRate) {
  for (double t : {1.0 / 365, 7.0 / 365, 0.5, 1.0, 4.0, 10.0}) {
    for (double r : {0.0001, 0.02, 0.1, 0.5}) {
      const double p = discount_factor(Rate{r}, t);
      ASSERT_NEAR(implied_rate(p, t).per_year, r, 1e-9 * r);
    }
  }
}

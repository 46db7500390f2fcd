#include <gtest/gtest.h>

#include <map>
#include <random>

#include "elastic/agents.hpp"

using namespace elastic;

namespace {

constexpr AccountId kMe{1};

Observation base_observation(Date today = Date{10}) {
  Observation obs;
  obs.today = today;
  obs.curve.as_of = today;
  obs.band_config = BandConfig{};
  obs.band = band_prices(obs.band_config);
  obs.free_cash = Money{100'000};
  obs.shock_window.assign(10, 1.0);
  return obs;
}

AgentSpec spec_of(AgentParams params, std::string stream = "g#0") {
  return AgentSpec{std::move(params), kMe, std::move(stream)};
}

StreamRng rng_for(const std::string& stream, std::uint64_t seed = 42) {
  return StreamRng(seed, stream_id(stream));
}

// Escrow each order list would need against what the agent observed.
void expect_escrow_legal(const std::vector<OrderRequest>& orders, const Observation& obs) {
  Money cash;
  std::map<Date, std::int64_t> bonds;
  for (const OrderRequest& o : orders) {
    ASSERT_EQ(o.owner, kMe);
    ASSERT_FALSE(o.unbounded);
    ASSERT_GT(o.qty, 0);
    ASSERT_GT(o.maturity, obs.today);
    ASSERT_EQ(o.expiry, obs.today);
    if (o.side == Side::kBuy) cash += Money{o.qty * escrow_per_bond(o.limit).cents};
    else bonds[o.maturity] += o.qty;
  }
  ASSERT_LE(cash, obs.free_cash);
  for (const auto& [m, q] : bonds) {
    const auto it = obs.free_bonds.find(m);
    ASSERT_LE(q, it == obs.free_bonds.end() ? 0 : it->second);
  }
}

}  // namespace

TEST(Archetype, NamesRoundTrip) {
  for (Archetype a : {Archetype::kSaver, Archetype::kYieldSeeker, Archetype::kArbitrageur}) {
    EXPECT_EQ(parse_archetype(to_string(a)), a);
  }
  EXPECT_FALSE(parse_archetype("speculator").has_value());
}

TEST(Saver, StressedWithNothingToSell) {
  Observation obs = base_observation();
  obs.shock_window.assign(10, 1e9);  // certain shock
  const AgentSpec spec = spec_of(SaverParams{});
  ASSERT_TRUE(saver_stress(SaverParams{}, obs, rng_for(spec.stream)).stressed);
  for (const OrderRequest& o : agent_step(spec, obs, rng_for(spec.stream))) {
    EXPECT_NE(o.side, Side::kSell);
  }
}

TEST(Saver, StressedSellsTauBondsAtLowerBand) {
  Observation obs = base_observation();
  obs.shock_window.assign(10, 1e9);
  obs.free_bonds[obs.today + 7] = 12;
  const AgentSpec spec = spec_of(SaverParams{});
  const auto orders = agent_step(spec, obs, rng_for(spec.stream));
  std::int64_t sold = 0;
  for (const OrderRequest& o : orders) {
    if (o.side == Side::kSell && o.maturity == obs.today + 7) {
      EXPECT_EQ(o.limit, obs.band.minus);
      sold += o.qty;
    }
  }
  EXPECT_EQ(sold, 12);
  expect_escrow_legal(orders, obs);
}

TEST(Saver, CalmSaverNeverSells) {
  Observation obs = base_observation();
  obs.shock_window.assign(10, 0.0);
  obs.free_bonds[obs.today + 7] = 12;
  const AgentSpec spec = spec_of(SaverParams{});
  EXPECT_FALSE(saver_stress(SaverParams{}, obs, rng_for(spec.stream)).stressed);
  for (const OrderRequest& o : agent_step(spec, obs, rng_for(spec.stream))) {
    EXPECT_EQ(o.side, Side::kBuy);
  }
}

TEST(YieldSeeker, BuysWhenRateBeatsReservation) {
  Observation obs = base_observation();
  const Date far = obs.today + 2000;
  const Price p = price_from_rate(Rate{0.05}, DurationYears(2000));
  obs.curve.points.insert_or_assign(far, CurvePoint{p, implied_rate(p, DurationYears(2000))});
  const AgentSpec spec = spec_of(YieldSeekerParams{});
  const auto orders = agent_step(spec, obs, rng_for(spec.stream));
  ASSERT_EQ(orders.size(), 1u);
  EXPECT_EQ(orders[0].side, Side::kBuy);
  EXPECT_EQ(orders[0].maturity, far);
  EXPECT_GE(orders[0].limit, p);
  expect_escrow_legal(orders, obs);
}

TEST(YieldSeeker, IdleBelowReservation) {
  Observation obs = base_observation();
  const Price p = price_from_rate(Rate{0.02}, DurationYears(2000));
  obs.curve.points.insert_or_assign(obs.today + 2000, CurvePoint{p, Rate{0.02}});
  EXPECT_TRUE(agent_step(spec_of(YieldSeekerParams{}), obs, rng_for("g#0")).empty());
}

TEST(Arbitrageur, SellsTauBondsWhenRateAtTop) {
  Observation obs = base_observation();
  obs.rate_tau = implied_rate(obs.band.minus, DurationYears(7));
  obs.free_bonds[obs.today + 7] = 5;
  const auto orders = agent_step(spec_of(ArbitrageurParams{}), obs, rng_for("a#0"));
  ASSERT_FALSE(orders.empty());
  EXPECT_EQ(orders[0].side, Side::kSell);
  EXPECT_EQ(orders[0].limit, obs.band.minus);
  expect_escrow_legal(orders, obs);
}

TEST(Agents, DeterministicGivenInputs) {
  Observation obs = base_observation();
  obs.shock_window.assign(10, 50.0);
  obs.free_bonds[obs.today + 7] = 30;
  obs.free_bonds[obs.today + 20] = 30;
  for (const AgentParams& p :
       {AgentParams{SaverParams{}}, AgentParams{YieldSeekerParams{}}, AgentParams{ArbitrageurParams{}}}) {
    const AgentSpec spec = spec_of(p, "x#3");
    EXPECT_EQ(agent_step(spec, obs, rng_for("x#3")), agent_step(spec, obs, rng_for("x#3")));
  }
}

TEST(Agents, ValidateRejectsOutOfRange) {
  SaverParams s;
  s.shock_lambda = -1;
  EXPECT_THROW(spec_of(s).validate(), Error);
  YieldSeekerParams y;
  y.budget_fraction = 1.5;
  EXPECT_THROW(spec_of(y).validate(), Error);
  ArbitrageurParams a;
  a.max_days = 0;
  EXPECT_THROW(spec_of(a).validate(), Error);
}

TEST(AgentsProperty, OrdersAreAlwaysEscrowLegal) {
  std::mt19937_64 gen(314);
  std::uniform_int_distribution<std::int64_t> cash(0, 500'000);
  std::uniform_int_distribution<std::int64_t> qty(0, 40);
  std::uniform_int_distribution<std::int64_t> days(1, 3000);
  std::uniform_real_distribution<double> rate(0.0, 0.08);
  std::uniform_real_distribution<double> mult(0.0, 60.0);
  for (int iter = 0; iter < 3000; ++iter) {
    Observation obs = base_observation(Date{days(gen)});
    obs.free_cash = Money{cash(gen)};
    obs.shock_window.assign(10, mult(gen));
    for (int k = 0; k < 6; ++k) {
      const std::int64_t q = qty(gen);
      const Date m = obs.today + (k == 0 ? 7 : days(gen));
      if (q > 0) obs.free_bonds[m] = q;
      const Price p = price_from_rate(Rate{rate(gen)}, DurationYears(m - obs.today));
      obs.curve.points.insert_or_assign(m, CurvePoint{p, implied_rate(p, DurationYears(m - obs.today))});
    }
    if (iter % 2) obs.rate_tau = Rate{rate(gen) * 0.05 + 0.019};
    for (int k = 0; k < 3; ++k) {
      const std::int64_t d = k == 0 ? 14 : days(gen);
      obs.offers.push_back(AuctionOffer{k == 0 ? OfferKind::kEscalation : OfferKind::kReissue,
                                        obs.today + d, qty(gen) + 1,
                                        price_from_rate(Rate{0.1}, DurationYears(d))});
    }
    const std::string stream = "p#" + std::to_string(iter);
    for (const AgentParams& p : {AgentParams{SaverParams{}}, AgentParams{YieldSeekerParams{}},
                                 AgentParams{ArbitrageurParams{}}}) {
      expect_escrow_legal(agent_step(spec_of(p, stream), obs, rng_for(stream)), obs);
    }
  }
}

TEST(Rng, SubstreamsAreIndependentOfEachOther) {
  const StreamRng a(7, stream_id("savers#0"));
  const StreamRng b(7, stream_id("savers#1"));
  auto ga = a.for_day(Date{3});
  auto ga2 = a.for_day(Date{3});
  auto gb = b.for_day(Date{3});
  const auto x = ga();
  EXPECT_EQ(x, ga2());
  EXPECT_NE(x, gb());
  EXPECT_NE(a.for_day(Date{4})(), x);
}

TEST(Rng, Uniform01InRange) {
  std::mt19937_64 g(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(g);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

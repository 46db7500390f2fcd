#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "elastic/curve.hpp"
#include "elastic/market.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace elastic;

namespace {

constexpr AccountId kBuyer{1};
constexpr AccountId kSeller{2};
constexpr Date kMat{30};

Price nanos(std::int64_t n) { return Price::from_nanos(n); }

LedgerState funded() {
  LedgerState s(Date{0});
  s.open_account(kBuyer, Money{100'000});
  s.open_account(kSeller, Money{100'000});
  s.endow_bonds(kSeller, kMat, 100);
  s.endow_bonds(kSeller, Date{7}, 100);
  return s;
}

OrderRequest buy(AccountId who, std::int64_t qty, std::int64_t px, Date m = kMat) {
  return OrderRequest{who, Side::kBuy, m, qty, nanos(px), false, Date{0}};
}

OrderRequest sell(AccountId who, std::int64_t qty, std::int64_t px, Date m = kMat) {
  return OrderRequest{who, Side::kSell, m, qty, nanos(px), false, Date{0}};
}

Order make_order(std::uint64_t seq, AccountId owner, Side side, std::int64_t qty, std::int64_t px,
                 bool unbounded = false) {
  return Order{OrderId{seq}, owner, side, kMat, qty, nanos(px), unbounded, seq, Date{0}};
}

}  // namespace

TEST(Submit, SellEscrowsBonds) {
  LedgerState s = funded();
  OrderBook book;
  const OrderId id = book.submit(s, sell(kSeller, 10, 990'000'000));
  EXPECT_TRUE(book.contains(id));
  EXPECT_EQ(s.free_holding(kSeller, kMat), 90);
}

TEST(Submit, BuyEscrowsCeilCentsPerBond) {
  LedgerState s = funded();
  OrderBook book;
  book.submit(s, buy(kBuyer, 10, 990'000'001));
  EXPECT_EQ(s.account(kBuyer).reserved.cents, 10 * 100);
  book.submit(s, buy(kBuyer, 10, 990'000'000));
  EXPECT_EQ(s.account(kBuyer).reserved.cents, 10 * 100 + 10 * 99);
}

TEST(Submit, Rejections) {
  LedgerState s = funded();
  OrderBook book;
  const LedgerState before = s;
  EXPECT_THROW(book.submit(s, buy(kBuyer, 1'001, 1'000'000'000)), Error);
  EXPECT_THROW(book.submit(s, sell(kSeller, 101, 990'000'000)), Error);
  EXPECT_THROW(book.submit(s, sell(kBuyer, 1, 990'000'000)), Error);
  EXPECT_THROW(book.submit(s, buy(kBuyer, 0, 990'000'000)), Error);
  OrderRequest unb = buy(kBuyer, 1, 990'000'000);
  unb.unbounded = true;
  try {
    book.submit(s, unb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAuthorized);
  }
  try {
    book.submit(s, buy(kBuyer, 1, 990'000'000, Date{0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExpiredMaturity);
  }
  EXPECT_EQ(s, before);
  EXPECT_EQ(book.size(), 0u);
}

TEST(Cancel, ReturnsEscrowOnceOnly) {
  LedgerState s = funded();
  const LedgerState before = s;
  OrderBook book;
  const OrderId id = book.submit(s, buy(kBuyer, 5, 990'000'000));
  book.cancel(s, id);
  EXPECT_EQ(s, before);
  try {
    book.cancel(s, id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownOrder);
  }
}

TEST(Cancel, AfterFullFillIsUnknown) {
  LedgerState s = funded();
  Market m;
  const OrderId b = m.book().submit(s, buy(kBuyer, 10, 999'000'000));
  m.book().submit(s, sell(kSeller, 10, 998'000'000));
  m.run_auction(s, kMat);
  EXPECT_THROW(m.book().cancel(s, b), Error);
}

TEST(Expire, RemovesStaleAndMaturingOrders) {
  LedgerState s = funded();
  OrderBook book;
  OrderRequest stale = buy(kBuyer, 1, 990'000'000);
  stale.expiry = Date{0};
  OrderRequest live = buy(kBuyer, 1, 990'000'000);
  live.expiry = Date{5};
  OrderRequest maturing = sell(kSeller, 1, 990'000'000, Date{7});
  maturing.expiry = Date{10};
  const OrderId a = book.submit(s, stale);
  const OrderId b = book.submit(s, live);
  const OrderId c = book.submit(s, maturing);
  s.advance_to(Date{1});
  EXPECT_EQ(book.expire(s, Date{1}), 1u);
  EXPECT_FALSE(book.contains(a));
  EXPECT_TRUE(book.contains(b));
  s.advance_to(Date{7});
  book.expire(s, Date{7});
  EXPECT_FALSE(book.contains(c));
  EXPECT_TRUE(book.contains(b) == false);  // expiry 5 < 7
  EXPECT_EQ(s.account(kBuyer).reserved.cents, 0);
}

TEST(Auction, MidpointOfCrossedInterval) {
  LedgerState s = funded();
  Market m;
  m.book().submit(s, buy(kBuyer, 10, 999'000'000));
  m.book().submit(s, sell(kSeller, 10, 998'000'000));
  const AuctionResult r = m.run_auction(s, kMat);
  ASSERT_TRUE(r.clearing_price.has_value());
  EXPECT_EQ(r.clearing_price->nanos(), 998'500'000);
  EXPECT_EQ(r.executed_volume, 10);
  EXPECT_EQ(s.holding(kBuyer, kMat), 10);
  EXPECT_EQ(s.balance(kBuyer).cents, 100'000 - 999);  // 998.5 rounds up
  EXPECT_EQ(s.account(kBuyer).reserved.cents, 0);
  EXPECT_EQ(m.last_price(kMat), r.clearing_price);
}

TEST(Auction, NoCross) {
  LedgerState s = funded();
  Market m;
  m.book().submit(s, buy(kBuyer, 10, 997'000'000));
  m.book().submit(s, sell(kSeller, 10, 998'000'000));
  const AuctionResult r = m.run_auction(s, kMat);
  EXPECT_FALSE(r.clearing_price.has_value());
  EXPECT_TRUE(r.trades.empty());
  EXPECT_FALSE(m.last_price(kMat).has_value());
  EXPECT_EQ(m.book().size(), 2u);
}

TEST(Auction, UnboundedBuyAbsorbsSellsAtItsLimit) {
  const BandPrices band = band_prices(BandConfig{});
  LedgerState s = funded();
  Market m;
  m.book().submit(s, OrderRequest{kAuthority, Side::kBuy, Date{7}, 0, band.minus, true, Date{0}});
  m.book().submit(s, sell(kSeller, 4, 990'000'000, Date{7}));
  m.book().submit(s, sell(kSeller, 3, band.minus.nanos(), Date{7}));
  const AuctionResult r = m.run_auction(s, Date{7});
  ASSERT_TRUE(r.clearing_price.has_value());
  EXPECT_EQ(*r.clearing_price, band.minus);
  EXPECT_EQ(r.executed_volume, 7);
  EXPECT_EQ(s.holding(kAuthority, Date{7}), 7);
}

TEST(Auction, LastPriceTracksLatestClearing) {
  LedgerState s = funded();
  Market m;
  EXPECT_FALSE(m.last_price(kMat).has_value());
  m.book().submit(s, buy(kBuyer, 1, 999'000'000));
  m.book().submit(s, sell(kSeller, 1, 999'000'000));
  m.run_auction(s, kMat);
  EXPECT_EQ(m.last_price(kMat)->nanos(), 999'000'000);
  m.book().submit(s, buy(kBuyer, 1, 995'000'000));
  m.book().submit(s, sell(kSeller, 1, 995'000'000));
  m.run_auction(s, kMat);
  EXPECT_EQ(m.last_price(kMat)->nanos(), 995'000'000);
}

TEST(Auction, PartialFillKeepsRemainderResting) {
  LedgerState s = funded();
  Market m;
  const OrderId b = m.book().submit(s, buy(kBuyer, 10, 999'000'000));
  m.book().submit(s, sell(kSeller, 4, 998'000'000));
  m.run_auction(s, kMat);
  ASSERT_TRUE(m.book().contains(b));
  EXPECT_EQ(m.book().find(b)->qty, 6);
  EXPECT_EQ(s.account(kBuyer).reserved.cents, 6 * 100);
}

TEST(Auction, ZeroWidthBandSelfCrossNetsOut) {
  BandConfig cfg;
  cfg.half_width = Rate{0.0};
  const BandPrices band = band_prices(cfg);
  const std::vector<Order> orders{
      make_order(1, kAuthority, Side::kBuy, 0, band.minus.nanos(), true),
      make_order(2, kAuthority, Side::kSell, 0, band.plus.nanos(), true),
  };
  const AuctionResult r = clear_call_auction(orders, kMat, Date{0});
  for (const Trade& t : r.trades) {
    EXPECT_NE(t.buyer, t.seller);
  }
  EXPECT_EQ(r.executed_volume, 0);
  if (r.clearing_price) EXPECT_EQ(*r.clearing_price, band.minus);
}

TEST(Auction, IndependentOfContainerOrder) {
  std::vector<Order> orders{
      make_order(1, kBuyer, Side::kBuy, 5, 999'000'000),
      make_order(2, AccountId{3}, Side::kBuy, 5, 999'000'000),
      make_order(3, kSeller, Side::kSell, 7, 997'000'000),
  };
  const AuctionResult a = clear_call_auction(orders, kMat, Date{0});
  std::reverse(orders.begin(), orders.end());
  const AuctionResult b = clear_call_auction(orders, kMat, Date{0});
  EXPECT_EQ(a, b);
  // Earlier arrival fills first at the same price.
  std::int64_t first = 0;
  for (const Trade& t : a.trades) {
    if (t.buyer == kBuyer) first += t.qty;
  }
  EXPECT_EQ(first, 5);
}

TEST(AuctionProperty, MatchesBruteForceOnSmallBooks) {
  std::mt19937_64 rng(99);
  constexpr std::int64_t kMax = 40;
  for (int iter = 0; iter < 3000; ++iter) {
    const gen::RandomBook book = gen::random_book(rng, kMat, kMax, iter % 3 == 0);
    const AuctionResult got = clear_call_auction(book.orders, kMat, Date{0});
    const oracle::AuctionOutcome want = oracle::brute_force_auction(book.mirror, kMax);
    ASSERT_EQ(got.clearing_price.has_value(), want.price.has_value()) << "iter " << iter;
    if (!want.price) continue;
    ASSERT_EQ(got.clearing_price->nanos(), *want.price) << "iter " << iter;
    ASSERT_EQ(got.executed_volume, want.volume) << "iter " << iter;
    auto got_fills = oracle::fills_of(got);
    auto want_fills = want.fills;
    oracle::drop_zero(got_fills);
    oracle::drop_zero(want_fills);
    ASSERT_EQ(got_fills, want_fills) << "iter " << iter;
    for (const Trade& t : got.trades) ASSERT_EQ(t.unit_price, *got.clearing_price);
  }
}

TEST(AuctionProperty, BandTheoremLocalForm) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> px(900'000'000, 1'000'000'000);
  std::uniform_int_distribution<std::int64_t> qty(1, 50);
  std::uniform_int_distribution<std::uint32_t> owner(1, 9);
  std::bernoulli_distribution coin(0.5);
  const BandPrices band = band_prices(BandConfig{});
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<Order> orders{
        make_order(1, kAuthority, Side::kBuy, 0, band.minus.nanos(), true),
        make_order(2, kAuthority, Side::kSell, 0, band.plus.nanos(), true),
    };
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      orders.push_back(make_order(3 + i, AccountId{owner(rng)}, coin(rng) ? Side::kBuy : Side::kSell,
                                  qty(rng), px(rng)));
    }
    const AuctionResult r = clear_call_auction(orders, kMat, Date{0});
    if (!r.clearing_price) continue;
    ASSERT_GE(*r.clearing_price, band.minus);
    ASSERT_LE(*r.clearing_price, band.plus);
  }
}

TEST(MarketProperty, EscrowStaysConsistent) {
  std::mt19937_64 rng(11);
  LedgerState s(Date{0});
  for (std::uint32_t i = 1; i <= 6; ++i) {
    s.open_account(AccountId{i}, Money{20'000});
    s.endow_bonds(AccountId{i}, kMat, 50);
  }
  Market m;
  std::uniform_int_distribution<std::int64_t> px(980'000'000, 1'000'000'000);
  std::uniform_int_distribution<std::int64_t> qty(1, 30);
  std::uniform_int_distribution<std::uint32_t> owner(1, 6);
  std::bernoulli_distribution coin(0.5);
  const Money supply = s.money_supply();
  for (int round = 0; round < 200; ++round) {
    for (int i = 0; i < 10; ++i) {
      OrderRequest r{AccountId{owner(rng)}, coin(rng) ? Side::kBuy : Side::kSell, kMat, qty(rng),
                     nanos(px(rng)), false, Date{1'000}};
      try {
        m.book().submit(s, r);
      } catch (const Error&) {
      }
    }
    m.run_auction(s, kMat);
    std::map<AccountId, Money> cash;
    std::map<AccountId, std::int64_t> bonds;
    for (const Order& o : m.book().all_orders()) {
      if (o.side == Side::kBuy) cash[o.owner] += Money{o.qty * escrow_per_bond(o.limit).cents};
      else bonds[o.owner] += o.qty;
    }
    for (const auto& [id, acct] : s.accounts()) {
      ASSERT_EQ(acct.reserved, cash[id]);
      ASSERT_GE(acct.free_cash().cents, 0);
      const auto it = acct.bonds.find(kMat);
      ASSERT_EQ(it == acct.bonds.end() ? 0 : it->second.reserved, bonds[id]);
    }
  }
  EXPECT_EQ(s.money_supply(), supply);
  s.audit();
}

#pragma once

// Per-maturity order books with escrow and a daily uniform-price call
// auction. Market fills are the only way bonds change hands.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "elastic/ledger.hpp"

namespace elastic {

enum class Side { kBuy, kSell };

struct OrderId {
  std::uint64_t value = 0;
  constexpr auto operator<=>(const OrderId&) const = default;
};

/// What a participant asks the market to accept. The book assigns the id
/// and arrival sequence.
struct OrderRequest {
  AccountId owner;
  Side side = Side::kBuy;
  Date maturity;
  std::int64_t qty = 0;
  Price limit = Price::par();
  bool unbounded = false;  // authority only: infinite quantity at `limit`
  Date expiry;             // last day the order may trade

  bool operator==(const OrderRequest&) const = default;
};

struct Order {
  OrderId id;
  AccountId owner;
  Side side = Side::kBuy;
  Date maturity;
  std::int64_t qty = 0;  // remaining; ignored when unbounded
  Price limit = Price::par();
  bool unbounded = false;
  std::uint64_t submitted_seq = 0;
  Date expiry;

  bool operator==(const Order&) const = default;
};

struct Trade {
  Date maturity;
  std::int64_t qty = 0;
  Price unit_price = Price::par();
  AccountId buyer;
  AccountId seller;
  Date date;
  OrderId buy_order;
  OrderId sell_order;

  bool operator==(const Trade&) const = default;
};

struct AuctionResult {
  Date maturity;
  std::optional<Price> clearing_price;
  std::vector<Trade> trades;
  std::int64_t executed_volume = 0;

  bool operator==(const AuctionResult&) const = default;
};

/// Live orders for every maturity, with escrow held in the ledger.
class OrderBook {
 public:
  /// Validates and escrows (cash for buys at escrow_per_bond(limit), bonds
  /// for sells). Throws on expired maturity, unauthorized unbounded flag,
  /// bad quantity or insufficient escrow; the ledger is untouched on throw.
  OrderId submit(LedgerState& ledger, const OrderRequest& request);

  /// Removes a live order and releases its escrow. Throws kUnknownOrder.
  void cancel(LedgerState& ledger, OrderId id);

  /// Drops orders whose expiry is before `today` or whose bond matures on or
  /// before `today`. Returns the number removed.
  std::size_t expire(LedgerState& ledger, Date today);

  /// Executes `qty` of a resting order: releases that part of its escrow and
  /// removes the order once fully filled. Unbounded orders never deplete.
  void consume(LedgerState& ledger, OrderId id, std::int64_t qty);

  const Order* find(OrderId id) const;
  bool contains(OrderId id) const { return orders_.contains(id); }
  std::size_t size() const { return orders_.size(); }

  std::vector<Order> orders_for(Date maturity) const;
  std::vector<Date> maturities() const;
  std::vector<Order> all_orders() const;

 private:
  void release_escrow(LedgerState& ledger, const Order& order, std::int64_t qty) const;
  void erase(std::map<OrderId, Order>::iterator it);

  std::map<OrderId, Order> orders_;
  std::map<Date, std::set<OrderId>> by_maturity_;
  std::uint64_t next_id_ = 1;
};

/// Quantity with an infinite value for unbounded authority orders.
inline constexpr std::int64_t kUnboundedQty = std::numeric_limits<std::int64_t>::max() / 4;

/// Uniform-price call auction over a frozen snapshot of one maturity's book.
///
/// The clearing price maximizes executable volume; among those prices it
/// minimizes |demand - supply|. If the remaining candidates all show buy
/// surplus the highest is taken, all sell surplus the lowest, otherwise the
/// midpoint of the candidate interval rounded half-up. Fills go by price,
/// then submitted_seq; unbounded orders absorb any residual at their turn.
/// When unbounded buy and sell orders both cross, the authority's self-cross
/// is netted out: every bounded crossing order fills in full, bounded orders
/// match each other in priority order, and only the imbalance trades with
/// the authority.
AuctionResult clear_call_auction(std::span<const Order> orders, Date maturity, Date today);

/// Books plus last clearing prices.
class Market {
 public:
  OrderBook& book() { return book_; }
  const OrderBook& book() const { return book_; }

  /// Clears one maturity against the current book and settles every trade
  /// through the ledger.
  AuctionResult run_auction(LedgerState& ledger, Date maturity);

  /// Clears every maturity that has orders, in maturity order.
  std::vector<AuctionResult> run_all_auctions(LedgerState& ledger);

  std::optional<Price> last_price(Date maturity) const;
  const std::map<Date, Price>& last_prices() const { return last_prices_; }
  void record_price(Date maturity, Price price) { last_prices_.insert_or_assign(maturity, price); }

  /// Forgets prices of matured bonds.
  void forget_matured(Date today);

 private:
  OrderBook book_;
  std::map<Date, Price> last_prices_;
};

/// Applies auction trades: releases the filled escrow of each side and moves
/// bonds and cash at the trade price.
void settle(LedgerState& ledger, OrderBook& book, const AuctionResult& result);

}  // namespace elastic

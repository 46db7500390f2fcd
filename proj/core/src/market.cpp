#include "elastic/market.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <string>

namespace elastic {
namespace {

constexpr std::int64_t kMaxOrderQty = 1'000'000'000'000;

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  return std::min(a + b, kUnboundedQty);
}

std::int64_t remaining(const Order& o) { return o.unbounded ? kUnboundedQty : o.qty; }

// Signed demand-minus-supply with infinities from unbounded orders.
struct Imbalance {
  int sign = 0;  // +1 buy surplus, -1 sell surplus, 0 balanced
  bool infinite = false;
  std::int64_t magnitude = 0;

  bool less_than(const Imbalance& o) const {
    if (infinite != o.infinite) return !infinite;
    return !infinite && magnitude < o.magnitude;
  }
  bool same_size(const Imbalance& o) const {
    return infinite == o.infinite && (infinite || magnitude == o.magnitude);
  }
};

Imbalance imbalance_of(std::int64_t demand, std::int64_t supply) {
  const bool d_inf = demand >= kUnboundedQty;
  const bool s_inf = supply >= kUnboundedQty;
  if (d_inf && s_inf) return {0, false, 0};
  if (d_inf) return {+1, true, 0};
  if (s_inf) return {-1, true, 0};
  const std::int64_t diff = demand - supply;
  return {diff > 0 ? 1 : (diff < 0 ? -1 : 0), false, diff < 0 ? -diff : diff};
}

// A run of nano prices over which demand and supply are constant.
struct Segment {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t volume = 0;
  Imbalance imbalance;
};

}  // namespace

OrderId OrderBook::submit(LedgerState& ledger, const OrderRequest& request) {
  const Date today = ledger.current_date();
  if (request.maturity <= today) {
    throw Error(ErrorCode::kExpiredMaturity, "order on matured bond (day " +
                                                 std::to_string(request.maturity.day_index) + ")");
  }
  if (request.unbounded && request.owner != kAuthority) {
    throw Error(ErrorCode::kNotAuthorized, "only the authority may post unbounded orders");
  }
  if (!request.unbounded && (request.qty <= 0 || request.qty > kMaxOrderQty)) {
    throw Error(ErrorCode::kInvalidArgument, "order quantity out of range");
  }
  if (request.expiry < today) {
    throw Error(ErrorCode::kInvalidArgument, "order already expired");
  }
  if (!ledger.has_account(request.owner)) {
    throw Error(ErrorCode::kUnknownAccount,
                "unknown account " + std::to_string(request.owner.value));
  }

  if (!request.unbounded) {
    if (request.side == Side::kBuy) {
      ledger.reserve_cash(request.owner,
                          Money{request.qty * escrow_per_bond(request.limit).cents});
    } else {
      ledger.reserve_bonds(request.owner, request.maturity, request.qty);
    }
  }

  const OrderId id{next_id_++};
  Order order{id,
              request.owner,
              request.side,
              request.maturity,
              request.unbounded ? 0 : request.qty,
              request.limit,
              request.unbounded,
              id.value,
              request.expiry};
  orders_.emplace(id, order);
  by_maturity_[request.maturity].insert(id);
  return id;
}

void OrderBook::release_escrow(LedgerState& ledger, const Order& order, std::int64_t qty) const {
  if (order.unbounded || qty == 0) return;
  if (order.side == Side::kBuy) {
    ledger.release_cash(order.owner, Money{qty * escrow_per_bond(order.limit).cents});
  } else {
    ledger.release_bonds(order.owner, order.maturity, qty);
  }
}

void OrderBook::erase(std::map<OrderId, Order>::iterator it) {
  auto bucket = by_maturity_.find(it->second.maturity);
  bucket->second.erase(it->first);
  if (bucket->second.empty()) by_maturity_.erase(bucket);
  orders_.erase(it);
}

void OrderBook::cancel(LedgerState& ledger, OrderId id) {
  auto it = orders_.find(id);
  if (it == orders_.end()) {
    throw Error(ErrorCode::kUnknownOrder, "no live order " + std::to_string(id.value));
  }
  release_escrow(ledger, it->second, it->second.qty);
  erase(it);
}

std::size_t OrderBook::expire(LedgerState& ledger, Date today) {
  std::size_t removed = 0;
  for (auto it = orders_.begin(); it != orders_.end();) {
    const Order& o = it->second;
    if (o.expiry < today || o.maturity <= today) {
      release_escrow(ledger, o, o.qty);
      auto next = std::next(it);
      erase(it);
      it = next;
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

void OrderBook::consume(LedgerState& ledger, OrderId id, std::int64_t qty) {
  auto it = orders_.find(id);
  if (it == orders_.end()) {
    throw Error(ErrorCode::kUnknownOrder, "no live order " + std::to_string(id.value));
  }
  Order& o = it->second;
  if (o.unbounded) return;
  if (qty <= 0 || qty > o.qty) {
    throw Error(ErrorCode::kInvalidArgument, "fill exceeds remaining quantity");
  }
  release_escrow(ledger, o, qty);
  o.qty -= qty;
  if (o.qty == 0) erase(it);
}

const Order* OrderBook::find(OrderId id) const {
  auto it = orders_.find(id);
  return it == orders_.end() ? nullptr : &it->second;
}

std::vector<Order> OrderBook::orders_for(Date maturity) const {
  std::vector<Order> out;
  auto bucket = by_maturity_.find(maturity);
  if (bucket == by_maturity_.end()) return out;
  out.reserve(bucket->second.size());
  for (OrderId id : bucket->second) out.push_back(orders_.at(id));
  return out;
}

std::vector<Date> OrderBook::maturities() const {
  std::vector<Date> out;
  out.reserve(by_maturity_.size());
  for (const auto& [m, ids] : by_maturity_) out.push_back(m);
  return out;
}

std::vector<Order> OrderBook::all_orders() const {
  std::vector<Order> out;
  out.reserve(orders_.size());
  for (const auto& [id, o] : orders_) out.push_back(o);
  return out;
}

AuctionResult clear_call_auction(std::span<const Order> orders, Date maturity, Date today) {
  AuctionResult result{maturity, std::nullopt, {}, 0};

  std::vector<const Order*> buys;
  std::vector<const Order*> sells;
  for (const Order& o : orders) {
    if (o.maturity != maturity || (!o.unbounded && o.qty <= 0)) continue;
    (o.side == Side::kBuy ? buys : sells).push_back(&o);
  }
  if (buys.empty() || sells.empty()) return result;

  std::vector<std::int64_t> limits;
  limits.reserve(buys.size() + sells.size());
  for (const Order* o : buys) limits.push_back(o->limit.nanos());
  for (const Order* o : sells) limits.push_back(o->limit.nanos());
  std::sort(limits.begin(), limits.end());
  limits.erase(std::unique(limits.begin(), limits.end()), limits.end());

  // Cumulative quantities over limits: demand at p sums buys limited at or
  // above p, supply sums sells limited at or below p.
  std::vector<std::pair<std::int64_t, std::int64_t>> bid_curve;  // (limit, qty), descending
  std::vector<std::pair<std::int64_t, std::int64_t>> ask_curve;  // ascending
  for (const Order* o : buys) bid_curve.emplace_back(o->limit.nanos(), remaining(*o));
  for (const Order* o : sells) ask_curve.emplace_back(o->limit.nanos(), remaining(*o));
  std::sort(bid_curve.begin(), bid_curve.end(), std::greater<>{});
  std::sort(ask_curve.begin(), ask_curve.end());
  for (std::size_t k = 1; k < bid_curve.size(); ++k)
    bid_curve[k].second = saturating_add(bid_curve[k].second, bid_curve[k - 1].second);
  for (std::size_t k = 1; k < ask_curve.size(); ++k)
    ask_curve[k].second = saturating_add(ask_curve[k].second, ask_curve[k - 1].second);

  auto demand_at = [&](std::int64_t p) {
    // Last entry with limit >= p.
    const auto it = std::partition_point(bid_curve.begin(), bid_curve.end(),
                                         [p](const auto& e) { return e.first >= p; });
    return it == bid_curve.begin() ? std::int64_t{0} : std::prev(it)->second;
  };
  auto supply_at = [&](std::int64_t p) {
    const auto it = std::partition_point(ask_curve.begin(), ask_curve.end(),
                                         [p](const auto& e) { return e.first <= p; });
    return it == ask_curve.begin() ? std::int64_t{0} : std::prev(it)->second;
  };

  std::vector<Segment> segments;
  segments.reserve(2 * limits.size());
  for (std::size_t i = 0; i < limits.size(); ++i) {
    const std::int64_t p = limits[i];
    const std::int64_t d = demand_at(p);
    const std::int64_t s = supply_at(p);
    segments.push_back({p, p, std::min(d, s), imbalance_of(d, s)});
    if (i + 1 < limits.size() && limits[i + 1] - p >= 2) {
      // Strictly between two limits: demand as at the upper one, supply as at the lower one.
      const std::int64_t gd = demand_at(limits[i + 1]);
      segments.push_back({p + 1, limits[i + 1] - 1, std::min(gd, s), imbalance_of(gd, s)});
    }
  }

  std::int64_t best_volume = 0;
  for (const Segment& seg : segments) best_volume = std::max(best_volume, seg.volume);
  if (best_volume == 0) return result;

  const Segment* best = nullptr;
  for (const Segment& seg : segments) {
    if (seg.volume != best_volume) continue;
    if (best == nullptr || seg.imbalance.less_than(best->imbalance)) best = &seg;
  }
  std::int64_t lo = kNanosPerDollar;
  std::int64_t hi = 0;
  bool all_buy_surplus = true;
  bool all_sell_surplus = true;
  for (const Segment& seg : segments) {
    if (seg.volume != best_volume || !seg.imbalance.same_size(best->imbalance)) continue;
    lo = std::min(lo, seg.lo);
    hi = std::max(hi, seg.hi);
    all_buy_surplus = all_buy_surplus && seg.imbalance.sign > 0;
    all_sell_surplus = all_sell_surplus && seg.imbalance.sign < 0;
  }
  std::int64_t clearing = 0;
  if (all_buy_surplus) {
    clearing = hi;
  } else if (all_sell_surplus) {
    clearing = lo;
  } else {
    clearing = (lo + hi + 1) / 2;
  }
  const Price price = Price::from_nanos(clearing);
  result.clearing_price = price;

  // Allocation in price then arrival priority.
  std::vector<const Order*> bids;
  std::vector<const Order*> asks;
  for (const Order* o : buys)
    if (o->limit.nanos() >= clearing) bids.push_back(o);
  for (const Order* o : sells)
    if (o->limit.nanos() <= clearing) asks.push_back(o);
  auto priority = [](bool descending) {
    return [descending](const Order* a, const Order* b) {
      if (a->limit != b->limit) return descending ? a->limit > b->limit : a->limit < b->limit;
      if (a->submitted_seq != b->submitted_seq) return a->submitted_seq < b->submitted_seq;
      return a->id < b->id;
    };
  };
  std::sort(bids.begin(), bids.end(), priority(true));
  std::sort(asks.begin(), asks.end(), priority(false));

  auto emit = [&](const Order* bid, const Order* ask, std::int64_t qty) {
    result.trades.push_back(
        Trade{maturity, qty, price, bid->owner, ask->owner, today, bid->id, ask->id});
    result.executed_volume += qty;
  };

  auto is_unbounded = [](const Order* o) { return o->unbounded; };
  const auto unbounded_bid = std::find_if(bids.begin(), bids.end(), is_unbounded);
  const auto unbounded_ask = std::find_if(asks.begin(), asks.end(), is_unbounded);
  if (unbounded_bid != bids.end() && unbounded_ask != asks.end()) {
    // The authority crosses itself. That part nets to zero, so bounded orders
    // match each other in priority order and only the imbalance trades with
    // the authority.
    const Order* authority_bid = *unbounded_bid;
    const Order* authority_ask = *unbounded_ask;
    std::erase_if(bids, is_unbounded);
    std::erase_if(asks, is_unbounded);
    std::size_t i = 0;
    std::size_t j = 0;
    std::int64_t bid_left = bids.empty() ? 0 : bids[0]->qty;
    std::int64_t ask_left = asks.empty() ? 0 : asks[0]->qty;
    while (i < bids.size() && j < asks.size()) {
      const std::int64_t q = std::min(bid_left, ask_left);
      emit(bids[i], asks[j], q);
      bid_left -= q;
      ask_left -= q;
      if (bid_left == 0 && ++i < bids.size()) bid_left = bids[i]->qty;
      if (ask_left == 0 && ++j < asks.size()) ask_left = asks[j]->qty;
    }
    for (; i < bids.size(); ++i) {
      emit(bids[i], authority_ask, bid_left);
      if (i + 1 < bids.size()) bid_left = bids[i + 1]->qty;
    }
    for (; j < asks.size(); ++j) {
      emit(authority_bid, asks[j], ask_left);
      if (j + 1 < asks.size()) ask_left = asks[j + 1]->qty;
    }
    return result;
  }

  std::int64_t left = best_volume;
  std::size_t i = 0;
  std::size_t j = 0;
  std::int64_t bid_left = remaining(*bids[0]);
  std::int64_t ask_left = remaining(*asks[0]);
  while (i < bids.size() && j < asks.size() && left > 0) {
    const std::int64_t q = std::min({bid_left, ask_left, left});
    emit(bids[i], asks[j], q);
    if (left < kUnboundedQty) left -= q;
    if (!bids[i]->unbounded) bid_left -= q;
    if (!asks[j]->unbounded) ask_left -= q;
    if (bid_left == 0 && ++i < bids.size()) bid_left = remaining(*bids[i]);
    if (ask_left == 0 && ++j < asks.size()) ask_left = remaining(*asks[j]);
  }
  return result;
}

void settle(LedgerState& ledger, OrderBook& book, const AuctionResult& result) {
  for (const Trade& t : result.trades) {
    book.consume(ledger, t.buy_order, t.qty);
    book.consume(ledger, t.sell_order, t.qty);
    ledger.apply_trade(t.buyer, t.seller, t.maturity, t.qty, t.unit_price);
  }
}

AuctionResult Market::run_auction(LedgerState& ledger, Date maturity) {
  const std::vector<Order> snapshot = book_.orders_for(maturity);
  AuctionResult result = clear_call_auction(snapshot, maturity, ledger.current_date());
  settle(ledger, book_, result);
  if (result.clearing_price && result.executed_volume > 0) {
    last_prices_.insert_or_assign(maturity, *result.clearing_price);
  }
  return result;
}

std::vector<AuctionResult> Market::run_all_auctions(LedgerState& ledger) {
  std::vector<AuctionResult> out;
  for (Date m : book_.maturities()) {
    out.push_back(run_auction(ledger, m));
  }
  return out;
}

std::optional<Price> Market::last_price(Date maturity) const {
  auto it = last_prices_.find(maturity);
  if (it == last_prices_.end()) return std::nullopt;
  return it->second;
}

void Market::forget_matured(Date today) {
  last_prices_.erase(last_prices_.begin(), last_prices_.upper_bound(today));
}

}  // namespace elastic

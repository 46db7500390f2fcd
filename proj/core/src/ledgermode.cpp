#include "elastic/ledgermode.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace elastic {
namespace {

bool crosses(const Order& resting, const OrderRequest& incoming) {
  if (resting.side == incoming.side) return false;
  return incoming.side == Side::kBuy ? incoming.limit >= resting.limit
                                     : incoming.limit <= resting.limit;
}

// Best resting order on the opposite side that crosses the incoming one.
std::optional<Order> best_opposite(const OrderBook& book, const OrderRequest& incoming,
                                   OrderId self) {
  std::optional<Order> best;
  for (const Order& o : book.orders_for(incoming.maturity)) {
    if (o.id == self || !crosses(o, incoming)) continue;
    if (o.unbounded && incoming.unbounded) continue;  // the authority never trades with itself
    if (!best) {
      best = o;
      continue;
    }
    const bool better = incoming.side == Side::kBuy ? o.limit < best->limit
                                                    : o.limit > best->limit;
    if (better || (o.limit == best->limit && o.submitted_seq < best->submitted_seq)) best = o;
  }
  return best;
}

struct Execution {
  LedgerState ledger;
  OrderBook book;
  std::vector<OrderRequest> included;
  std::vector<std::uint64_t> seqs;
  std::vector<std::vector<Match>> matches;  // per included order
  std::int64_t dropped = 0;
};

// Feeds orders through copies of the ledger and book. With `lenient`, orders
// that fail escrow are skipped and counted (submit leaves state untouched on
// failure); otherwise the failure propagates.
Execution execute(const LedgerState& ledger, const OrderBook& book,
                  const std::vector<PendingOrder>& orders, AccountId miner, bool lenient) {
  Execution ex{ledger, book, {}, {}, {}, 0};
  for (const PendingOrder& p : orders) {
    OrderId id;
    try {
      id = ex.book.submit(ex.ledger, p.request);
    } catch (const Error&) {
      if (!lenient) throw;
      ++ex.dropped;
      continue;
    }
    ex.matches.push_back(match_incoming(ex.ledger, ex.book, id, miner));
    ex.included.push_back(p.request);
    ex.seqs.push_back(p.seq);
  }
  return ex;
}

// Miner orders around each brokered fill: before the arrival, take out every
// resting order it would hit at that order's own price; after it rests,
// fill it at its own price.
std::vector<PendingOrder> self_insert_sequence(const Execution& honest, AccountId miner,
                                               Date today) {
  std::vector<PendingOrder> out;
  for (std::size_t i = 0; i < honest.included.size(); ++i) {
    const OrderRequest& x = honest.included[i];
    std::int64_t total = 0;
    for (const Match& m : honest.matches[i]) {
      const bool x_buys = x.side == Side::kBuy;
      if ((x_buys ? m.seller : m.buyer) == miner || x.owner == miner) continue;
      const Side side = x_buys ? Side::kBuy : Side::kSell;
      out.push_back({0, OrderRequest{miner, side, x.maturity, m.qty, x_buys ? m.ask : m.bid,
                                     false, today}});
      total += m.qty;
    }
    out.push_back({honest.seqs[i], x});
    if (total > 0) {
      const Side side = x.side == Side::kBuy ? Side::kSell : Side::kBuy;
      out.push_back({0, OrderRequest{miner, side, x.maturity, total, x.limit, false, today}});
    }
  }
  return out;
}

Block make_block(const Execution& ex, AccountId miner, std::int64_t height,
                 std::int64_t dropped) {
  Block block;
  block.height = height;
  block.miner = miner;
  block.included = ex.included;
  for (std::uint64_t s : ex.seqs) {
    if (s != 0) block.from_mempool.push_back(s);
  }
  for (const auto& ms : ex.matches) {
    for (const Match& m : ms) {
      block.matches.push_back(m);
      block.fees += m.fee;
    }
  }
  block.dropped = dropped;
  return block;
}

}  // namespace

std::string_view to_string(MinerPolicyKind k) {
  switch (k) {
    case MinerPolicyKind::kHonest: return "honest";
    case MinerPolicyKind::kCensor: return "censor";
    case MinerPolicyKind::kSelfInsert: return "self_insert";
  }
  return "?";
}

void MinerPolicy::validate() const {
  if (kind != MinerPolicyKind::kCensor && !censored.empty()) {
    throw Error(ErrorCode::kValidation, "ledger.censor applies only to the censor policy");
  }
}

std::uint64_t Mempool::add(const OrderRequest& request) {
  const std::uint64_t seq = next_seq_++;
  pending_.push_back(PendingOrder{seq, request});
  return seq;
}

std::size_t Mempool::expire(Date today) {
  const auto before = pending_.size();
  std::erase_if(pending_, [&](const PendingOrder& p) {
    return p.request.expiry < today || p.request.maturity <= today;
  });
  return before - pending_.size();
}

void Mempool::remove(const std::vector<std::uint64_t>& seqs) {
  std::erase_if(pending_, [&](const PendingOrder& p) {
    return std::find(seqs.begin(), seqs.end(), p.seq) != seqs.end();
  });
}

std::vector<Match> match_incoming(LedgerState& ledger, OrderBook& book, OrderId id,
                                  AccountId miner) {
  const Order incoming = *book.find(id);
  const OrderRequest request{incoming.owner, incoming.side,  incoming.maturity, incoming.qty,
                             incoming.limit, incoming.unbounded, incoming.expiry};
  std::vector<Match> out;
  while (const Order* self = book.find(id)) {
    const std::optional<Order> other = best_opposite(book, request, id);
    if (!other) break;
    const std::int64_t left = self->unbounded ? kUnboundedQty : self->qty;
    const std::int64_t qty = std::min(left, other->unbounded ? kUnboundedQty : other->qty);
    const bool incoming_buys = request.side == Side::kBuy;
    Match m;
    m.buy = incoming_buys ? id : other->id;
    m.sell = incoming_buys ? other->id : id;
    m.buyer = incoming_buys ? request.owner : other->owner;
    m.seller = incoming_buys ? other->owner : request.owner;
    m.maturity = request.maturity;
    m.qty = qty;
    m.bid = incoming_buys ? request.limit : other->limit;
    m.ask = incoming_buys ? other->limit : request.limit;
    m.fee = cash_amount(qty, m.bid) - cash_amount(qty, m.ask);
    book.consume(ledger, m.buy, qty);
    book.consume(ledger, m.sell, qty);
    ledger.apply_trade(m.buyer, m.seller, m.maturity, qty, m.ask, miner, m.fee);
    out.push_back(m);
  }
  return out;
}

std::vector<Match> insert_and_match(LedgerState& ledger, OrderBook& book,
                                    const OrderRequest& request, AccountId miner) {
  return match_incoming(ledger, book, book.submit(ledger, request), miner);
}

Block build_block(const Mempool& mempool, const LedgerState& ledger, const OrderBook& book,
                  AccountId miner, const MinerPolicy& policy, std::size_t capacity,
                  std::int64_t height) {
  std::vector<PendingOrder> chosen;
  for (const PendingOrder& p : mempool.pending()) {
    if (chosen.size() >= capacity) break;
    if (policy.kind == MinerPolicyKind::kCensor && policy.censored.contains(p.request.owner)) {
      continue;
    }
    chosen.push_back(p);
  }
  const Execution honest = execute(ledger, book, chosen, miner, true);
  if (policy.kind != MinerPolicyKind::kSelfInsert) {
    return make_block(honest, miner, height, honest.dropped);
  }

  const std::vector<PendingOrder> inserted =
      self_insert_sequence(honest, miner, ledger.current_date());
  if (inserted.size() == honest.included.size() || inserted.size() > capacity) {
    return make_block(honest, miner, height, honest.dropped);
  }
  try {
    const Execution ex = execute(ledger, book, inserted, miner, false);
    return make_block(ex, miner, height, honest.dropped);
  } catch (const Error&) {
    return make_block(honest, miner, height, honest.dropped);
  }
}

Money apply_block(LedgerState& ledger, OrderBook& book, const Block& block) {
  LedgerState next_ledger = ledger;
  OrderBook next_book = book;
  std::vector<Match> matches;
  Money fees;
  try {
    for (const OrderRequest& r : block.included) {
      for (const Match& m : insert_and_match(next_ledger, next_book, r, block.miner)) {
        matches.push_back(m);
        fees += m.fee;
      }
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidBlock,
                "block " + std::to_string(block.height) + " rejected: " + e.what());
  }
  if (matches != block.matches || fees != block.fees) {
    throw Error(ErrorCode::kInvalidBlock,
                "block " + std::to_string(block.height) + " rejected: matches do not replay");
  }
  ledger = std::move(next_ledger);
  book = std::move(next_book);
  return fees;
}

std::vector<Trade> block_trades(const Block& block, Date today) {
  std::vector<Trade> out;
  out.reserve(block.matches.size());
  for (const Match& m : block.matches) {
    out.push_back(Trade{m.maturity, m.qty, m.ask, m.buyer, m.seller, today, m.buy, m.sell});
  }
  return out;
}

}  // namespace elastic

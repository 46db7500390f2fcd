#pragma once

// Block-batched execution. A miner picks orders from the mempool, feeds
// them one at a time into the book, and matches each arrival against the
// best resting opposite order. The buyer pays its own bid, the seller gets
// its own ask, and the miner keeps the difference as a fee.

#include <cstdint>
#include <set>
#include <string_view>
#include <vector>

#include "elastic/ledger.hpp"
#include "elastic/market.hpp"

namespace elastic {

enum class MinerPolicyKind { kHonest, kCensor, kSelfInsert };

std::string_view to_string(MinerPolicyKind k);

struct MinerPolicy {
  MinerPolicyKind kind = MinerPolicyKind::kHonest;
  std::set<AccountId> censored;  // kCensor only

  void validate() const;
  bool operator==(const MinerPolicy&) const = default;
};

struct PendingOrder {
  std::uint64_t seq = 0;  // arrival order
  OrderRequest request;
};

class Mempool {
 public:
  std::uint64_t add(const OrderRequest& request);
  /// Drops orders whose expiry has passed or whose bond has matured.
  std::size_t expire(Date today);
  /// Removes the orders with these arrival numbers.
  void remove(const std::vector<std::uint64_t>& seqs);

  const std::vector<PendingOrder>& pending() const { return pending_; }
  std::size_t size() const { return pending_.size(); }

 private:
  std::vector<PendingOrder> pending_;
  std::uint64_t next_seq_ = 1;
};

struct Match {
  OrderId buy;
  OrderId sell;
  AccountId buyer;
  AccountId seller;
  Date maturity;
  std::int64_t qty = 0;
  Price bid = Price::par();
  Price ask = Price::par();
  Money fee;  // cash_amount(qty, bid) - cash_amount(qty, ask)

  bool operator==(const Match&) const = default;
};

struct Block {
  std::int64_t height = 0;
  AccountId miner;
  std::vector<OrderRequest> included;          // in insertion order
  std::vector<std::uint64_t> from_mempool;     // arrival numbers consumed
  std::vector<Match> matches;
  Money fees;
  std::int64_t dropped = 0;                    // mempool orders that failed escrow

  bool operator==(const Block&) const = default;
};

/// Matches a just-submitted order against the best resting opposite orders
/// (price, then arrival) while they cross.
std::vector<Match> match_incoming(LedgerState& ledger, OrderBook& book, OrderId id,
                                  AccountId miner);

/// Inserts one order, then matches it against the best resting opposite
/// orders (price, then arrival) while they cross. Each fill settles at the
/// seller's ask with the spread paid to `miner`.
std::vector<Match> insert_and_match(LedgerState& ledger, OrderBook& book,
                                    const OrderRequest& request, AccountId miner);

/// Builds the next block. Honest: oldest first up to capacity. Censor: the
/// same but skipping censored owners. Self-insert: the miner places its own
/// orders on both sides of every fill it would have brokered, falling back to
/// honest when it cannot fund them or they do not fit. Orders that fail
/// escrow are left out and counted.
Block build_block(const Mempool& mempool, const LedgerState& ledger, const OrderBook& book,
                  AccountId miner, const MinerPolicy& policy, std::size_t capacity,
                  std::int64_t height);

/// Re-executes the block and checks that it reproduces the claimed matches.
/// Any escrow failure or mismatch throws kInvalidBlock and leaves ledger and
/// book untouched. Returns the fees paid to the miner.
Money apply_block(LedgerState& ledger, OrderBook& book, const Block& block);

/// Block matches as trades (priced at the ask leg) for reporting.
std::vector<Trade> block_trades(const Block& block, Date today);

}  // namespace elastic

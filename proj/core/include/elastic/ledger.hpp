#pragma once

// Money balances and cashbond holdings per account. Bonds only change hands
// through apply_trade (market fills) and leave the ledger through redemption;
// there is deliberately no transfer or pledge operation.

#include <cstdint>
#include <map>
#include <optional>

#include "elastic/types.hpp"

namespace elastic {

struct Position {
  std::int64_t count = 0;
  std::int64_t reserved = 0;  // escrowed by resting sell orders

  std::int64_t free() const { return count - reserved; }
  bool operator==(const Position&) const = default;
};

struct Account {
  Money balance;
  Money reserved;  // escrowed by resting buy orders
  std::map<Date, Position> bonds;

  Money free_cash() const { return balance - reserved; }
  bool operator==(const Account&) const = default;
};

struct Redemption {
  Money total;                        // cents paid to non-authority holders
  std::int64_t bonds_redeemed = 0;    // non-authority bonds paid at face
  std::int64_t authority_retired = 0; // authority-held bonds deleted without payment
};

class LedgerState {
 public:
  explicit LedgerState(Date start = Date{0});

  Date current_date() const { return today_; }

  /// Moves the clock forward. Dates must strictly increase.
  void advance_to(Date next);

  void open_account(AccountId id, Money initial_balance);
  bool has_account(AccountId id) const;

  /// Genesis endowment of bonds created by the authority before trading
  /// starts. Only valid while the ledger is still at its start date.
  void endow_bonds(AccountId holder, Date maturity, std::int64_t qty);

  const Account& account(AccountId id) const;
  const std::map<AccountId, Account>& accounts() const { return accounts_; }

  Money balance(AccountId id) const { return account(id).balance; }
  Money free_cash(AccountId id) const { return account(id).free_cash(); }
  std::int64_t holding(AccountId id, Date maturity) const;
  std::int64_t free_holding(AccountId id, Date maturity) const;

  /// Executes one fill. Bonds move seller -> buyer; cash_amount(qty, price)
  /// moves buyer -> seller; `fee` moves buyer -> fee_to. Funds and bonds are
  /// checked against free (unreserved) amounts; the authority is exempt and
  /// mints any bonds it sells beyond its inventory. Strong exception
  /// guarantee. Returns the cash leg.
  Money apply_trade(AccountId buyer, AccountId seller, Date maturity, std::int64_t qty,
                    Price unit_price, std::optional<AccountId> fee_to = std::nullopt,
                    Money fee = Money{});

  /// Pays face value for every bond maturing on or before today and deletes
  /// the positions. Run once at the start of each day.
  Redemption redeem_maturing();

  void reserve_cash(AccountId id, Money amount);
  void release_cash(AccountId id, Money amount);
  void reserve_bonds(AccountId id, Date maturity, std::int64_t qty);
  /// Tolerates positions already removed by redemption.
  void release_bonds(AccountId id, Date maturity, std::int64_t qty);

  /// Net money created by the authority since genesis.
  Money cumulative_issuance() const { return -accounts_.at(kAuthority).balance; }

  /// Sum of non-authority balances.
  Money money_supply() const;

  /// Non-authority bonds outstanding, optionally for one maturity.
  std::int64_t outstanding() const;
  std::int64_t outstanding(Date maturity) const;

  /// Checks every ledger invariant; throws kInvariantViolation naming the
  /// first one broken.
  void audit() const;

  bool operator==(const LedgerState&) const = default;

 private:
  Account& mutable_account(AccountId id);

  Date today_;
  Date genesis_;
  std::map<AccountId, Account> accounts_;
};

}  // namespace elastic

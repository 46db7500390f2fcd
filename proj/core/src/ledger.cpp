#include "elastic/ledger.hpp"

#include <string>

namespace elastic {
namespace {

std::string describe(AccountId id) { return "account " + std::to_string(id.value); }

[[noreturn]] void violated(const std::string& invariant, const std::string& detail) {
  throw Error(ErrorCode::kInvariantViolation, invariant + ": " + detail);
}

}  // namespace

LedgerState::LedgerState(Date start) : today_(start), genesis_(start) {
  accounts_.emplace(kAuthority, Account{});
}

void LedgerState::advance_to(Date next) {
  if (next <= today_) {
    throw Error(ErrorCode::kInvalidArgument, "ledger dates must strictly increase");
  }
  today_ = next;
}

void LedgerState::open_account(AccountId id, Money initial_balance) {
  if (id == kAuthority) {
    throw Error(ErrorCode::kInvalidArgument, "the authority account always exists");
  }
  if (initial_balance.cents < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative opening balance for " + describe(id));
  }
  if (!accounts_.emplace(id, Account{initial_balance, Money{}, {}}).second) {
    throw Error(ErrorCode::kInvalidArgument, describe(id) + " already open");
  }
}

bool LedgerState::has_account(AccountId id) const { return accounts_.contains(id); }

void LedgerState::endow_bonds(AccountId holder, Date maturity, std::int64_t qty) {
  if (today_ != genesis_) {
    throw Error(ErrorCode::kNotAuthorized, "bond endowment is only allowed at genesis");
  }
  if (qty <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "endowment quantity must be positive");
  }
  duration_of(maturity, today_);
  mutable_account(holder).bonds[maturity].count += qty;
}

const Account& LedgerState::account(AccountId id) const {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) {
    throw Error(ErrorCode::kUnknownAccount, describe(id) + " does not exist");
  }
  return it->second;
}

Account& LedgerState::mutable_account(AccountId id) {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) {
    throw Error(ErrorCode::kUnknownAccount, describe(id) + " does not exist");
  }
  return it->second;
}

std::int64_t LedgerState::holding(AccountId id, Date maturity) const {
  const auto& bonds = account(id).bonds;
  auto it = bonds.find(maturity);
  return it == bonds.end() ? 0 : it->second.count;
}

std::int64_t LedgerState::free_holding(AccountId id, Date maturity) const {
  const auto& bonds = account(id).bonds;
  auto it = bonds.find(maturity);
  return it == bonds.end() ? 0 : it->second.free();
}

Money LedgerState::apply_trade(AccountId buyer, AccountId seller, Date maturity,
                               std::int64_t qty, Price unit_price,
                               std::optional<AccountId> fee_to, Money fee) {
  if (qty <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "trade quantity must be positive");
  }
  if (fee.cents < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative fee");
  }
  if (fee.cents > 0 && !fee_to) {
    throw Error(ErrorCode::kInvalidArgument, "fee without recipient");
  }
  if (maturity <= today_) {
    throw Error(ErrorCode::kExpiredMaturity,
                "trade in bond maturing on day " + std::to_string(maturity.day_index));
  }

  Account& buy_acct = mutable_account(buyer);
  Account& sell_acct = mutable_account(seller);
  if (fee_to) {
    mutable_account(*fee_to);
  }

  const Money cash = cash_amount(qty, unit_price);
  const bool self_trade = buyer == seller;

  // Validate everything before the first mutation.
  if (seller != kAuthority) {
    auto it = sell_acct.bonds.find(maturity);
    const std::int64_t available = it == sell_acct.bonds.end() ? 0 : it->second.free();
    if (available < qty) {
      throw Error(ErrorCode::kInsufficientHoldings,
                  describe(seller) + " holds " + std::to_string(available) + " free bonds, needs " +
                      std::to_string(qty));
    }
  }
  if (buyer != kAuthority) {
    const Money needed = (self_trade ? Money{} : cash) + fee;
    if (buy_acct.free_cash() < needed) {
      throw Error(ErrorCode::kInsufficientFunds,
                  describe(buyer) + " has " + std::to_string(buy_acct.free_cash().cents) +
                      " free cents, needs " + std::to_string(needed.cents));
    }
  }

  if (!self_trade) {
    if (seller == kAuthority) {
      auto& pos = sell_acct.bonds[maturity];
      // The authority mints whatever it sells beyond its own inventory.
      pos.count -= std::min(pos.count, qty);
      if (pos.count == 0 && pos.reserved == 0) {
        sell_acct.bonds.erase(maturity);
      }
    } else {
      auto it = sell_acct.bonds.find(maturity);
      it->second.count -= qty;
      if (it->second.count == 0 && it->second.reserved == 0) {
        sell_acct.bonds.erase(it);
      }
    }
    buy_acct.bonds[maturity].count += qty;
    buy_acct.balance -= cash;
    sell_acct.balance += cash;
  }
  if (fee.cents > 0) {
    buy_acct.balance -= fee;
    mutable_account(*fee_to).balance += fee;
  }
  return cash;
}

Redemption LedgerState::redeem_maturing() {
  Redemption out;
  Account& authority = accounts_.at(kAuthority);
  for (auto& [id, acct] : accounts_) {
    auto end = acct.bonds.upper_bound(today_);
    for (auto it = acct.bonds.begin(); it != end; ++it) {
      if (id == kAuthority) {
        out.authority_retired += it->second.count;
        continue;
      }
      const Money paid{it->second.count * kCentsPerBond};
      acct.balance += paid;
      authority.balance -= paid;
      out.total += paid;
      out.bonds_redeemed += it->second.count;
    }
    acct.bonds.erase(acct.bonds.begin(), end);
  }
  return out;
}

void LedgerState::reserve_cash(AccountId id, Money amount) {
  if (id == kAuthority || amount.cents == 0) return;
  Account& acct = mutable_account(id);
  if (amount.cents < 0 || acct.free_cash() < amount) {
    throw Error(ErrorCode::kInsufficientFunds,
                describe(id) + " cannot escrow " + std::to_string(amount.cents) + " cents");
  }
  acct.reserved += amount;
}

void LedgerState::release_cash(AccountId id, Money amount) {
  if (id == kAuthority || amount.cents == 0) return;
  Account& acct = mutable_account(id);
  if (amount.cents < 0 || acct.reserved < amount) {
    violated("escrow soundness", describe(id) + " releases more cash than reserved");
  }
  acct.reserved -= amount;
}

void LedgerState::reserve_bonds(AccountId id, Date maturity, std::int64_t qty) {
  if (id == kAuthority || qty == 0) return;
  Account& acct = mutable_account(id);
  auto it = acct.bonds.find(maturity);
  if (qty < 0 || it == acct.bonds.end() || it->second.free() < qty) {
    throw Error(ErrorCode::kInsufficientHoldings,
                describe(id) + " cannot escrow " + std::to_string(qty) + " bonds");
  }
  it->second.reserved += qty;
}

void LedgerState::release_bonds(AccountId id, Date maturity, std::int64_t qty) {
  if (id == kAuthority || qty == 0) return;
  Account& acct = mutable_account(id);
  auto it = acct.bonds.find(maturity);
  if (it == acct.bonds.end()) {
    if (maturity <= today_) return;  // already redeemed
    violated("escrow soundness", describe(id) + " releases bonds it does not hold");
  }
  if (qty < 0 || it->second.reserved < qty) {
    violated("escrow soundness", describe(id) + " releases more bonds than reserved");
  }
  it->second.reserved -= qty;
  if (it->second.count == 0 && it->second.reserved == 0) {
    acct.bonds.erase(it);
  }
}

Money LedgerState::money_supply() const {
  Money total;
  for (const auto& [id, acct] : accounts_) {
    if (id != kAuthority) total += acct.balance;
  }
  return total;
}

std::int64_t LedgerState::outstanding() const {
  std::int64_t total = 0;
  for (const auto& [id, acct] : accounts_) {
    if (id == kAuthority) continue;
    for (const auto& [maturity, pos] : acct.bonds) total += pos.count;
  }
  return total;
}

std::int64_t LedgerState::outstanding(Date maturity) const {
  std::int64_t total = 0;
  for (const auto& [id, acct] : accounts_) {
    if (id == kAuthority) continue;
    auto it = acct.bonds.find(maturity);
    if (it != acct.bonds.end()) total += it->second.count;
  }
  return total;
}

void LedgerState::audit() const {
  for (const auto& [id, acct] : accounts_) {
    if (id != kAuthority) {
      if (acct.balance.cents < 0) {
        violated("non-negative balance", describe(id) + " balance " +
                                             std::to_string(acct.balance.cents));
      }
      if (acct.reserved.cents < 0 || acct.reserved > acct.balance) {
        violated("escrow soundness", describe(id) + " reserved cash exceeds balance");
      }
    }
    for (const auto& [maturity, pos] : acct.bonds) {
      if (maturity <= today_) {
        violated("no expired inventory", describe(id) + " holds bonds maturing on day " +
                                             std::to_string(maturity.day_index));
      }
      if (pos.count < 0) {
        violated("non-negative holdings", describe(id));
      }
      if (pos.reserved < 0 || pos.reserved > pos.count) {
        violated("escrow soundness", describe(id) + " reserved bonds exceed holdings");
      }
    }
  }
}

}  // namespace elastic

#pragma once

// The daily event loop and scenario configuration.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elastic/agents.hpp"
#include "elastic/authority.hpp"
#include "elastic/ledger.hpp"
#include "elastic/ledgermode.hpp"
#include "elastic/market.hpp"

namespace elastic {

enum class Mode { kCentral, kLedger };

std::string_view to_string(Mode m);

/// `count` identical agents sharing one parameter set and starting balance.
struct AgentGroup {
  std::string name;  // unique; substreams are "<name>#<index>"
  std::int64_t count = 1;
  Money money;
  AgentParams params;

  bool operator==(const AgentGroup&) const = default;
};

/// Explicit genesis line: `qty` bonds maturing on `maturity_day` for `account`.
struct IssuanceLine {
  std::int64_t maturity_day = 0;
  std::int64_t qty = 0;
  std::uint32_t account = 0;

  bool operator==(const IssuanceLine&) const = default;
};

/// Genesis bonds. `total` is split over the buckets by target mass, spread
/// evenly over each bucket's days and dealt round-robin to the members of
/// the `holders` groups. `lines` are added on top.
struct InitialIssuance {
  std::int64_t total = 0;
  std::vector<std::string> holders;
  std::vector<IssuanceLine> lines;

  bool operator==(const InitialIssuance&) const = default;
};

/// Multiplies every saver's shock intensity on days [from_day, to_day].
struct ShockOverride {
  std::int64_t from_day = 0;
  std::int64_t to_day = 0;
  double saver_lambda_multiplier = 1.0;

  bool operator==(const ShockOverride&) const = default;
};

struct LedgerConfig {
  std::int64_t miners = 3;
  Money miner_money;
  std::size_t block_capacity = 100'000;
  MinerPolicyKind policy = MinerPolicyKind::kHonest;
  std::vector<std::string> censor;  // group names, censor policy only

  bool operator==(const LedgerConfig&) const = default;
};

struct ScenarioConfig {
  std::int64_t days = 365;
  std::uint64_t seed = 1;
  Mode mode = Mode::kCentral;
  PolicyConfig policy;
  std::vector<AgentGroup> agents;
  InitialIssuance issuance;
  std::vector<ShockOverride> shocks;
  LedgerConfig ledger;

  /// Throws kValidation with the offending field path.
  void validate() const;
  std::int64_t agent_count() const;
  bool operator==(const ScenarioConfig&) const = default;
};

struct MetricsRow {
  std::int64_t day = 0;
  Money money_supply;
  std::optional<Rate> rate_tau;   // tau bond cleared today
  std::int64_t clearings = 0;     // maturities with executed volume
  std::int64_t outstanding = 0;
  std::vector<std::int64_t> buckets;
  double l1 = 0.0;
  std::optional<int> esc_step;    // set while escalation is active at day end
  Money authority_net;            // redemptions + authority buys - authority sells
  Money miner_fees;
  std::int64_t dropped_orders = 0;
  AuthorityDay authority;         // detail for tests and the audit log
};

struct Summary {
  std::int64_t days = 0;
  std::optional<double> min_rate_tau;
  std::optional<double> max_rate_tau;
  std::int64_t rate_tau_days = 0;
  Money total_issuance;
  std::int64_t days_in_escalation = 0;
  std::int64_t escalation_episodes = 0;
  double final_l1 = 0.0;
  Money initial_money_supply;
  Money final_money_supply;
  std::int64_t final_outstanding = 0;
  Money miner_fees;
  std::int64_t dropped_orders = 0;
};

class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  /// Runs one day. Throws kInvariantViolation if the ledger audit or the
  /// daily accounting check fails.
  MetricsRow step_day();

  bool done() const { return day_ >= config_.days; }
  std::int64_t day() const { return day_; }

  const ScenarioConfig& config() const { return config_; }
  const LedgerState& ledger() const { return ledger_; }
  const Market& market() const { return market_; }
  const CashAuthority& authority() const { return authority_; }
  const std::vector<AgentSpec>& agents() const { return agents_; }
  const std::vector<AccountId>& miners() const { return miners_; }
  Money initial_supply() const { return initial_supply_; }

  /// One line per authority action and block, when enabled.
  void enable_audit_log() { audit_enabled_ = true; }
  const std::vector<std::string>& audit_log() const { return audit_; }

  /// Saver shock multiplier in force on `day`.
  double shock_multiplier(std::int64_t day) const;

 private:
  void genesis();
  struct DayTrades {
    std::vector<AuctionResult> results;
    Money authority_flow;  // paid out by the authority minus received
    Money fees;
    std::int64_t dropped = 0;
  };

  Observation observe(const AgentSpec& agent, const YieldCurve& curve) const;
  std::int64_t submit_agent_orders(const YieldCurve& curve);
  DayTrades run_call_auctions();
  DayTrades run_block();
  void log(const std::string& line);

  ScenarioConfig config_;
  LedgerState ledger_;
  Market market_;
  CashAuthority authority_;
  std::vector<AgentSpec> agents_;
  std::vector<StreamRng> rngs_;
  std::vector<AccountId> miners_;
  MinerPolicy miner_policy_;
  Mempool mempool_;
  std::int64_t day_ = 0;
  std::optional<Rate> last_rate_tau_;
  Money previous_supply_;
  Money initial_supply_;
  bool audit_enabled_ = false;
  std::vector<std::string> audit_;
};

struct RunResult {
  std::vector<MetricsRow> rows;
  Summary summary;
  std::vector<std::string> audit_log;
};

Summary summarize(const std::vector<MetricsRow>& rows, const Simulation& sim);

RunResult run_scenario(const ScenarioConfig& config, bool audit_log = false);

}  // namespace elastic

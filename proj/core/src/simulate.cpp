#include "elastic/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace elastic {
namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kValidation, path + ": " + what);
}

std::string day_prefix(std::int64_t day) { return "day " + std::to_string(day) + " "; }

// First and last whole day of a bucket's duration range.
std::pair<std::int64_t, std::int64_t> bucket_days(const DurationBucket& b) {
  const auto first = static_cast<std::int64_t>(std::floor(b.lower_years * kDaysPerYear)) + 1;
  const auto last = static_cast<std::int64_t>(std::floor(b.upper_years * kDaysPerYear));
  return {first, std::max(first, last)};
}

// Splits `total` by masses with largest-remainder rounding, ties to the lower index.
std::vector<std::int64_t> split_by_mass(std::int64_t total, const DurationDistribution& dist) {
  const std::size_t n = dist.buckets.size();
  std::vector<std::int64_t> out(n, 0);
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = static_cast<double>(total) * dist.buckets[i].mass;
    out[i] = static_cast<std::int64_t>(std::floor(share));
    assigned += out[i];
    rem.emplace_back(share - static_cast<double>(out[i]), i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % n, ++assigned) ++out[rem[k].second];
  return out;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::kCentral ? "central" : "ledger"; }

std::int64_t ScenarioConfig::agent_count() const {
  std::int64_t n = 0;
  for (const auto& g : agents) n += g.count;
  return n;
}

void ScenarioConfig::validate() const {
  if (days < 1) invalid("days", "must be at least 1");
  policy.validate();
  if (policy.dist.buckets.size() != 4) invalid("distribution", "exactly 4 buckets are required");
  if (agents.empty()) invalid("agents", "at least one agent group is required");

  std::set<std::string> names;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentGroup& g = agents[i];
    const std::string path = "agents[" + std::to_string(i) + "]";
    if (g.name.empty()) invalid(path + ".name", "must not be empty");
    if (!names.insert(g.name).second) invalid(path + ".name", "duplicate group name " + g.name);
    if (g.count < 1) invalid(path + ".count", "must be at least 1");
    if (g.money.cents < 0) invalid(path + ".money_cents", "must be non-negative");
    if (const auto* s = std::get_if<SaverParams>(&g.params)) {
      if (s->preferred_bucket >= policy.dist.buckets.size()) {
        invalid(path + ".preferred_bucket", "no such bucket");
      }
    }
    try {
      AgentSpec{g.params, AccountId{1}, g.name}.validate();
    } catch (const Error& e) {
      invalid(path, e.what());
    }
  }
  const std::int64_t n_agents = agent_count();
  if (n_agents + ledger.miners >= std::int64_t{1} << 31) invalid("agents", "too many accounts");

  if (issuance.total < 0) invalid("initial_issuance.total", "must be non-negative");
  if (issuance.total > 0 && issuance.holders.empty()) {
    invalid("initial_issuance.holders", "needed when total > 0");
  }
  for (std::size_t i = 0; i < issuance.holders.size(); ++i) {
    if (!names.contains(issuance.holders[i])) {
      invalid("initial_issuance.holders[" + std::to_string(i) + "]",
              "unknown group " + issuance.holders[i]);
    }
  }
  const std::int64_t horizon = bucket_days(policy.dist.buckets.back()).second;
  for (std::size_t i = 0; i < issuance.lines.size(); ++i) {
    const IssuanceLine& l = issuance.lines[i];
    const std::string path = "initial_issuance.lines[" + std::to_string(i) + "]";
    if (l.maturity_day < 1 || l.maturity_day > horizon) {
      invalid(path + ".maturity_day", "must lie in [1, " + std::to_string(horizon) + "]");
    }
    if (l.qty < 1) invalid(path + ".qty", "must be positive");
    if (l.account < 1 || l.account > n_agents) invalid(path + ".account", "no such agent account");
  }

  for (std::size_t i = 0; i < shocks.size(); ++i) {
    const ShockOverride& s = shocks[i];
    const std::string path = "shocks[" + std::to_string(i) + "]";
    if (s.to_day < s.from_day) invalid(path, "to_day before from_day");
    if (!(s.saver_lambda_multiplier >= 0.0) || !std::isfinite(s.saver_lambda_multiplier)) {
      invalid(path + ".saver_lambda_multiplier", "must be finite and non-negative");
    }
  }

  if (ledger.miners < 1) invalid("ledger.miners", "must be at least 1");
  if (ledger.miner_money.cents < 0) invalid("ledger.miner_money_cents", "must be non-negative");
  if (ledger.block_capacity < 1) invalid("ledger.block_capacity", "must be at least 1");
  if (ledger.policy != MinerPolicyKind::kCensor && !ledger.censor.empty()) {
    invalid("ledger.censor", "only allowed with the censor policy");
  }
  for (std::size_t i = 0; i < ledger.censor.size(); ++i) {
    if (!names.contains(ledger.censor[i])) {
      invalid("ledger.censor[" + std::to_string(i) + "]", "unknown group " + ledger.censor[i]);
    }
  }
}

Simulation::Simulation(ScenarioConfig config)
    : config_((config.validate(), std::move(config))),
      ledger_(Date{0}),
      authority_(config_.policy) {
  genesis();
}

void Simulation::genesis() {
  std::map<std::string, std::vector<AccountId>> members;
  std::uint32_t next = 1;
  for (const AgentGroup& g : config_.agents) {
    for (std::int64_t i = 0; i < g.count; ++i) {
      const AccountId id{next++};
      ledger_.open_account(id, g.money);
      const std::string stream = g.name + "#" + std::to_string(i);
      agents_.push_back(AgentSpec{g.params, id, stream});
      rngs_.emplace_back(config_.seed, stream_id(stream));
      members[g.name].push_back(id);
    }
  }
  if (config_.mode == Mode::kLedger) {
    for (std::int64_t i = 0; i < config_.ledger.miners; ++i) {
      const AccountId id{next++};
      ledger_.open_account(id, config_.ledger.miner_money);
      miners_.push_back(id);
    }
    miner_policy_.kind = config_.ledger.policy;
    for (const std::string& name : config_.ledger.censor) {
      for (AccountId id : members[name]) miner_policy_.censored.insert(id);
    }
  }

  std::vector<AccountId> holders;
  for (const std::string& name : config_.issuance.holders) {
    holders.insert(holders.end(), members[name].begin(), members[name].end());
  }
  std::map<std::pair<AccountId, std::int64_t>, std::int64_t> grants;
  const auto per_bucket = split_by_mass(config_.issuance.total, config_.policy.dist);
  std::size_t turn = 0;
  for (std::size_t b = 0; b < per_bucket.size(); ++b) {
    const auto [first, last] = bucket_days(config_.policy.dist.buckets[b]);
    const std::int64_t span = last - first + 1;
    const std::int64_t n = per_bucket[b];
    for (std::int64_t j = 0; j < span; ++j) {
      const std::int64_t qty = (j + 1) * n / span - j * n / span;
      for (std::int64_t u = 0; u < qty; ++u) {
        grants[{holders[turn++ % holders.size()], first + j}] += 1;
      }
    }
  }
  for (const IssuanceLine& l : config_.issuance.lines) {
    grants[{AccountId{l.account}, l.maturity_day}] += l.qty;
  }
  for (const auto& [key, qty] : grants) ledger_.endow_bonds(key.first, Date{key.second}, qty);

  ledger_.audit();
  initial_supply_ = ledger_.money_supply();
  previous_supply_ = initial_supply_;
}

double Simulation::shock_multiplier(std::int64_t day) const {
  double m = 1.0;
  for (const ShockOverride& s : config_.shocks) {
    if (day >= s.from_day && day <= s.to_day) m *= s.saver_lambda_multiplier;
  }
  return m;
}

Observation Simulation::observe(const AgentSpec& agent, const YieldCurve& curve) const {
  Observation obs;
  obs.today = ledger_.current_date();
  obs.curve = curve;
  obs.free_cash = ledger_.free_cash(agent.account);
  for (const auto& [maturity, pos] : ledger_.account(agent.account).bonds) {
    if (pos.free() > 0) obs.free_bonds.emplace(maturity, pos.free());
  }
  obs.band_config = config_.policy.band;
  obs.band = authority_.band();
  obs.offers = authority_.offers();
  obs.rate_tau = last_rate_tau_;
  if (const auto* s = std::get_if<SaverParams>(&agent.params)) {
    for (std::int64_t d = day_ - s->stress_days + 1; d <= day_; ++d) {
      obs.shock_window.push_back(shock_multiplier(d));
    }
  }
  obs.dist = config_.policy.dist;
  return obs;
}

std::int64_t Simulation::submit_agent_orders(const YieldCurve& curve) {
  std::int64_t dropped = 0;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const Observation obs = observe(agents_[i], curve);
    for (const OrderRequest& r : agent_step(agents_[i], obs, rngs_[i])) {
      if (config_.mode == Mode::kLedger) {
        mempool_.add(r);
        continue;
      }
      try {
        market_.book().submit(ledger_, r);
      } catch (const Error&) {
        ++dropped;
      }
    }
  }
  return dropped;
}

Simulation::DayTrades Simulation::run_call_auctions() {
  DayTrades out;
  out.results = market_.run_all_auctions(ledger_);
  for (const AuctionResult& r : out.results) {
    for (const Trade& t : r.trades) {
      const Money cash = cash_amount(t.qty, t.unit_price);
      if (t.buyer == kAuthority) out.authority_flow += cash;
      if (t.seller == kAuthority) out.authority_flow -= cash;
    }
  }
  return out;
}

Simulation::DayTrades Simulation::run_block() {
  DayTrades out;
  const AccountId miner = miners_[static_cast<std::size_t>((day_ - 1) % config_.ledger.miners)];
  const Block block = build_block(mempool_, ledger_, market_.book(), miner, miner_policy_,
                                  config_.ledger.block_capacity, day_);
  out.fees = apply_block(ledger_, market_.book(), block);
  out.dropped = block.dropped;
  mempool_.remove(block.from_mempool);
  for (const Match& m : block.matches) {
    if (m.buyer == kAuthority) out.authority_flow += cash_amount(m.qty, m.bid);
    if (m.seller == kAuthority) out.authority_flow -= cash_amount(m.qty, m.ask);
    market_.record_price(m.maturity, m.ask);
  }
  AuctionResult all;
  all.trades = block_trades(block, ledger_.current_date());
  for (const Match& m : block.matches) all.executed_volume += m.qty;
  out.results.push_back(std::move(all));
  if (audit_enabled_) {
    log(day_prefix(day_) + "block " + std::to_string(block.height) + " miner " +
        std::to_string(miner.value) + " included " + std::to_string(block.included.size()) +
        " matches " + std::to_string(block.matches.size()) + " fees " +
        std::to_string(block.fees.cents));
  }
  return out;
}

void Simulation::log(const std::string& line) { audit_.push_back(line); }

MetricsRow Simulation::step_day() {
  ++day_;
  const Date today{day_};
  ledger_.advance_to(today);
  const Redemption redeemed = ledger_.redeem_maturing();
  market_.book().expire(ledger_, today);
  market_.forget_matured(today);
  mempool_.expire(today);

  authority_.open_day();
  authority_.refresh_standing(market_, ledger_);
  authority_.plan_reissue(ledger_, redeemed.bonds_redeemed);
  authority_.post_reissue(market_, ledger_);
  authority_.post_escalation(market_, ledger_);

  const YieldCurve curve = yield_curve(market_.last_prices(), today);
  const std::int64_t agent_drops = submit_agent_orders(curve);
  DayTrades trades = config_.mode == Mode::kCentral ? run_call_auctions() : run_block();
  authority_.close_day(market_, ledger_, trades.results);

  try {
    ledger_.audit();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvariantViolation, day_prefix(day_) + e.what());
  }
  const Money supply = ledger_.money_supply();
  const Money delta = supply - previous_supply_;
  if (delta != redeemed.total + trades.authority_flow) {
    throw Error(ErrorCode::kInvariantViolation,
                day_prefix(day_) + "supply accounting: change " + std::to_string(delta.cents) +
                    " != redemptions " + std::to_string(redeemed.total.cents) +
                    " + authority flow " + std::to_string(trades.authority_flow.cents));
  }
  previous_supply_ = supply;

  MetricsRow row;
  row.day = day_;
  row.money_supply = supply;
  const Date tau_date = today + config_.policy.band.tau.days();
  for (const AuctionResult& r : trades.results) {
    if (r.executed_volume == 0) continue;
    if (config_.mode == Mode::kCentral) ++row.clearings;
    for (const Trade& t : r.trades) {
      if (t.maturity == tau_date) row.rate_tau = implied_rate(t.unit_price, config_.policy.band.tau);
    }
  }
  if (config_.mode == Mode::kLedger && !trades.results.empty()) {
    std::set<Date> traded;
    for (const Trade& t : trades.results.front().trades) traded.insert(t.maturity);
    row.clearings = static_cast<std::int64_t>(traded.size());
  }
  if (row.rate_tau) last_rate_tau_ = row.rate_tau;
  row.outstanding = ledger_.outstanding();
  row.buckets = bucket_distribution(ledger_, config_.policy.dist);
  row.l1 = l1_distance(row.buckets, config_.policy.dist);
  if (authority_.escalation().active) row.esc_step = authority_.escalation().step_index;
  row.authority_net = delta;
  row.miner_fees = trades.fees;
  row.dropped_orders = agent_drops + trades.dropped;
  row.authority = authority_.today();

  if (audit_enabled_) {
    const AuthorityDay& a = row.authority;
    if (redeemed.bonds_redeemed + redeemed.authority_retired > 0) {
      log(day_prefix(day_) + "redeemed " + std::to_string(redeemed.bonds_redeemed) +
          " paid " + std::to_string(redeemed.total.cents) + " retired " +
          std::to_string(redeemed.authority_retired));
    }
    if (a.standing_bought + a.standing_sold > 0) {
      log(day_prefix(day_) + "standing bought " + std::to_string(a.standing_bought) + " sold " +
          std::to_string(a.standing_sold));
    }
    if (a.reissue_offered > 0) {
      log(day_prefix(day_) + "reissue offered " + std::to_string(a.reissue_offered) + " sold " +
          std::to_string(a.reissue_sold));
    }
    if (a.escalation_step >= 0) {
      log(day_prefix(day_) + "escalation step " + std::to_string(a.escalation_step) +
          " offered " + std::to_string(a.escalation_offered) + " of " +
          std::to_string(a.escalation_outstanding) + " sold " +
          std::to_string(a.escalation_sold));
    }
    if (a.crunch) log(day_prefix(day_) + "crunch");
  }
  return row;
}

Summary summarize(const std::vector<MetricsRow>& rows, const Simulation& sim) {
  Summary s;
  s.days = static_cast<std::int64_t>(rows.size());
  bool was_escalating = false;
  for (const MetricsRow& r : rows) {
    if (r.rate_tau) {
      const double v = r.rate_tau->per_year;
      s.min_rate_tau = s.min_rate_tau ? std::min(*s.min_rate_tau, v) : v;
      s.max_rate_tau = s.max_rate_tau ? std::max(*s.max_rate_tau, v) : v;
      ++s.rate_tau_days;
    }
    if (r.esc_step) {
      ++s.days_in_escalation;
      if (!was_escalating) ++s.escalation_episodes;
    }
    was_escalating = r.esc_step.has_value();
    s.miner_fees += r.miner_fees;
    s.dropped_orders += r.dropped_orders;
  }
  s.total_issuance = sim.ledger().cumulative_issuance();
  s.final_l1 = rows.empty() ? 0.0 : rows.back().l1;
  s.initial_money_supply = sim.initial_supply();
  s.final_money_supply = sim.ledger().money_supply();
  s.final_outstanding = sim.ledger().outstanding();
  return s;
}

RunResult run_scenario(const ScenarioConfig& config, bool audit_log) {
  Simulation sim(config);
  if (audit_log) sim.enable_audit_log();
  RunResult out;
  out.rows.reserve(static_cast<std::size_t>(config.days));
  while (!sim.done()) out.rows.push_back(sim.step_day());
  out.summary = summarize(out.rows, sim);
  out.audit_log = sim.audit_log();
  return out;
}

}  // namespace elastic

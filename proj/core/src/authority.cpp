#include "elastic/authority.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace elastic {
namespace {

constexpr std::int64_t kPpm = 1'000'000;

std::int64_t to_ppm(double fraction) { return std::llround(fraction * static_cast<double>(kPpm)); }

}  // namespace

DurationDistribution DurationDistribution::quartiles() {
  return DurationDistribution{{
      {0.0, 1.0 / 12.0, 0.25},
      {1.0 / 12.0, 1.0, 0.25},
      {1.0, 4.0, 0.25},
      {4.0, 10.0, 0.25},
  }};
}

void DurationDistribution::validate() const {
  if (buckets.empty()) {
    throw Error(ErrorCode::kValidation, "distribution needs at least one bucket");
  }
  double total = 0.0;
  double previous_upper = 0.0;
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    const auto& b = buckets[i];
    const std::string where = "distribution[" + std::to_string(i) + "]";
    if (b.lower_years != previous_upper) {
      throw Error(ErrorCode::kValidation, where + ".lower must equal the previous upper bound");
    }
    if (!(b.upper_years > b.lower_years)) {
      throw Error(ErrorCode::kValidation, where + ".upper must exceed lower");
    }
    if (!(b.mass >= 0.0) || b.mass > 1.0) {
      throw Error(ErrorCode::kValidation, where + ".mass must lie in [0, 1]");
    }
    total += b.mass;
    previous_upper = b.upper_years;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kValidation,
                "distribution masses sum to " + std::to_string(total) + ", expected 1");
  }
}

std::size_t DurationDistribution::bucket_of(DurationYears d) const {
  const double years = d.years();
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (years <= buckets[i].upper_years) return i;
  }
  return buckets.size() - 1;
}

std::int64_t DurationDistribution::midpoint_days(std::size_t bucket) const {
  const auto& b = buckets.at(bucket);
  const double days = 0.5 * (b.lower_years + b.upper_years) * static_cast<double>(kDaysPerYear);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(days + 0.5)));
}

std::vector<std::int64_t> bucket_distribution(const LedgerState& state,
                                              const DurationDistribution& dist) {
  std::vector<std::int64_t> counts(dist.buckets.size(), 0);
  const Date today = state.current_date();
  for (const auto& [id, acct] : state.accounts()) {
    if (id == kAuthority) continue;
    for (const auto& [maturity, pos] : acct.bonds) {
      if (pos.count == 0) continue;
      counts[dist.bucket_of(duration_of(maturity, today))] += pos.count;
    }
  }
  return counts;
}

double l1_distance(std::span<const std::int64_t> counts, const DurationDistribution& dist) {
  const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (total == 0) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d += std::abs(static_cast<double>(counts[i]) / static_cast<double>(total) -
                  dist.buckets[i].mass);
  }
  return d;
}

std::int64_t ReissuePlan::total() const {
  std::int64_t t = 0;
  for (const auto& line : lines) t += line.qty;
  return t;
}

ReissuePlan reissue_plan(const LedgerState& state, std::int64_t redeemed_qty,
                         const DurationDistribution& dist, Rate rate_cap) {
  if (redeemed_qty < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative redeemed quantity");
  }
  ReissuePlan plan;
  if (redeemed_qty == 0) return plan;

  const std::vector<std::int64_t> counts = bucket_distribution(state, dist);
  const double new_total =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) +
                          redeemed_qty);
  const std::size_t n = counts.size();
  std::vector<double> deficit(n, 0.0);
  double deficit_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    deficit[i] = std::max(0.0, dist.buckets[i].mass * new_total - static_cast<double>(counts[i]));
    deficit_sum += deficit[i];
  }

  std::vector<std::int64_t> alloc(n, 0);
  std::vector<double> remainder(n, -1.0);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (deficit[i] <= 0.0) continue;
    const double share = static_cast<double>(redeemed_qty) * deficit[i] / deficit_sum;
    alloc[i] = static_cast<std::int64_t>(std::floor(share));
    remainder[i] = share - static_cast<double>(alloc[i]);
    assigned += alloc[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < redeemed_qty; k = (k + 1) % n) {
    if (remainder[order[k]] < 0.0) continue;
    ++alloc[order[k]];
    ++assigned;
  }

  const Date today = state.current_date();
  for (std::size_t i = 0; i < n; ++i) {
    if (alloc[i] == 0) continue;
    const DurationYears d(dist.midpoint_days(i));
    plan.lines.push_back(ReissueLine{today + d.days(), alloc[i], price_from_rate(rate_cap, d), i});
  }
  return plan;
}

std::vector<OrderId> post_reissue_orders(Market& market, LedgerState& state,
                                         const ReissuePlan& plan) {
  std::vector<OrderId> ids;
  ids.reserve(plan.lines.size());
  const Date today = state.current_date();
  for (const auto& line : plan.lines) {
    ids.push_back(market.book().submit(
        state, OrderRequest{kAuthority, Side::kSell, line.maturity, line.qty, line.reserve,
                            false, today}));
  }
  return ids;
}

ReissueOutcome run_reissue_auction(Market& market, LedgerState& state, const ReissuePlan& plan) {
  ReissueOutcome out;
  out.offered = plan.total();
  const std::vector<OrderId> ids = post_reissue_orders(market, state, plan);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const AuctionResult r = market.run_auction(state, plan.lines[i].maturity);
    for (const Trade& t : r.trades) {
      if (t.sell_order == ids[i]) {
        out.sold += t.qty;
        out.proceeds += cash_amount(t.qty, t.unit_price);
      }
    }
    if (market.book().contains(ids[i])) market.book().cancel(state, ids[i]);
  }
  return out;
}

StandingOrders refresh_standing_orders(Market& market, LedgerState& state, const BandConfig& cfg,
                                       const std::optional<StandingOrders>& previous) {
  if (previous) {
    if (market.book().contains(previous->buy)) market.book().cancel(state, previous->buy);
    if (market.book().contains(previous->sell)) market.book().cancel(state, previous->sell);
  }
  const BandPrices band = band_prices(cfg);
  const Date today = state.current_date();
  const Date maturity = today + cfg.tau.days();
  StandingOrders out{maturity, {}, {}};
  out.buy = market.book().submit(
      state, OrderRequest{kAuthority, Side::kBuy, maturity, 0, band.minus, true, today});
  out.sell = market.book().submit(
      state, OrderRequest{kAuthority, Side::kSell, maturity, 0, band.plus, true, today});
  return out;
}

bool detect_liquidity_crunch(const LedgerState& state, DurationYears tau) {
  if (state.outstanding() == 0) return false;
  return state.outstanding(state.current_date() + tau.days()) == 0;
}

void EscalationParams::validate() const {
  if (!(base_fraction > 0.0) || base_fraction > 1.0) {
    throw Error(ErrorCode::kValidation, "escalation.base_fraction must lie in (0, 1]");
  }
  if (step_interval_days <= 0) {
    throw Error(ErrorCode::kValidation, "escalation.step_interval_days must be positive");
  }
  if (!(cap_fraction >= base_fraction) || cap_fraction > 1.0) {
    throw Error(ErrorCode::kValidation,
                "escalation.cap_fraction must lie in [base_fraction, 1]");
  }
}

EscalationState make_escalation_state(const EscalationParams& params) {
  EscalationState s;
  s.base_fraction = params.base_fraction;
  s.step_interval = params.step_interval_days;
  s.cap_fraction = params.cap_fraction;
  return s;
}

std::int64_t escalation_quantity(const EscalationState& esc, std::int64_t outstanding) {
  if (outstanding <= 0) return 0;
  const std::int64_t cap = to_ppm(esc.cap_fraction);
  std::int64_t fraction = to_ppm(esc.base_fraction);
  for (int k = 0; k < esc.step_index && fraction < cap; ++k) fraction *= 2;
  fraction = std::min(fraction, cap);
  // Split to keep outstanding * fraction inside int64.
  const std::int64_t qty = outstanding / kPpm * fraction + outstanding % kPpm * fraction / kPpm;
  return std::max<std::int64_t>(qty, 1);
}

Price escalation_reserve(const BandConfig& band) {
  return price_from_rate(Rate{band.target.per_year + band.half_width.per_year},
                         DurationYears(2 * band.tau.days()));
}

void PolicyConfig::validate() const {
  band.validate();
  dist.validate();
  escalation.validate();
  if (!(reissue_rate_cap.per_year > 0.0) || !std::isfinite(reissue_rate_cap.per_year)) {
    throw Error(ErrorCode::kValidation, "reissue.rate_cap must be positive");
  }
}

CashAuthority::CashAuthority(PolicyConfig config)
    : config_(std::move(config)),
      band_((config_.validate(), band_prices(config_.band))),
      escalation_(make_escalation_state(config_.escalation)) {}

std::optional<Date> CashAuthority::standing_maturity() const {
  if (!standing_) return std::nullopt;
  return standing_->maturity;
}

void CashAuthority::open_day() {
  day_ = AuthorityDay{};
  plan_ = ReissuePlan{};
  reissue_orders_.clear();
  escalation_order_.reset();
  escalation_offer_.reset();
}

void CashAuthority::refresh_standing(Market& market, LedgerState& state) {
  if (!config_.rule1_enabled) return;
  standing_ = refresh_standing_orders(market, state, config_.band, standing_);
}

const ReissuePlan& CashAuthority::plan_reissue(const LedgerState& state, std::int64_t redeemed) {
  plan_ = reissue_plan(state, redeemed + carryover_, config_.dist, config_.reissue_rate_cap);
  return plan_;
}

void CashAuthority::post_reissue(Market& market, LedgerState& state) {
  reissue_orders_ = post_reissue_orders(market, state, plan_);
  day_.reissue_offered = plan_.total();
}

void CashAuthority::post_escalation(Market& market, LedgerState& state) {
  if (!escalation_.active) return;
  const Date today = state.current_date();
  if (today != escalation_.last_step_date) {
    if (today - escalation_.last_step_date < escalation_.step_interval) return;
    ++escalation_.step_index;
    escalation_.last_step_date = today;
  }
  const std::int64_t outstanding = state.outstanding();
  const std::int64_t qty = escalation_quantity(escalation_, outstanding);
  day_.escalation_step = escalation_.step_index;
  day_.escalation_outstanding = outstanding;
  if (qty == 0) return;
  const Date maturity = today + 2 * config_.band.tau.days();
  const Price reserve = escalation_reserve(config_.band);
  escalation_order_ = market.book().submit(
      state, OrderRequest{kAuthority, Side::kSell, maturity, qty, reserve, false, today});
  escalation_offer_ = AuctionOffer{OfferKind::kEscalation, maturity, qty, reserve};
  day_.escalation_offered = qty;
}

std::vector<AuctionOffer> CashAuthority::offers() const {
  std::vector<AuctionOffer> out;
  for (const auto& line : plan_.lines) {
    out.push_back(AuctionOffer{OfferKind::kReissue, line.maturity, line.qty, line.reserve});
  }
  if (escalation_offer_) out.push_back(*escalation_offer_);
  return out;
}

void CashAuthority::close_day(Market& market, LedgerState& state,
                              std::span<const AuctionResult> results) {
  for (const AuctionResult& r : results) {
    for (const Trade& t : r.trades) {
      if (standing_ && t.buy_order == standing_->buy) day_.standing_bought += t.qty;
      if (standing_ && t.sell_order == standing_->sell) day_.standing_sold += t.qty;
      if (escalation_order_ && t.sell_order == *escalation_order_) day_.escalation_sold += t.qty;
      if (std::find(reissue_orders_.begin(), reissue_orders_.end(), t.sell_order) !=
          reissue_orders_.end()) {
        day_.reissue_sold += t.qty;
      }
    }
  }
  for (OrderId id : reissue_orders_) {
    if (market.book().contains(id)) market.book().cancel(state, id);
  }
  if (escalation_order_ && market.book().contains(*escalation_order_)) {
    market.book().cancel(state, *escalation_order_);
  }
  carryover_ = plan_.total() - day_.reissue_sold;

  const Date today = state.current_date();
  day_.crunch = detect_liquidity_crunch(state, config_.band.tau);

  const auto window = static_cast<std::size_t>(escalation_.step_interval);
  recent_sellbacks_.push_back(day_.standing_bought);
  while (recent_sellbacks_.size() > window) recent_sellbacks_.pop_front();

  if (escalation_.active) {
    const bool waited = today - escalation_.activated_on >= escalation_.step_interval;
    const std::int64_t sellbacks =
        std::accumulate(recent_sellbacks_.begin(), recent_sellbacks_.end(), std::int64_t{0});
    if (waited && sellbacks == 0) {
      escalation_.active = false;
      escalation_.step_index = 0;
    }
    return;
  }
  if (day_.crunch) {
    escalation_.active = true;
    escalation_.step_index = 0;
    escalation_.activated_on = today;
    escalation_.last_step_date = today + 1;
  }
}

}  // namespace elastic

#pragma once

// The cash authority: band standing orders on the tau-maturity bond,
// replacement of redeemed bonds toward a target duration distribution, and
// escalating sales of 2*tau bonds during a liquidity crunch.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "elastic/curve.hpp"
#include "elastic/ledger.hpp"
#include "elastic/market.hpp"

namespace elastic {

struct DurationBucket {
  double lower_years = 0.0;
  double upper_years = 0.0;
  double mass = 0.0;

  bool operator==(const DurationBucket&) const = default;
};

struct DurationDistribution {
  std::vector<DurationBucket> buckets;

  /// Quarter of the mass each in (0, 1/12], (1/12, 1], (1, 4], (4, 10] years.
  static DurationDistribution quartiles();

  /// Buckets must be contiguous from zero, increasing, with masses summing to 1.
  void validate() const;

  /// Bucket for a positive duration; durations past the last upper bound
  /// land in the last bucket.
  std::size_t bucket_of(DurationYears d) const;

  /// Bucket midpoint rounded half-up to whole days (at least one).
  std::int64_t midpoint_days(std::size_t bucket) const;

  bool operator==(const DurationDistribution&) const = default;
};

/// Non-authority bonds outstanding per bucket, by duration from today.
std::vector<std::int64_t> bucket_distribution(const LedgerState& state,
                                              const DurationDistribution& dist);

/// Sum over buckets of |count_i / total - mass_i|; 0 when nothing is outstanding.
double l1_distance(std::span<const std::int64_t> counts, const DurationDistribution& dist);

struct ReissueLine {
  Date maturity;
  std::int64_t qty = 0;
  Price reserve = Price::par();
  std::size_t bucket = 0;

  bool operator==(const ReissueLine&) const = default;
};

struct ReissuePlan {
  std::vector<ReissueLine> lines;

  std::int64_t total() const;
};

/// Splits `redeemed_qty` new bonds across buckets in proportion to their
/// positive deficits against the post-issue total (largest remainder, ties to
/// the shorter bucket). Each line sits at its bucket midpoint with a reserve
/// price implied by `rate_cap`.
ReissuePlan reissue_plan(const LedgerState& state, std::int64_t redeemed_qty,
                         const DurationDistribution& dist, Rate rate_cap);

struct ReissueOutcome {
  std::int64_t offered = 0;
  std::int64_t sold = 0;
  Money proceeds;
};

/// Posts one authority sell per plan line, limited at the line's reserve and
/// expiring today. Returns the order ids in plan order.
std::vector<OrderId> post_reissue_orders(Market& market, LedgerState& state,
                                         const ReissuePlan& plan);

/// Posts the plan, clears each line's maturity, and withdraws whatever did
/// not sell. The unsold part is plan.total() - sold.
ReissueOutcome run_reissue_auction(Market& market, LedgerState& state, const ReissuePlan& plan);

struct StandingOrders {
  Date maturity;
  OrderId buy;
  OrderId sell;
};

/// Cancels `previous` (if still live) and posts an unbounded buy at p- and an
/// unbounded sell at p+ on the bond maturing today + tau.
StandingOrders refresh_standing_orders(Market& market, LedgerState& state, const BandConfig& cfg,
                                       const std::optional<StandingOrders>& previous);

/// True when bonds exist but none maturing today + tau are held outside the
/// authority.
bool detect_liquidity_crunch(const LedgerState& state, DurationYears tau);

struct EscalationParams {
  double base_fraction = 0.01;
  std::int64_t step_interval_days = 7;
  double cap_fraction = 0.64;

  void validate() const;
  bool operator==(const EscalationParams&) const = default;
};

struct EscalationState {
  bool active = false;
  int step_index = 0;
  Date last_step_date;
  Date activated_on;
  double base_fraction = 0.01;
  std::int64_t step_interval = 7;
  double cap_fraction = 0.64;
};

EscalationState make_escalation_state(const EscalationParams& params);

/// floor(outstanding * base * 2^step) with the fraction capped at
/// cap_fraction; at least one bond when anything is outstanding. Exact
/// integer arithmetic on parts-per-million fractions.
std::int64_t escalation_quantity(const EscalationState& esc, std::int64_t outstanding);

/// Reserve for rule-3 sales: the band's upper rate over 2*tau.
Price escalation_reserve(const BandConfig& band);

struct PolicyConfig {
  BandConfig band;
  DurationDistribution dist = DurationDistribution::quartiles();
  EscalationParams escalation;
  Rate reissue_rate_cap{0.10};
  bool rule1_enabled = true;

  void validate() const;
  bool operator==(const PolicyConfig&) const = default;
};

enum class OfferKind { kReissue, kEscalation };

/// An authority sale open in today's auctions; public information.
struct AuctionOffer {
  OfferKind kind = OfferKind::kReissue;
  Date maturity;
  std::int64_t qty = 0;
  Price reserve = Price::par();
};

/// What the authority did today.
struct AuthorityDay {
  std::int64_t standing_bought = 0;  // bonds bought at p- (money injected)
  std::int64_t standing_sold = 0;    // bonds sold at p+ (money withdrawn)
  std::int64_t reissue_offered = 0;
  std::int64_t reissue_sold = 0;
  std::int64_t escalation_offered = 0;
  std::int64_t escalation_sold = 0;
  std::int64_t escalation_outstanding = 0;  // base for today's escalation quantity
  int escalation_step = -1;                 // step used today, -1 if none
  bool crunch = false;
};

/// The policy automaton. Drives one day in the order
/// refresh_standing -> post_reissue -> post_escalation -> (auctions) -> close_day.
class CashAuthority {
 public:
  explicit CashAuthority(PolicyConfig config);

  const PolicyConfig& config() const { return config_; }
  const BandPrices& band() const { return band_; }
  const EscalationState& escalation() const { return escalation_; }
  std::int64_t carryover() const { return carryover_; }
  const AuthorityDay& today() const { return day_; }
  std::optional<Date> standing_maturity() const;

  /// Starts a new day; resets the daily report.
  void open_day();

  void refresh_standing(Market& market, LedgerState& state);

  /// Plans reissuance of today's redemptions plus yesterday's unsold amount.
  const ReissuePlan& plan_reissue(const LedgerState& state, std::int64_t redeemed);
  void post_reissue(Market& market, LedgerState& state);

  /// While active, sells once per step: the day after activation at step 0,
  /// then every step_interval days at the next step.
  void post_escalation(Market& market, LedgerState& state);

  /// Offers agents can see before they trade.
  std::vector<AuctionOffer> offers() const;

  /// Reads today's fills, withdraws unsold authority sales, computes the
  /// carryover, then evaluates the crunch and the escalation stop rule.
  void close_day(Market& market, LedgerState& state, std::span<const AuctionResult> results);

 private:
  PolicyConfig config_;
  BandPrices band_;
  std::optional<StandingOrders> standing_;
  ReissuePlan plan_;
  std::vector<OrderId> reissue_orders_;
  std::optional<OrderId> escalation_order_;
  std::optional<AuctionOffer> escalation_offer_;
  EscalationState escalation_;
  std::deque<std::int64_t> recent_sellbacks_;
  std::int64_t carryover_ = 0;
  AuthorityDay day_;
};

}  // namespace elastic

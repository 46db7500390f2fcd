#pragma once

// Market participants. Each agent is a pure function of its spec, what it
// can observe today, and its random substream; it returns day orders.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "elastic/authority.hpp"
#include "elastic/curve.hpp"
#include "elastic/market.hpp"
#include "elastic/rng.hpp"

namespace elastic {

enum class Archetype { kSaver, kYieldSeeker, kArbitrageur };

std::string_view to_string(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view name);

/// Holds cash plus a ladder of short bonds. Random liquidity shocks make it
/// dump short bonds for a while; otherwise it invests surplus cash.
struct SaverParams {
  double shock_lambda = 0.02;        // shocks per day before multipliers
  double shock_size_min = 0.25;      // fraction of non-tau short bonds sold
  double shock_size_max = 0.75;
  std::int64_t stress_days = 10;     // a shock keeps the saver selling this long
  double target_cash_ratio = 0.2;    // cash kept idle, as a share of wealth at face
  std::size_t preferred_bucket = 1;  // reissue bucket it bids for
  double offer_share = 0.5;          // share of surplus cash put into offers
  double fire_sale_premium = 0.005;  // extra yield conceded on stressed sales

  bool operator==(const SaverParams&) const = default;
};

/// Buys long bonds when they yield more than its reservation rate.
struct YieldSeekerParams {
  double reservation_rate = 0.03;
  double budget_fraction = 0.5;

  bool operator==(const YieldSeekerParams&) const = default;
};

/// Trades short maturities against the tau rate: buys short bonds yielding
/// at least the tau rate, and sells tau bonds back at p- when the rate sits
/// at the top of the band.
struct ArbitrageurParams {
  double margin = 0.0005;
  std::int64_t max_days = 30;
  double budget_fraction = 0.5;

  bool operator==(const ArbitrageurParams&) const = default;
};

using AgentParams = std::variant<SaverParams, YieldSeekerParams, ArbitrageurParams>;

struct AgentSpec {
  AgentParams params;
  AccountId account;
  std::string stream;  // unique substream name

  Archetype archetype() const { return static_cast<Archetype>(params.index()); }
  void validate() const;
};

/// Everything an agent may look at before trading.
struct Observation {
  Date today;
  YieldCurve curve;
  Money free_cash;
  std::map<Date, std::int64_t> free_bonds;  // maturity -> unreserved count
  BandConfig band_config;
  BandPrices band;
  std::vector<AuctionOffer> offers;
  std::optional<Rate> rate_tau;       // last clearing of the tau bond, if any
  std::vector<double> shock_window;   // saver lambda multipliers, oldest first, last is today
  DurationDistribution dist = DurationDistribution::quartiles();
};

/// Orders the agent wants to place today. Buys never commit more escrow than
/// the free cash observed, sells never exceed free holdings. Every order
/// expires at the end of the day.
std::vector<OrderRequest> agent_step(const AgentSpec& spec, const Observation& obs,
                                     const StreamRng& rng);

/// Whether a saver is under a liquidity shock today, and how much of its
/// non-tau short bonds it sells. Exposed for tests.
struct SaverStress {
  bool stressed = false;
  double sell_fraction = 0.0;
};
SaverStress saver_stress(const SaverParams& p, const Observation& obs, const StreamRng& rng);

}  // namespace elastic

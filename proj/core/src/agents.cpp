#include "elastic/agents.hpp"

#include <algorithm>
#include <cmath>

namespace elastic {
namespace {

constexpr double kRateSlack = 1e-7;

// Running cash budget so that a batch of buys never over-commits escrow.
class Budget {
 public:
  explicit Budget(Money cash) : left_(std::max<std::int64_t>(cash.cents, 0)) {}

  std::int64_t left() const { return left_; }

  /// Largest quantity <= want affordable within `cap` cents at `limit`.
  std::int64_t take(Price limit, std::int64_t want, std::int64_t cap) {
    const std::int64_t per = escrow_per_bond(limit).cents;
    const std::int64_t qty = std::min(want, std::min(cap, left_) / per);
    if (qty <= 0) return 0;
    left_ -= qty * per;
    return qty;
  }

 private:
  std::int64_t left_;
};

std::int64_t fraction_of(std::int64_t cents, double fraction) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(cents) * fraction));
}

OrderRequest day_order(const AgentSpec& spec, const Observation& obs, Side side, Date maturity,
                       std::int64_t qty, Price limit) {
  return OrderRequest{spec.account, side, maturity, qty, limit, false, obs.today};
}

Date tau_maturity(const Observation& obs) { return obs.today + obs.band_config.tau.days(); }

std::vector<OrderRequest> saver_step(const AgentSpec& spec, const SaverParams& p,
                                     const Observation& obs, const StreamRng& rng) {
  std::vector<OrderRequest> out;
  const Date tau_date = tau_maturity(obs);
  const SaverStress stress = saver_stress(p, obs, rng);

  if (stress.stressed) {
    for (const auto& [maturity, qty] : obs.free_bonds) {
      if (qty <= 0 || maturity <= obs.today) continue;
      if (maturity == tau_date) {
        out.push_back(day_order(spec, obs, Side::kSell, maturity, qty, obs.band.minus));
        continue;
      }
      const DurationYears d = duration_of(maturity, obs.today);
      if (d.years() > 1.0 / 12.0) continue;
      const auto sell = static_cast<std::int64_t>(std::ceil(static_cast<double>(qty) *
                                                            stress.sell_fraction));
      if (sell <= 0) continue;
      const Rate r{obs.band_config.target.per_year + obs.band_config.half_width.per_year +
                   p.fire_sale_premium};
      out.push_back(day_order(spec, obs, Side::kSell, maturity, std::min(sell, qty),
                              price_from_rate(r, d)));
    }
    return out;
  }

  std::int64_t face = 0;
  for (const auto& [maturity, qty] : obs.free_bonds) face += qty * kCentsPerBond;
  const std::int64_t wealth = obs.free_cash.cents + face;
  const std::int64_t surplus = obs.free_cash.cents - fraction_of(wealth, p.target_cash_ratio);
  if (surplus <= 0) return out;

  Budget budget(Money{surplus});
  const std::int64_t offer_cap = fraction_of(surplus, p.offer_share);
  std::int64_t offer_spent = 0;
  for (const AuctionOffer& offer : obs.offers) {
    if (offer.kind != OfferKind::kReissue) continue;
    const DurationYears d = duration_of(offer.maturity, obs.today);
    if (obs.dist.bucket_of(d) != p.preferred_bucket) continue;
    const Price bid = price_from_rate(
        Rate{obs.band_config.target.per_year + obs.band_config.half_width.per_year}, d);
    if (bid < offer.reserve) continue;
    const std::int64_t before = budget.left();
    const std::int64_t qty = budget.take(bid, offer.qty, offer_cap - offer_spent);
    if (qty == 0) continue;
    offer_spent += before - budget.left();
    out.push_back(day_order(spec, obs, Side::kBuy, offer.maturity, qty, bid));
  }
  const std::int64_t park = budget.take(obs.band.plus, kUnboundedQty, budget.left());
  if (park > 0) out.push_back(day_order(spec, obs, Side::kBuy, tau_date, park, obs.band.plus));
  return out;
}

std::vector<OrderRequest> yield_seeker_step(const AgentSpec& spec, const YieldSeekerParams& p,
                                            const Observation& obs) {
  const std::size_t longest = obs.dist.buckets.size() - 1;
  struct Candidate {
    Date maturity;
    Rate rate;
    std::int64_t cap;
  };
  std::optional<Candidate> best;
  auto consider = [&](Date maturity, Price price, std::int64_t cap) {
    if (maturity <= obs.today) return;
    const DurationYears d = duration_of(maturity, obs.today);
    if (obs.dist.bucket_of(d) != longest) return;
    const Rate r = implied_rate(price, d);
    if (!best || r.per_year > best->rate.per_year) best = Candidate{maturity, r, cap};
  };
  for (const AuctionOffer& offer : obs.offers) consider(offer.maturity, offer.reserve, offer.qty);
  for (const auto& [maturity, point] : obs.curve.points) {
    consider(maturity, point.price, kUnboundedQty);
  }
  if (!best || !(best->rate.per_year > p.reservation_rate)) return {};

  const DurationYears d = duration_of(best->maturity, obs.today);
  const Price bid = price_from_rate(Rate{p.reservation_rate}, d);
  Budget budget(obs.free_cash);
  const std::int64_t qty =
      budget.take(bid, best->cap, fraction_of(obs.free_cash.cents, p.budget_fraction));
  if (qty == 0) return {};
  return {day_order(spec, obs, Side::kBuy, best->maturity, qty, bid)};
}

std::vector<OrderRequest> arbitrageur_step(const AgentSpec& spec, const ArbitrageurParams& p,
                                           const Observation& obs) {
  std::vector<OrderRequest> out;
  const Date tau_date = tau_maturity(obs);
  const double top = obs.band_config.target.per_year + obs.band_config.half_width.per_year;
  const double ref = obs.rate_tau ? obs.rate_tau->per_year : obs.band_config.target.per_year;
  const bool scarce = ref >= top - kRateSlack;

  if (scarce) {
    const auto it = obs.free_bonds.find(tau_date);
    if (it != obs.free_bonds.end() && it->second > 0) {
      out.push_back(day_order(spec, obs, Side::kSell, tau_date, it->second, obs.band.minus));
    }
  }

  Budget budget(obs.free_cash);
  const std::int64_t cap = fraction_of(obs.free_cash.cents, p.budget_fraction);
  std::int64_t spent = 0;
  for (const AuctionOffer& offer : obs.offers) {
    const std::int64_t days = offer.maturity - obs.today;
    if (days <= obs.band_config.tau.days() || days > p.max_days) continue;
    const DurationYears d(days);
    if (implied_rate(offer.reserve, d).per_year < ref - p.margin) continue;
    const std::int64_t before = budget.left();
    const std::int64_t qty = budget.take(offer.reserve, offer.qty, cap - spent);
    if (qty == 0) continue;
    spent += before - budget.left();
    out.push_back(day_order(spec, obs, Side::kBuy, offer.maturity, qty, offer.reserve));
  }
  return out;
}

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::kSaver: return "saver";
    case Archetype::kYieldSeeker: return "yield_seeker";
    case Archetype::kArbitrageur: return "arbitrageur";
  }
  return "?";
}

std::optional<Archetype> parse_archetype(std::string_view name) {
  if (name == "saver") return Archetype::kSaver;
  if (name == "yield_seeker") return Archetype::kYieldSeeker;
  if (name == "arbitrageur") return Archetype::kArbitrageur;
  return std::nullopt;
}

void AgentSpec::validate() const {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kValidation, "agent " + stream + ": " + what);
  };
  if (account == kAuthority) fail("account 0 is reserved for the authority");
  if (const auto* s = std::get_if<SaverParams>(&params)) {
    if (!(s->shock_lambda >= 0.0) || !std::isfinite(s->shock_lambda)) fail("shock_lambda < 0");
    if (!(s->shock_size_min >= 0.0 && s->shock_size_min <= s->shock_size_max &&
          s->shock_size_max <= 1.0)) {
      fail("need 0 <= shock_size_min <= shock_size_max <= 1");
    }
    if (s->stress_days < 1) fail("stress_days < 1");
    if (!(s->target_cash_ratio >= 0.0 && s->target_cash_ratio <= 1.0)) {
      fail("target_cash_ratio outside [0, 1]");
    }
    if (!(s->offer_share >= 0.0 && s->offer_share <= 1.0)) fail("offer_share outside [0, 1]");
    if (!(s->fire_sale_premium >= 0.0)) fail("fire_sale_premium < 0");
  } else if (const auto* y = std::get_if<YieldSeekerParams>(&params)) {
    if (!(y->reservation_rate >= 0.0)) fail("reservation_rate < 0");
    if (!(y->budget_fraction > 0.0 && y->budget_fraction <= 1.0)) {
      fail("budget_fraction outside (0, 1]");
    }
  } else if (const auto* a = std::get_if<ArbitrageurParams>(&params)) {
    if (!(a->margin >= 0.0)) fail("margin < 0");
    if (a->max_days < 1) fail("max_days < 1");
    if (!(a->budget_fraction > 0.0 && a->budget_fraction <= 1.0)) {
      fail("budget_fraction outside (0, 1]");
    }
  }
}

SaverStress saver_stress(const SaverParams& p, const Observation& obs, const StreamRng& rng) {
  // Day today-k uses shock_window[size-1-k]; missing entries count as 1.
  const std::size_t n = obs.shock_window.size();
  for (std::int64_t k = 0; k < p.stress_days; ++k) {
    const Date day = obs.today - k;
    const double mult =
        static_cast<std::size_t>(k) < n ? obs.shock_window[n - 1 - static_cast<std::size_t>(k)]
                                        : 1.0;
    std::mt19937_64 gen = rng.for_day(day);
    const double u = uniform01(gen);
    const double size = uniform01(gen);
    if (u < -std::expm1(-p.shock_lambda * mult)) {
      return SaverStress{true,
                         p.shock_size_min + (p.shock_size_max - p.shock_size_min) * size};
    }
  }
  return {};
}

std::vector<OrderRequest> agent_step(const AgentSpec& spec, const Observation& obs,
                                     const StreamRng& rng) {
  return std::visit(
      [&](const auto& p) -> std::vector<OrderRequest> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SaverParams>) {
          return saver_step(spec, p, obs, rng);
        } else if constexpr (std::is_same_v<P, YieldSeekerParams>) {
          return yield_seeker_step(spec, p, obs);
        } else {
          return arbitrageur_step(spec, p, obs);
        }
      },
      spec.params);
}

}  // namespace elastic

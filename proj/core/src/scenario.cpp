#include "elastic/scenario.hpp"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace elastic {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kValidation, (path.empty() ? std::string("scenario") : path) + ": " + what);
}

// A JSON value plus the field path used in error messages.
class Node {
 public:
  Node(const json& value, std::string path) : v_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!v_.is_object()) fail(path_, "expected an object");
    for (const auto& [key, value] : v_.items()) {
      bool known = false;
      for (std::string_view a : allowed) known = known || key == a;
      if (!known) fail(child_path(key), "unknown field");
    }
  }

  bool has(std::string_view key) const { return v_.contains(std::string(key)); }
  Node at(std::string_view key) const {
    return Node(v_.at(std::string(key)), child_path(std::string(key)));
  }

  std::vector<Node> elements() const {
    if (!v_.is_array()) fail(path_, "expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      out.emplace_back(v_[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  std::int64_t as_int() const {
    if (v_.is_number_unsigned() &&
        v_.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      fail(path_, "integer out of range");
    }
    if (!v_.is_number_integer()) fail(path_, "expected an integer");
    return v_.get<std::int64_t>();
  }
  std::uint64_t as_u64() const {
    if (v_.is_number_unsigned()) return v_.get<std::uint64_t>();
    if (v_.is_number_integer() && v_.get<std::int64_t>() >= 0) return v_.get<std::uint64_t>();
    fail(path_, "expected a non-negative integer");
  }
  double as_double() const {
    if (!v_.is_number()) fail(path_, "expected a number");
    return v_.get<double>();
  }
  bool as_bool() const {
    if (!v_.is_boolean()) fail(path_, "expected true or false");
    return v_.get<bool>();
  }
  std::string as_string() const {
    if (!v_.is_string()) fail(path_, "expected a string");
    return v_.get<std::string>();
  }

 private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& v_;
  std::string path_;
};

template <typename T, typename Get>
void read(const Node& n, std::string_view key, T& out, Get get) {
  if (n.has(key)) out = get(n.at(key));
}

auto as_int = [](const Node& n) { return n.as_int(); };
auto as_double = [](const Node& n) { return n.as_double(); };

AgentParams parse_params(Archetype a, const Node* params) {
  switch (a) {
    case Archetype::kSaver: {
      SaverParams p;
      if (!params) return p;
      params->expect_object({"shock_lambda", "shock_size_min", "shock_size_max", "stress_days",
                             "target_cash_ratio", "preferred_bucket", "offer_share",
                             "fire_sale_premium"});
      read(*params, "shock_lambda", p.shock_lambda, as_double);
      read(*params, "shock_size_min", p.shock_size_min, as_double);
      read(*params, "shock_size_max", p.shock_size_max, as_double);
      read(*params, "stress_days", p.stress_days, as_int);
      read(*params, "target_cash_ratio", p.target_cash_ratio, as_double);
      if (params->has("preferred_bucket")) {
        const std::int64_t b = params->at("preferred_bucket").as_int();
        if (b < 0) fail(params->at("preferred_bucket").path(), "must be non-negative");
        p.preferred_bucket = static_cast<std::size_t>(b);
      }
      read(*params, "offer_share", p.offer_share, as_double);
      read(*params, "fire_sale_premium", p.fire_sale_premium, as_double);
      return p;
    }
    case Archetype::kYieldSeeker: {
      YieldSeekerParams p;
      if (!params) return p;
      params->expect_object({"reservation_rate", "budget_fraction"});
      read(*params, "reservation_rate", p.reservation_rate, as_double);
      read(*params, "budget_fraction", p.budget_fraction, as_double);
      return p;
    }
    case Archetype::kArbitrageur: {
      ArbitrageurParams p;
      if (!params) return p;
      params->expect_object({"margin", "max_days", "budget_fraction"});
      read(*params, "margin", p.margin, as_double);
      read(*params, "max_days", p.max_days, as_int);
      read(*params, "budget_fraction", p.budget_fraction, as_double);
      return p;
    }
  }
  return SaverParams{};
}

std::vector<std::string> parse_names(const Node& n) {
  std::vector<std::string> out;
  for (const Node& e : n.elements()) out.push_back(e.as_string());
  return out;
}

ScenarioConfig from_json(const json& root) {
  const Node top(root, "");
  top.expect_object({"days", "seed", "mode", "band", "distribution", "escalation", "reissue",
                     "rule1_enabled", "agents", "initial_issuance", "shocks", "ledger"});
  ScenarioConfig c;
  read(top, "days", c.days, as_int);
  if (top.has("seed")) c.seed = top.at("seed").as_u64();
  if (top.has("mode")) {
    const std::string m = top.at("mode").as_string();
    if (m == "central") {
      c.mode = Mode::kCentral;
    } else if (m == "ledger") {
      c.mode = Mode::kLedger;
    } else {
      fail("mode", "expected \"central\" or \"ledger\"");
    }
  }

  if (top.has("band")) {
    const Node b = top.at("band");
    b.expect_object({"tau_days", "target_rate", "half_width"});
    if (b.has("tau_days")) c.policy.band.tau = DurationYears(b.at("tau_days").as_int());
    read(b, "target_rate", c.policy.band.target.per_year, as_double);
    read(b, "half_width", c.policy.band.half_width.per_year, as_double);
  }
  if (top.has("distribution")) {
    c.policy.dist.buckets.clear();
    for (const Node& e : top.at("distribution").elements()) {
      e.expect_object({"lower_years", "upper_years", "mass"});
      DurationBucket bucket;
      read(e, "lower_years", bucket.lower_years, as_double);
      if (!e.has("upper_years")) fail(e.path() + ".upper_years", "required");
      bucket.upper_years = e.at("upper_years").as_double();
      if (!e.has("mass")) fail(e.path() + ".mass", "required");
      bucket.mass = e.at("mass").as_double();
      c.policy.dist.buckets.push_back(bucket);
    }
  }
  if (top.has("escalation")) {
    const Node e = top.at("escalation");
    e.expect_object({"base_fraction", "step_interval_days", "cap_fraction"});
    read(e, "base_fraction", c.policy.escalation.base_fraction, as_double);
    read(e, "step_interval_days", c.policy.escalation.step_interval_days, as_int);
    read(e, "cap_fraction", c.policy.escalation.cap_fraction, as_double);
  }
  if (top.has("reissue")) {
    const Node r = top.at("reissue");
    r.expect_object({"rate_cap"});
    read(r, "rate_cap", c.policy.reissue_rate_cap.per_year, as_double);
  }
  if (top.has("rule1_enabled")) c.policy.rule1_enabled = top.at("rule1_enabled").as_bool();

  if (!top.has("agents")) fail("agents", "required");
  for (const Node& g : top.at("agents").elements()) {
    g.expect_object({"name", "archetype", "count", "money_cents", "params"});
    if (!g.has("archetype")) fail(g.path() + ".archetype", "required");
    const std::string kind = g.at("archetype").as_string();
    const auto archetype = parse_archetype(kind);
    if (!archetype) fail(g.path() + ".archetype", "unknown archetype " + kind);
    AgentGroup group;
    group.name = g.has("name") ? g.at("name").as_string() : kind;
    read(g, "count", group.count, as_int);
    read(g, "money_cents", group.money.cents, as_int);
    if (g.has("params")) {
      const Node p = g.at("params");
      group.params = parse_params(*archetype, &p);
    } else {
      group.params = parse_params(*archetype, nullptr);
    }
    c.agents.push_back(std::move(group));
  }

  if (top.has("initial_issuance")) {
    const Node n = top.at("initial_issuance");
    n.expect_object({"total", "holders", "lines"});
    read(n, "total", c.issuance.total, as_int);
    if (n.has("holders")) c.issuance.holders = parse_names(n.at("holders"));
    if (n.has("lines")) {
      for (const Node& l : n.at("lines").elements()) {
        l.expect_object({"maturity_day", "qty", "account"});
        IssuanceLine line;
        for (std::string_view key : {"maturity_day", "qty", "account"}) {
          if (!l.has(key)) fail(l.path() + "." + std::string(key), "required");
        }
        line.maturity_day = l.at("maturity_day").as_int();
        line.qty = l.at("qty").as_int();
        const std::int64_t account = l.at("account").as_int();
        if (account < 0 || account > std::numeric_limits<std::uint32_t>::max()) {
          fail(l.path() + ".account", "out of range");
        }
        line.account = static_cast<std::uint32_t>(account);
        c.issuance.lines.push_back(line);
      }
    }
  }

  if (top.has("shocks")) {
    for (const Node& s : top.at("shocks").elements()) {
      s.expect_object({"from_day", "to_day", "saver_lambda_multiplier"});
      ShockOverride shock;
      for (std::string_view key : {"from_day", "to_day"}) {
        if (!s.has(key)) fail(s.path() + "." + std::string(key), "required");
      }
      shock.from_day = s.at("from_day").as_int();
      shock.to_day = s.at("to_day").as_int();
      read(s, "saver_lambda_multiplier", shock.saver_lambda_multiplier, as_double);
      c.shocks.push_back(shock);
    }
  }

  if (top.has("ledger")) {
    const Node l = top.at("ledger");
    l.expect_object({"miners", "miner_money_cents", "block_capacity", "policy", "censor"});
    read(l, "miners", c.ledger.miners, as_int);
    read(l, "miner_money_cents", c.ledger.miner_money.cents, as_int);
    if (l.has("block_capacity")) {
      const std::int64_t cap = l.at("block_capacity").as_int();
      if (cap < 1) fail("ledger.block_capacity", "must be at least 1");
      c.ledger.block_capacity = static_cast<std::size_t>(cap);
    }
    if (l.has("policy")) {
      const std::string p = l.at("policy").as_string();
      if (p == "honest") {
        c.ledger.policy = MinerPolicyKind::kHonest;
      } else if (p == "censor") {
        c.ledger.policy = MinerPolicyKind::kCensor;
      } else if (p == "self_insert") {
        c.ledger.policy = MinerPolicyKind::kSelfInsert;
      } else {
        fail("ledger.policy", "expected honest, censor or self_insert");
      }
    }
    if (l.has("censor")) c.ledger.censor = parse_names(l.at("censor"));
  }

  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, e.what());
  }
  return c;
}

json params_to_json(const AgentParams& params) {
  json j = json::object();
  if (const auto* s = std::get_if<SaverParams>(&params)) {
    j["shock_lambda"] = s->shock_lambda;
    j["shock_size_min"] = s->shock_size_min;
    j["shock_size_max"] = s->shock_size_max;
    j["stress_days"] = s->stress_days;
    j["target_cash_ratio"] = s->target_cash_ratio;
    j["preferred_bucket"] = s->preferred_bucket;
    j["offer_share"] = s->offer_share;
    j["fire_sale_premium"] = s->fire_sale_premium;
  } else if (const auto* y = std::get_if<YieldSeekerParams>(&params)) {
    j["reservation_rate"] = y->reservation_rate;
    j["budget_fraction"] = y->budget_fraction;
  } else if (const auto* a = std::get_if<ArbitrageurParams>(&params)) {
    j["margin"] = a->margin;
    j["max_days"] = a->max_days;
    j["budget_fraction"] = a->budget_fraction;
  }
  return j;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kValidation, std::string("scenario is not valid JSON: ") + e.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) { return from_json(parse_json(text)); }

ScenarioConfig parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["days"] = c.days;
  j["seed"] = c.seed;
  j["mode"] = to_string(c.mode);
  j["band"] = {{"tau_days", c.policy.band.tau.days()},
               {"target_rate", c.policy.band.target.per_year},
               {"half_width", c.policy.band.half_width.per_year}};
  j["distribution"] = json::array();
  for (const DurationBucket& b : c.policy.dist.buckets) {
    j["distribution"].push_back(
        {{"lower_years", b.lower_years}, {"upper_years", b.upper_years}, {"mass", b.mass}});
  }
  j["escalation"] = {{"base_fraction", c.policy.escalation.base_fraction},
                     {"step_interval_days", c.policy.escalation.step_interval_days},
                     {"cap_fraction", c.policy.escalation.cap_fraction}};
  j["reissue"] = {{"rate_cap", c.policy.reissue_rate_cap.per_year}};
  j["rule1_enabled"] = c.policy.rule1_enabled;
  j["agents"] = json::array();
  for (const AgentGroup& g : c.agents) {
    json group;
    group["name"] = g.name;
    group["archetype"] = to_string(static_cast<Archetype>(g.params.index()));
    group["count"] = g.count;
    group["money_cents"] = g.money.cents;
    group["params"] = params_to_json(g.params);
    j["agents"].push_back(std::move(group));
  }
  json lines = json::array();
  for (const IssuanceLine& l : c.issuance.lines) {
    lines.push_back({{"maturity_day", l.maturity_day}, {"qty", l.qty}, {"account", l.account}});
  }
  j["initial_issuance"] = {
      {"total", c.issuance.total}, {"holders", c.issuance.holders}, {"lines", lines}};
  j["shocks"] = json::array();
  for (const ShockOverride& s : c.shocks) {
    j["shocks"].push_back({{"from_day", s.from_day},
                           {"to_day", s.to_day},
                           {"saver_lambda_multiplier", s.saver_lambda_multiplier}});
  }
  j["ledger"] = {{"miners", c.ledger.miners},
                 {"miner_money_cents", c.ledger.miner_money.cents},
                 {"block_capacity", c.ledger.block_capacity},
                 {"policy", to_string(c.ledger.policy)},
                 {"censor", c.ledger.censor}};
  return j.dump(2) + "\n";
}

std::string override_field(std::string_view text, std::string_view path, std::string_view value) {
  json root = parse_json(text);
  json* node = &root;
  std::string key;
  std::string walked;
  auto descend_key = [&](const std::string& k) {
    if (k.empty()) fail(std::string(path), "malformed field path");
    // Missing intermediate objects are created on the way down.
    if (!node->is_object() && !node->is_null()) fail(walked, "not an object");
    walked += walked.empty() ? k : "." + k;
    node = &(*node)[k];
  };
  for (std::size_t i = 0; i < path.size();) {
    const char ch = path[i];
    if (ch == '.') {
      descend_key(key);
      key.clear();
      ++i;
    } else if (ch == '[') {
      if (!key.empty()) {
        descend_key(key);
        key.clear();
      }
      const std::size_t close = path.find(']', i);
      if (close == std::string_view::npos) fail(std::string(path), "unclosed [");
      const std::string_view digits = path.substr(i + 1, close - i - 1);
      std::size_t index = 0;
      const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (ec != std::errc{} || end != digits.data() + digits.size()) {
        fail(std::string(path), "bad index");
      }
      if (!node->is_array() || index >= node->size()) {
        fail(walked + "[" + std::to_string(index) + "]", "no such element");
      }
      walked += "[" + std::to_string(index) + "]";
      node = &(*node)[index];
      i = close + 1;
      if (i < path.size() && path[i] == '.') ++i;
    } else {
      key += ch;
      ++i;
    }
  }
  if (!key.empty()) descend_key(key);
  json parsed = json::parse(value, nullptr, false);
  *node = parsed.is_discarded() ? json(std::string(value)) : parsed;
  return root.dump(2) + "\n";
}

}  // namespace elastic

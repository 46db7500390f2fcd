#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "elastic/output.hpp"
#include "elastic/scenario.hpp"

using namespace elastic;

namespace {

constexpr std::string_view kMinimal = R"({"agents": [{"name": "s", "archetype": "saver"}]})";

std::string error_text(std::string_view text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Scenario, MinimalTakesDefaults) {
  const ScenarioConfig cfg = parse_scenario(kMinimal);
  EXPECT_EQ(cfg.days, 365);
  EXPECT_EQ(cfg.mode, Mode::kCentral);
  EXPECT_EQ(cfg.policy, PolicyConfig{});
  ASSERT_EQ(cfg.agents.size(), 1u);
  EXPECT_EQ(cfg.agents[0].count, 1);
  EXPECT_EQ(std::get<SaverParams>(cfg.agents[0].params), SaverParams{});
}

TEST(Scenario, MassesMustSumToOne) {
  const std::string text = R"({"agents": [{"name": "s", "archetype": "saver"}],
    "distribution": [{"lower_years": 0, "upper_years": 0.0833333333333333, "mass": 0.3},
                     {"lower_years": 0.0833333333333333, "upper_years": 1, "mass": 0.2},
                     {"lower_years": 1, "upper_years": 4, "mass": 0.2},
                     {"lower_years": 4, "upper_years": 10, "mass": 0.2}]})";
  EXPECT_NE(error_text(text).find("distribution"), std::string::npos);
}

TEST(Scenario, UnknownFieldIsNamed) {
  EXPECT_NE(error_text(R"({"agents": [{"name": "s", "archetype": "saver"}], "band": {"tau": 7}})")
                .find("band.tau"),
            std::string::npos);
  EXPECT_NE(error_text(R"({"agents": [{"name": "s", "archetype": "saver", "params": {"lambda": 1}}]})")
                .find("agents[0].params.lambda"),
            std::string::npos);
}

TEST(Scenario, RejectsBadValues) {
  error_text(R"({"agents": []})");
  error_text(R"({"agents": [{"name": "s", "archetype": "banker"}]})");
  error_text(R"({"days": 0, "agents": [{"name": "s", "archetype": "saver"}]})");
  error_text(R"({"days": "many", "agents": [{"name": "s", "archetype": "saver"}]})");
  error_text(R"({"mode": "batch", "agents": [{"name": "s", "archetype": "saver"}]})");
  error_text("not json");
}

TEST(Scenario, RoundTripsThroughJson) {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  cfg.days = 42;
  cfg.seed = 0xFFFF'FFFF'FFFF'FFFFull;
  cfg.mode = Mode::kLedger;
  cfg.policy.band.half_width = Rate{0.0015};
  cfg.agents.push_back(AgentGroup{"y", 3, Money{77}, YieldSeekerParams{0.041, 0.25}});
  cfg.agents.push_back(AgentGroup{"a", 2, Money{5}, ArbitrageurParams{0.0007, 21, 0.3}});
  cfg.issuance.total = 12;
  cfg.issuance.holders = {"s", "y"};
  cfg.issuance.lines.push_back(IssuanceLine{30, 4, 2});
  cfg.shocks.push_back(ShockOverride{3, 9, 2.5});
  cfg.ledger.policy = MinerPolicyKind::kCensor;
  cfg.ledger.censor = {"a"};
  EXPECT_EQ(parse_scenario(scenario_to_json(cfg)), cfg);
}

TEST(Scenario, OverrideField) {
  const std::string base = std::string(kMinimal);
  EXPECT_EQ(parse_scenario(override_field(base, "days", "10")).days, 10);
  EXPECT_DOUBLE_EQ(
      parse_scenario(override_field(base, "band.half_width", "0.002")).policy.band.half_width.per_year,
      0.002);
  EXPECT_EQ(parse_scenario(override_field(base, "mode", "ledger")).mode, Mode::kLedger);
  const ScenarioConfig c =
      parse_scenario(override_field(base, "agents[0].params.shock_lambda", "0.5"));
  EXPECT_DOUBLE_EQ(std::get<SaverParams>(c.agents[0].params).shock_lambda, 0.5);
  EXPECT_THROW(override_field(base, "agents[3].count", "1"), Error);
}

TEST(Scenario, MissingFileIsIoError) {
  try {
    parse_scenario_file("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Output, FixedFormatting) {
  EXPECT_EQ(format_fixed(0.02), "0.020000000");
  EXPECT_EQ(format_fixed(-1.5, 2), "-1.50");
}

TEST(Output, OneRowCsv) {
  MetricsRow r;
  r.day = 1;
  r.money_supply = Money{123};
  r.buckets = {1, 2, 3, 4};
  const std::string csv = metrics_csv({r});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.substr(0, kMetricsHeader.size()), kMetricsHeader);
  EXPECT_NE(csv.find("\n1,123,"), std::string::npos);
}

TEST(Output, EmitWritesArtifacts) {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  cfg.days = 2;
  const RunResult run = run_scenario(cfg, true);
  const auto dir = std::filesystem::temp_directory_path() / "elastic_emit_test";
  std::filesystem::remove_all(dir);
  const RunOutput out = emit(run, cfg, dir);
  EXPECT_TRUE(std::filesystem::exists(out.metrics_csv));
  EXPECT_EQ(parse_scenario(slurp(out.config_json)), cfg);
  EXPECT_NE(slurp(out.summary_json).find("\"days\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

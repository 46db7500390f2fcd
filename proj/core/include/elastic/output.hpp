#pragma once

// Run artifacts: metrics.csv, summary.json, config.json and an optional
// audit.log. Formatting is fixed and locale independent; lines end in LF.

#include <filesystem>
#include <string>
#include <vector>

#include "elastic/simulate.hpp"

namespace elastic {

inline constexpr std::string_view kMetricsHeader =
    "day,money_supply_cents,rate_tau,outstanding,b0,b1,b2,b3,l1_dist,esc_step,"
    "authority_net_cents,miner_fees_cents,dropped_orders";

/// Fixed-point decimal with `digits` fractional digits.
std::string format_fixed(double value, int digits = 9);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string summary_json(const Summary& summary);

struct RunOutput {
  std::filesystem::path metrics_csv;
  std::filesystem::path summary_json;
  std::filesystem::path config_json;
  std::filesystem::path audit_log;  // empty when no log was written
};

/// Writes the run into `out_dir`, creating it if needed. Throws kIo.
RunOutput emit(const RunResult& run, const ScenarioConfig& config,
               const std::filesystem::path& out_dir);

}  // namespace elastic

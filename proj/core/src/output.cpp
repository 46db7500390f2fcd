#include "elastic/output.hpp"

#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "elastic/scenario.hpp"

namespace elastic {
namespace {

using json = nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

// Rounded to nine digits so summary values match the CSV.
double rounded(double v) {
  const std::string text = format_fixed(v);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(rounded(*v)) : json(nullptr); }

}  // namespace

std::string format_fixed(double value, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const MetricsRow& r : rows) {
    out += std::to_string(r.day);
    out += ',' + std::to_string(r.money_supply.cents);
    out += ',';
    if (r.rate_tau) out += format_fixed(r.rate_tau->per_year);
    out += ',' + std::to_string(r.outstanding);
    for (std::size_t b = 0; b < 4; ++b) {
      out += ',' + std::to_string(b < r.buckets.size() ? r.buckets[b] : 0);
    }
    out += ',' + format_fixed(r.l1);
    out += ',';
    if (r.esc_step) out += std::to_string(*r.esc_step);
    out += ',' + std::to_string(r.authority_net.cents);
    out += ',' + std::to_string(r.miner_fees.cents);
    out += ',' + std::to_string(r.dropped_orders);
    out += '\n';
  }
  return out;
}

std::string summary_json(const Summary& s) {
  json j;
  j["days"] = s.days;
  j["min_rate_tau"] = optional_number(s.min_rate_tau);
  j["max_rate_tau"] = optional_number(s.max_rate_tau);
  j["rate_tau_days"] = s.rate_tau_days;
  j["total_issuance_cents"] = s.total_issuance.cents;
  j["days_in_escalation"] = s.days_in_escalation;
  j["escalation_episodes"] = s.escalation_episodes;
  j["final_l1"] = rounded(s.final_l1);
  j["initial_money_supply_cents"] = s.initial_money_supply.cents;
  j["final_money_supply_cents"] = s.final_money_supply.cents;
  j["final_outstanding"] = s.final_outstanding;
  j["miner_fees_cents"] = s.miner_fees.cents;
  j["dropped_orders"] = s.dropped_orders;
  return j.dump(2) + "\n";
}

RunOutput emit(const RunResult& run, const ScenarioConfig& config,
               const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  RunOutput out{out_dir / "metrics.csv", out_dir / "summary.json", out_dir / "config.json", {}};
  write_file(out.metrics_csv, metrics_csv(run.rows));
  write_file(out.summary_json, summary_json(run.summary));
  write_file(out.config_json, scenario_to_json(config));
  if (!run.audit_log.empty()) {
    out.audit_log = out_dir / "audit.log";
    std::string text;
    for (const std::string& line : run.audit_log) text += line + '\n';
    write_file(out.audit_log, text);
  }
  return out;
}

}  // namespace elastic

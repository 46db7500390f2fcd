// elastic-sim: run, validate and sweep scenarios.
//
// Exit codes: 0 success, 1 validation or I/O error, 2 invariant violation.

#include <algorithm>
#include <cctype>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "elastic/output.hpp"
#include "elastic/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kViolation = 2;

int exit_code_for(const elastic::Error& e) {
  return e.code() == elastic::ErrorCode::kInvariantViolation ? kViolation : kInvalid;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw elastic::Error(elastic::ErrorCode::kIo, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Directory-safe rendering of a sweep value.
std::string slug(const std::string& value) {
  std::string out;
  for (char c : value) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out += keep ? c : '_';
  }
  return out.empty() ? "_" : out;
}

std::vector<std::string> split_values(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

int run_one(const elastic::ScenarioConfig& config, const std::string& out_dir, bool audit) {
  const elastic::RunResult run = elastic::run_scenario(config, audit);
  elastic::emit(run, config, out_dir);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic cash simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool audit = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write metrics.csv and summary.json");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--audit", audit, "Also write audit.log");

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", scenario, "Scenario file")->required();

  std::string param;
  std::string values;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "Run one scenario per value of a parameter");
  sweep->add_option("--scenario", scenario, "Scenario file")->required();
  sweep->add_option("--param", param, "Field path, e.g. band.half_width")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", out_dir, "Output directory (one subdirectory per value)")
      ->required();
  sweep->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const elastic::ScenarioConfig config = elastic::parse_scenario_file(scenario);
      std::cout << "ok: " << config.agent_count() << " agents, " << config.days << " days\n";
      return kOk;
    }
    if (*run) {
      elastic::ScenarioConfig config = elastic::parse_scenario_file(scenario);
      if (*seed_opt) config.seed = seed;
      return run_one(config, out_dir, audit);
    }

    const std::string text = read_text(scenario);
    const std::vector<std::string> list = split_values(values);
    std::vector<elastic::ScenarioConfig> configs;
    for (const std::string& v : list) {
      configs.push_back(elastic::parse_scenario(elastic::override_field(text, param, v)));
    }
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{kOk};
    std::mutex err_mutex;
    auto worker = [&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        const std::string dir = out_dir + "/" + slug(param) + "=" + slug(list[i]);
        try {
          run_one(configs[i], dir, false);
        } catch (const elastic::Error& e) {
          const std::lock_guard<std::mutex> lock(err_mutex);
          std::cerr << "error (" << list[i] << "): " << e.what() << "\n";
          int code = exit_code_for(e);
          for (int w = worst.load(); code > w && !worst.compare_exchange_weak(w, code);) {
          }
        }
      }
    };
    std::vector<std::thread> pool;
    const std::size_t n = std::min<std::size_t>(jobs, configs.size());
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return worst.load();
  } catch (const elastic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

#pragma once

// Flat key = value run configuration shared by every CLI command.
//
//   # comment
//   key = value            (lists are comma separated)
//
// Keys: group1, group2, input, out, alpha, l, adjust, statistic, seed,
// replicates, p, rho, n, n1, n2, scenarios, altered, delta_mu, xi.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ggmlrt/simulation.hpp"

namespace ggmlrt::app {

enum class Command { kTest, kScan, kSimulate, kReport, kGenerate };
enum class AdjustChoice { kHolm, kBonferroni, kBoth };
enum class StatisticChoice { kT, kW, kBoth };

std::string_view command_name(Command c);
AdjustChoice parse_adjust_choice(std::string_view s);
StatisticChoice parse_statistic_choice(std::string_view s);
std::string_view adjust_choice_name(AdjustChoice c);
std::string_view statistic_choice_name(StatisticChoice c);

// Simulation grid description. Expanded into one ScenarioSpec per cell.
struct GridConfig {
  int p = 8;
  double rho = 0.4;
  std::vector<int> n = {100};               // balanced n1 = n2 values
  std::optional<std::pair<int, int>> n1n2;  // overrides `n` with one unbalanced cell size
  std::vector<std::string> scenarios = {"H0"};  // H0, S1, S2, S3, custom
  std::vector<int> altered;                 // used by "custom"
  std::vector<double> delta_mu = {0.0};
  std::vector<double> xi = {1.0};
};

struct RunConfig {
  Command command = Command::kTest;
  std::filesystem::path group1;
  std::filesystem::path group2;
  std::filesystem::path input;  // report.json for `report`
  std::filesystem::path out_dir;
  double alpha = 0.05;
  std::vector<int> l_values = {1};
  AdjustChoice adjustment = AdjustChoice::kBoth;
  StatisticChoice statistic = StatisticChoice::kBoth;
  std::uint64_t master_seed = 20240601;
  int replicates = 2000;
  GridConfig grid;
};

using KeyValues = std::map<std::string, std::string>;

// Throws ConfigError with the line number on malformed or unknown keys.
KeyValues parse_key_values(std::string_view text, const std::string& source_name);
KeyValues read_key_values(const std::filesystem::path& path);

void apply_key_values(RunConfig& config, const KeyValues& kv);

// Every cell shares master_seed, so cells with equal (n1, n2) reuse the same
// underlying normal draws.
std::vector<ScenarioSpec> expand_grid(const RunConfig& config);

// Checks everything that can be checked before any computation or output.
void validate(const RunConfig& config);

}  // namespace ggmlrt::app

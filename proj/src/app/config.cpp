#include "ggmlrt/app/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ggmlrt/error.hpp"

namespace ggmlrt::app {
namespace {

const std::set<std::string> kKnownKeys = {
    "group1", "group2", "input", "out", "alpha", "l", "adjust", "statistic", "seed", "replicates",
    "p", "rho", "n", "n1", "n2", "scenarios", "altered", "delta_mu", "xi"};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list item in '" + v + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

template <class T>
T parse_scalar(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("invalid value for '" + key + "': '" + v + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError("non-finite value for '" + key + "'");
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(parse_scalar<T>(key, item));
  return out;
}

std::vector<int> scenario_nodes(const std::string& name, const std::vector<int>& custom) {
  if (name == "H0") return {};
  if (name == "S1") return {1};
  if (name == "S2") return {1, 2};
  if (name == "S3") return {1, 2, 3, 4, 5};
  if (name == "custom") return custom;
  throw ConfigError("unknown scenario '" + name + "' (expected H0, S1, S2, S3 or custom)");
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::kTest: return "test";
    case Command::kScan: return "scan";
    case Command::kSimulate: return "simulate";
    case Command::kReport: return "report";
    case Command::kGenerate: return "generate";
  }
  return "?";
}

AdjustChoice parse_adjust_choice(std::string_view s) {
  if (s == "holm") return AdjustChoice::kHolm;
  if (s == "bonferroni") return AdjustChoice::kBonferroni;
  if (s == "both") return AdjustChoice::kBoth;
  throw ConfigError("adjust must be holm, bonferroni or both");
}

StatisticChoice parse_statistic_choice(std::string_view s) {
  if (s == "t") return StatisticChoice::kT;
  if (s == "w") return StatisticChoice::kW;
  if (s == "both") return StatisticChoice::kBoth;
  throw ConfigError("statistic must be t, w or both");
}

std::string_view adjust_choice_name(AdjustChoice c) {
  return c == AdjustChoice::kHolm ? "holm" : c == AdjustChoice::kBonferroni ? "bonferroni" : "both";
}

std::string_view statistic_choice_name(StatisticChoice c) {
  return c == StatisticChoice::kT ? "t" : c == StatisticChoice::kW ? "w" : "both";
}

KeyValues parse_key_values(std::string_view text, const std::string& source) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!kKnownKeys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (!kv.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str(), path.string());
}

void apply_key_values(RunConfig& c, const KeyValues& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "group1") c.group1 = v;
    else if (key == "group2") c.group2 = v;
    else if (key == "input") c.input = v;
    else if (key == "out") c.out_dir = v;
    else if (key == "alpha") c.alpha = parse_scalar<double>(key, v);
    else if (key == "l") c.l_values = parse_list<int>(key, v);
    else if (key == "adjust") c.adjustment = parse_adjust_choice(v);
    else if (key == "statistic") c.statistic = parse_statistic_choice(v);
    else if (key == "seed") c.master_seed = parse_scalar<std::uint64_t>(key, v);
    else if (key == "replicates") c.replicates = parse_scalar<int>(key, v);
    else if (key == "p") c.grid.p = parse_scalar<int>(key, v);
    else if (key == "rho") c.grid.rho = parse_scalar<double>(key, v);
    else if (key == "n") c.grid.n = parse_list<int>(key, v);
    else if (key == "scenarios") c.grid.scenarios = split_list(v);
    else if (key == "altered") c.grid.altered = parse_list<int>(key, v);
    else if (key == "delta_mu") c.grid.delta_mu = parse_list<double>(key, v);
    else if (key == "xi") c.grid.xi = parse_list<double>(key, v);
  }
  const bool has_n1 = kv.count("n1") != 0;
  const bool has_n2 = kv.count("n2") != 0;
  if (has_n1 != has_n2) throw ConfigError("n1 and n2 must be given together");
  if (has_n1) {
    c.grid.n1n2 = std::make_pair(parse_scalar<int>("n1", kv.at("n1")), parse_scalar<int>("n2", kv.at("n2")));
  }
}

std::vector<ScenarioSpec> expand_grid(const RunConfig& c) {
  const GridConfig& g = c.grid;
  std::vector<std::pair<int, int>> sizes;
  if (g.n1n2) {
    sizes.push_back(*g.n1n2);
  } else {
    for (const int n : g.n) sizes.emplace_back(n, n);
  }

  std::vector<ScenarioSpec> cells;
  std::set<std::string> seen;
  for (const auto& name : g.scenarios) {
    const std::vector<int> nodes = scenario_nodes(name, g.altered);
    const bool null = nodes.empty();
    for (const auto& [n1, n2] : sizes) {
      for (const double dmu : null ? std::vector<double>{0.0} : g.delta_mu) {
        for (const double xi : null ? std::vector<double>{1.0} : g.xi) {
          ScenarioSpec s;
          s.name = name;
          s.p = g.p;
          s.rho = g.rho;
          s.n1 = n1;
          s.n2 = n2;
          s.delta_mu = dmu;
          s.xi = xi;
          s.altered = nodes;
          s.b = c.replicates;
          s.master_seed = c.master_seed;
          s.alpha = c.alpha;
          s.l_values = c.l_values;
          if (seen.insert(s.cell_id()).second) cells.push_back(std::move(s));
        }
      }
    }
  }
  return cells;
}

void validate(const RunConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (c.l_values.empty()) throw ConfigError("at least one l value is required");
  for (std::size_t i = 0; i < c.l_values.size(); ++i) {
    if (c.l_values[i] < 1) throw DomainError("l values must be >= 1");
    if (i > 0 && c.l_values[i] <= c.l_values[i - 1]) throw ConfigError("l values must be increasing");
  }
  if (c.command != Command::kReport && c.out_dir.empty()) throw ConfigError("an output directory is required");

  switch (c.command) {
    case Command::kTest:
    case Command::kScan:
      if (c.group1.empty() || c.group2.empty()) throw ConfigError("group1 and group2 are required");
      for (const auto& p : {c.group1, c.group2}) {
        if (!std::filesystem::is_regular_file(p)) throw IoError("input file not found: " + p.string());
      }
      break;
    case Command::kReport:
      if (c.input.empty()) throw ConfigError("an input report.json is required");
      if (!std::filesystem::is_regular_file(c.input)) throw IoError("input file not found: " + c.input.string());
      if (c.out_dir.empty()) throw ConfigError("an output directory is required");
      break;
    case Command::kSimulate:
    case Command::kGenerate: {
      if (c.replicates < 1) throw DomainError("replicates must be >= 1");
      if (c.grid.p < 2) throw DomainError("p must be >= 2");
      if (!(std::abs(c.grid.rho) < 1.0)) throw DomainError("rho must satisfy |rho| < 1");
      for (const int n : c.grid.n) {
        if (n < 2) throw DomainError("sample sizes must be >= 2");
      }
      for (const double xi : c.grid.xi) {
        if (!(xi > 0.0)) throw DomainError("xi must be > 0");
      }
      for (const int l : c.l_values) {
        if (l > c.grid.p - 1) throw DomainError("l values must lie in 1..p-1");
      }
      const auto cells = expand_grid(c);
      if (cells.empty()) throw ConfigError("the scenario grid is empty");
      // Scenario invariants other than the Bartlett margin are config errors;
      // the margin is reported per cell.
      for (const auto& cell : cells) cell.validate();
      if (c.command == Command::kGenerate && cells.size() != 1) {
        throw ConfigError("generate needs exactly one grid cell, got " + std::to_string(cells.size()));
      }
      break;
    }
  }
}

}  // namespace ggmlrt::app

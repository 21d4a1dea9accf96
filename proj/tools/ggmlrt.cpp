// ggmlrt: two-sample node-level likelihood-ratio testing for Gaussian
// graphical models.
//
//   ggmlrt test     --group1 a.csv --group2 b.csv [--alpha 0.05] [--l 1,2] [--adjust holm] --out dir
//   ggmlrt scan     --group1 a.csv --group2 b.csv [--l 1,2,3] --out dir
//   ggmlrt simulate --config grid.cfg --out dir [--replicates 2000] [--seed 1]
//   ggmlrt report   --input dir/report.json --out dir2
//   ggmlrt generate --config cell.cfg --out dir
//
// Exit status 0 on success; otherwise one line "error: <Code>: <message>" on
// stderr and the code's numeric value (see README).

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <string>

#include "ggmlrt/app/commands.hpp"
#include "ggmlrt/error.hpp"

namespace {

using namespace ggmlrt;

constexpr int kUsageExit = 2;
constexpr int kInternalExit = 1;

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

struct Flags {
  std::string config;
  std::string group1, group2, input, out;
  double alpha = 0.05;
  std::vector<int> l;
  std::string adjust, statistic;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::string scenario;
  std::vector<int> n;
  double delta_mu = 0.0, xi = 1.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Node-level two-sample likelihood-ratio tests for Gaussian graphical models"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "key = value configuration file");
    sub->add_option("--out", f.out, "output directory");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--group1", f.group1, "CSV for group 1 (label row + observations)");
    sub->add_option("--group2", f.group2, "CSV for group 2 (same label row)");
    sub->add_option("--alpha", f.alpha, "nominal level");
    sub->add_option("--l", f.l, "subset sizes, comma separated")->delimiter(',');
    sub->add_option("--adjust", f.adjust, "holm | bonferroni | both");
    sub->add_option("--statistic", f.statistic, "t | w | both");
  };

  CLI::App* test = app.add_subcommand("test", "global test, node increments and selection");
  add_common(test);
  add_data(test);
  CLI::App* scan = app.add_subcommand("scan", "increment tables only");
  add_common(scan);
  add_data(scan);
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo grid");
  add_common(simulate);
  simulate->add_option("--replicates", f.replicates, "replicates per cell");
  simulate->add_option("--seed", f.seed, "master seed");
  simulate->add_option("--alpha", f.alpha, "nominal level");
  simulate->add_option("--l", f.l, "subset sizes, comma separated")->delimiter(',');
  CLI::App* report = app.add_subcommand("report", "re-render CSV outputs from report.json");
  add_common(report);
  report->add_option("--input", f.input, "report.json to re-render");
  CLI::App* generate = app.add_subcommand("generate", "write one simulated two-sample dataset");
  add_common(generate);
  generate->add_option("--seed", f.seed, "master seed");
  generate->add_option("--scenario", f.scenario, "H0 | S1 | S2 | S3");
  generate->add_option("--n", f.n, "per-group sample size");
  generate->add_option("--delta-mu", f.delta_mu, "mean shift on altered nodes");
  generate->add_option("--xi", f.xi, "variance rescale on altered nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: UsageError: " << one_line(e.what()) << "\n";
    return kUsageExit;
  }

  try {
    app::RunConfig config;
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    config.command = name == "test"       ? app::Command::kTest
                     : name == "scan"     ? app::Command::kScan
                     : name == "simulate" ? app::Command::kSimulate
                     : name == "report"   ? app::Command::kReport
                                          : app::Command::kGenerate;
    if (!f.config.empty()) app::apply_key_values(config, app::read_key_values(f.config));

    auto given = [sub](const char* opt) {
      try {
        return sub->get_option(opt)->count() > 0;
      } catch (const CLI::OptionNotFound&) {
        return false;
      }
    };
    if (given("--group1")) config.group1 = f.group1;
    if (given("--group2")) config.group2 = f.group2;
    if (given("--input")) config.input = f.input;
    if (given("--out")) config.out_dir = f.out;
    if (given("--alpha")) config.alpha = f.alpha;
    if (given("--l")) config.l_values = f.l;
    if (given("--adjust")) config.adjustment = app::parse_adjust_choice(f.adjust);
    if (given("--statistic")) config.statistic = app::parse_statistic_choice(f.statistic);
    if (given("--replicates")) config.replicates = f.replicates;
    if (given("--seed")) config.master_seed = f.seed;
    if (given("--scenario")) config.grid.scenarios = {f.scenario};
    if (given("--n")) config.grid.n = f.n;
    if (given("--delta-mu")) config.grid.delta_mu = {f.delta_mu};
    if (given("--xi")) config.grid.xi = {f.xi};

    app::run_command(config);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << one_line(e.what()) << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << one_line(e.what()) << "\n";
    return kInternalExit;
  }
}

#include "ggmlrt/app/commands.hpp"

#include <fstream>
#include <set>

#include "ggmlrt/app/dataset.hpp"
#include "ggmlrt/error.hpp"
#include "ggmlrt/multiplicity.hpp"

namespace ggmlrt::app {

using nlohmann::json;

namespace {

Adjustment selection_method(AdjustChoice c) {
  return c == AdjustChoice::kBonferroni ? Adjustment::kBonferroni : Adjustment::kHolm;
}

// T unless only W was requested.
bool primary_is_w(StatisticChoice c) { return c == StatisticChoice::kW; }

ReportBundle bundle_header(const RunConfig& c, const TwoSampleData& data) {
  ReportBundle b;
  b.command = std::string(command_name(c.command));
  b.alpha = c.alpha;
  b.adjustment = std::string(adjust_choice_name(c.adjustment));
  b.statistic = std::string(statistic_choice_name(c.statistic));
  b.node_labels = data.node_labels();
  return b;
}

SubsetTable build_table(const TwoSampleData& data, const std::vector<SubsetIncrement>& incs, int l,
                        const RunConfig& c) {
  SubsetTable t;
  t.l = l;
  std::vector<std::string> names;
  std::vector<double> raw;
  for (const auto& inc : incs) {
    names.push_back(inc.m.to_string());
    raw.push_back(primary_is_w(c.statistic) ? inc.p_w : inc.p_t);
  }
  const PValueFamily family(names, raw);
  const auto holm_adj = holm(family);
  const auto bonf_adj = bonferroni(family);
  const auto sel = select_nodes(family, c.alpha, selection_method(c.adjustment));
  for (std::size_t k = 0; k < incs.size(); ++k) {
    SubsetRow r;
    r.members = incs[k].m.members();
    for (const int v : r.members) r.labels.push_back(data.node_labels()[static_cast<std::size_t>(v - 1)]);
    r.delta_w = incs[k].delta_w;
    r.delta_t = incs[k].delta_t;
    r.dof = incs[k].dof;
    r.p_w = incs[k].p_w;
    r.p_t = incs[k].p_t;
    r.p_holm = holm_adj[k];
    r.p_bonferroni = bonf_adj[k];
    r.selected = sel.flags[k];
    t.rows.push_back(std::move(r));
  }
  return t;
}

void check_l_range(const RunConfig& c, int p) {
  for (const int l : c.l_values) {
    if (l > p - 1) {
      throw DomainError("l = " + std::to_string(l) + " exceeds p - 1 = " + std::to_string(p - 1));
    }
  }
}

ReportBundle scan_bundle(const RunConfig& c, bool with_nodes) {
  const TwoSampleData data = parse_dataset(c.group1, c.group2);
  check_l_range(c, data.p());
  if (data.p() < 2) throw DomainError("increments require at least 2 nodes");
  ReportBundle b = bundle_header(c, data);

  const SampleMoments moments = sample_moments(data);
  const GlobalTestResult global = adjusted_t(moments);
  std::set<int> ls(c.l_values.begin(), c.l_values.end());
  if (with_nodes) ls.insert(1);
  for (const int l : ls) {
    SubsetTable t = build_table(data, increment_scan(moments, global, l), l, c);
    if (with_nodes && l == 1) {
      for (const auto& r : t.rows) {
        b.node_table.push_back(NodeRow{r.labels.front(), r.delta_w, r.delta_t, r.dof,
                                       primary_is_w(c.statistic) ? r.p_w : r.p_t, r.p_holm,
                                       r.p_bonferroni, r.selected});
      }
    }
    if (std::find(c.l_values.begin(), c.l_values.end(), l) != c.l_values.end()) {
      b.subset_tables.push_back(std::move(t));
    }
  }
  if (with_nodes) b.global = global;
  return b;
}

std::vector<PlotSeries> cell_plots(const MonteCarloSummary& s) {
  std::vector<PlotSeries> plots;
  const std::string id = s.spec.cell_id();
  if (s.spec.altered.empty()) {
    for (const auto& f : s.families) {
      const auto& sub = f.subsets.front();
      const std::string stem = id + "_l" + std::to_string(f.l) + "_" + "m";
      std::string members;
      for (const int v : sub.m.members()) members += std::to_string(v);
      plots.push_back(make_plot("null_T_" + stem + members, id, "null", f.l, sub.m.members(), sub.dof,
                                0.0, sub.draws_t));
      plots.push_back(make_plot("null_W_" + stem + members, id, "null", f.l, sub.m.members(), sub.dof,
                                0.0, sub.draws_w));
    }
    return plots;
  }
  const FamilySummary* singles = s.family(1);
  if (!singles) return plots;
  bool unaltered_done = false;
  for (std::size_t j = 0; j < singles->subsets.size(); ++j) {
    const auto& sub = singles->subsets[j];
    const int node = sub.m.members().front();
    const bool altered = std::find(s.spec.altered.begin(), s.spec.altered.end(), node) != s.spec.altered.end();
    if (!altered) {
      if (unaltered_done) continue;
      unaltered_done = true;
    }
    plots.push_back(make_plot("noncentral_T_" + id + "_node" + std::to_string(node), id, "noncentral", 1,
                              sub.m.members(), sub.dof, s.lambda_hat.at(j), sub.draws_t));
  }
  return plots;
}

json read_json_or(const std::filesystem::path& path, json fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return fallback;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return fallback;
  }
}

}  // namespace

ReportBundle cmd_test(const RunConfig& c) { return scan_bundle(c, true); }

ReportBundle cmd_scan(const RunConfig& c) { return scan_bundle(c, false); }

ReportBundle cmd_simulate(const RunConfig& c, unsigned threads) {
  const auto cells = expand_grid(c);
  ReportBundle b;
  b.command = "simulate";
  b.alpha = c.alpha;
  b.adjustment = std::string(adjust_choice_name(c.adjustment));
  b.statistic = std::string(statistic_choice_name(c.statistic));
  for (int j = 1; j <= c.grid.p; ++j) b.node_labels.push_back(std::to_string(j));

  const auto cell_dir = c.out_dir / "cells";
  const auto manifest_path = c.out_dir / "manifest.json";
  std::error_code ec;
  std::filesystem::create_directories(cell_dir, ec);
  if (ec) throw IoError("cannot create directory " + cell_dir.string());
  json manifest = read_json_or(manifest_path, json::object());
  if (!manifest.is_object() || !manifest.contains("cells") || !manifest["cells"].is_object()) {
    manifest = json{{"cells", json::object()}};
  }

  for (const auto& spec : cells) {
    const std::string id = spec.cell_id();
    const auto cell_path = cell_dir / (id + ".json");
    const json fingerprint = cell_to_json(CellRecord{spec, id}).at("spec");

    if (manifest["cells"].contains(id) && manifest["cells"][id] == fingerprint) {
      const json saved = read_json_or(cell_path, nullptr);
      if (!saved.is_null()) {
        try {
          b.cells.push_back(cell_from_json(saved.at("cell")));
          for (const auto& p : saved.at("plots")) b.plots.push_back(plot_from_json(p));
          continue;
        } catch (const json::exception&) {
          // unreadable checkpoint: recompute
        }
      }
    }

    CellRecord record;
    std::vector<PlotSeries> plots;
    try {
      const MonteCarloSummary summary = run_scenario(spec, threads);
      record = cell_from_summary(summary);
      plots = cell_plots(summary);
    } catch (const Error& e) {
      record = CellRecord{spec, id};
      record.error_code = std::string(error_code_name(e.code()));
      record.error_message = e.what();
    }

    json saved{{"cell", cell_to_json(record)}, {"plots", json::array()}};
    for (const auto& p : plots) saved["plots"].push_back(plot_to_json(p));
    write_text_file(cell_path, saved.dump(2) + "\n");
    manifest["cells"][id] = fingerprint;
    write_text_file(manifest_path, manifest.dump(2) + "\n");

    b.cells.push_back(std::move(record));
    for (auto& p : plots) b.plots.push_back(std::move(p));
  }
  return b;
}

ReportBundle cmd_report(const RunConfig& c) { return read_report(c.input); }

void cmd_generate(const RunConfig& c) {
  const auto cells = expand_grid(c);
  const ScenarioSpec& spec = cells.front();
  const TwoSampleData data = simulate_data(spec, 0);
  std::vector<std::string> labels;
  for (int j = 1; j <= spec.p; ++j) labels.push_back("n" + std::to_string(j));
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create directory " + c.out_dir.string());
  write_group_csv(c.out_dir / "group1.csv", labels, data.x1());
  write_group_csv(c.out_dir / "group2.csv", labels, data.x2());
}

ReportBundle run_command(const RunConfig& c, unsigned threads) {
  validate(c);
  ReportBundle b;
  switch (c.command) {
    case Command::kTest: b = cmd_test(c); break;
    case Command::kScan: b = cmd_scan(c); break;
    case Command::kSimulate: b = cmd_simulate(c, threads); break;
    case Command::kReport: b = cmd_report(c); break;
    case Command::kGenerate: cmd_generate(c); return b;
  }
  emit_report(b, c.out_dir);
  return b;
}

}  // namespace ggmlrt::app

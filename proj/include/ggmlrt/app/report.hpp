#pragma once

// Report bundle written by every command. report.json is the complete,
// lossless form; the CSV files are renderings of it, so `report` can
// regenerate them from report.json alone. Schema: docs/report_schema.md.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggmlrt/lrt.hpp"
#include "ggmlrt/simulation.hpp"

namespace ggmlrt::app {

inline constexpr int kReportSchemaVersion = 1;

struct NodeRow {
  std::string label;
  double delta_w = 0.0;
  double delta_t = 0.0;
  int dof = 0;
  double p_raw = 1.0;
  double p_holm = 1.0;
  double p_bonferroni = 1.0;
  bool selected = false;
};

struct SubsetRow {
  std::vector<int> members;
  std::vector<std::string> labels;
  double delta_w = 0.0;
  double delta_t = 0.0;
  int dof = 0;
  double p_w = 1.0;
  double p_t = 1.0;
  double p_holm = 1.0;        // adjusted, primary statistic
  double p_bonferroni = 1.0;
  bool selected = false;
};

struct SubsetTable {
  int l = 0;
  std::vector<SubsetRow> rows;
};

struct SubsetRates {
  std::vector<int> members;
  int dof = 0;
  std::array<double, 2> reject{};
  std::array<double, 2> mean_delta{};
  std::array<double, 2> ks{};
};

struct FamilyRates {
  int l = 0;
  std::vector<SubsetRates> subsets;
  RateGrid fwer;
  RateGrid power_any;
  RateGrid power_all;
};

// One simulation grid cell: either a summary or an error entry.
struct CellRecord {
  ScenarioSpec spec;
  std::string cell_id;
  std::optional<std::string> error_code;
  std::optional<std::string> error_message;
  int completed = 0;
  int failures = 0;
  std::array<double, 2> global_reject{};
  double global_ks_uniform_t = 0.0;
  std::vector<FamilyRates> families;
  std::vector<double> lambda_hat;
  std::vector<NoncentralFit> noncentral;
};

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  double density = 0.0;
  double theory_density = 0.0;
};

struct EcdfPoint {
  double x = 0.0;
  double ecdf = 0.0;
  double theory_cdf = 0.0;
};

// Plot-ready data for one sample against its reference distribution.
struct PlotSeries {
  std::string name;    // file stem under plotdata/
  std::string cell_id;
  std::string kind;    // "null" or "noncentral"
  int l = 0;
  std::vector<int> members;
  double dof = 0.0;
  double lambda = 0.0;
  std::vector<HistogramBin> bins;
  std::vector<EcdfPoint> ecdf;
};

struct ReportBundle {
  std::string command;
  double alpha = 0.05;
  std::string adjustment = "both";
  std::string statistic = "both";
  std::vector<std::string> node_labels;
  std::optional<GlobalTestResult> global;
  std::vector<NodeRow> node_table;
  std::vector<SubsetTable> subset_tables;
  std::vector<CellRecord> cells;
  std::vector<PlotSeries> plots;
};

nlohmann::json to_json(const ReportBundle& bundle);
ReportBundle bundle_from_json(const nlohmann::json& j);

nlohmann::json cell_to_json(const CellRecord& cell);
CellRecord cell_from_json(const nlohmann::json& j);
nlohmann::json plot_to_json(const PlotSeries& plot);
PlotSeries plot_from_json(const nlohmann::json& j);

ReportBundle read_report(const std::filesystem::path& path);

// Fixed-bin histogram covering every draw, with the reference density
// averaged over each bin; ECDF on up to `ecdf_points` order statistics.
PlotSeries make_plot(std::string name, std::string cell_id, std::string kind, int l,
                     std::vector<int> members, double dof, double lambda,
                     std::vector<double> draws, int bins = 40, std::size_t ecdf_points = 200);

CellRecord cell_from_summary(const MonteCarloSummary& summary);

// Writes report.json, nodes.csv (when a node table exists), subsets_l<l>.csv,
// summary.csv / fwer.csv / power.csv (when cells exist) and plotdata/*.csv.
// Throws IoError naming the path on failure.
void emit_report(const ReportBundle& bundle, const std::filesystem::path& directory);

// Atomic-ish write of a text file (LF newlines, binary mode).
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ggmlrt::app

#pragma once

#include <filesystem>

#include "ggmlrt/app/config.hpp"
#include "ggmlrt/app/report.hpp"

namespace ggmlrt::app {

// Global test, increment scans for config.l_values (l = 1 always, for the
// node table), multiplicity adjustment and node selection.
ReportBundle cmd_test(const RunConfig& config);

// Increment tables only.
ReportBundle cmd_scan(const RunConfig& config);

// One cell record per grid cell. Completed cells are checkpointed under
// <out>/cells/ and listed in <out>/manifest.json; a rerun with the same
// out directory reuses any cell whose recorded spec matches.
// threads == 0 uses default_thread_count().
ReportBundle cmd_simulate(const RunConfig& config, unsigned threads = 0);

// Re-reads config.input (a report.json).
ReportBundle cmd_report(const RunConfig& config);

// Writes group1.csv / group2.csv for replicate 0 of the single grid cell.
void cmd_generate(const RunConfig& config);

// validate + run + emit. Returns the bundle that was written.
ReportBundle run_command(const RunConfig& config, unsigned threads = 0);

}  // namespace ggmlrt::app

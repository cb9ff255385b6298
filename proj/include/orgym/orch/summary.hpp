#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "orgym/core/types.hpp"

namespace orgym::orch {

struct SliceSummary {
  SliceId slice = 0;
  std::uint64_t samples = 0;
  double mean_tx_tbs_rate = 0.0;    // TBs per second per UE report
  double median_tx_tbs_rate = 0.0;
  double mean_dl_buffer_bytes = 0.0;
  double median_dl_buffer_bytes = 0.0;
  std::uint64_t total_tx_bytes = 0;
  /// Sorted samples; the empirical CDF of each metric.
  std::vector<double> tx_tbs_rate_cdf;
  std::vector<double> dl_buffer_bytes_cdf;
};

/// Per-run aggregates. `metadata` is the run.json document the summary was
/// computed alongside, embedded verbatim (serialized JSON).
struct RunSummary {
  std::string metadata;
  std::vector<SliceSummary> slices;
};

double median_of(std::vector<double> values);
double mean_of(const std::vector<double>& values);

/// Aggregates records reported every `report_period_ms`.
std::vector<SliceSummary> summarize_records(const std::vector<KpmRecord>& records,
                                            std::uint32_t report_period_ms);

/// Recomputes the summary of a run directory from its run.json and
/// `*_metrics.csv` files (read in file-name order).
RunSummary summarize_run_dir(const std::filesystem::path& dir);

/// Canonical JSON text of a summary, as written to summary.json.
std::string summary_to_json(const RunSummary& summary);

/// Base-station KPM CSVs of a run directory, sorted by file name.
std::vector<std::filesystem::path> metrics_files(const std::filesystem::path& dir);

}  // namespace orgym::orch

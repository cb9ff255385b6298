#include "orgym/orch/summary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"
#include "orgym/core/kpm_csv.hpp"

namespace orgym::orch {

using nlohmann::ordered_json;

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<SliceSummary> summarize_records(const std::vector<KpmRecord>& records,
                                            std::uint32_t report_period_ms) {
  const double period_s = static_cast<double>(report_period_ms) / 1000.0;
  std::map<SliceId, SliceSummary> by_slice;
  for (const auto& r : records) {
    auto& s = by_slice[r.slice_id];
    s.slice = r.slice_id;
    ++s.samples;
    s.total_tx_bytes += r.tx_bytes;
    s.tx_tbs_rate_cdf.push_back(static_cast<double>(r.tx_tbs) / period_s);
    s.dl_buffer_bytes_cdf.push_back(static_cast<double>(r.dl_buffer_bytes));
  }
  std::vector<SliceSummary> out;
  for (auto& [_, s] : by_slice) {
    std::sort(s.tx_tbs_rate_cdf.begin(), s.tx_tbs_rate_cdf.end());
    std::sort(s.dl_buffer_bytes_cdf.begin(), s.dl_buffer_bytes_cdf.end());
    s.mean_tx_tbs_rate = mean_of(s.tx_tbs_rate_cdf);
    s.median_tx_tbs_rate = median_of(s.tx_tbs_rate_cdf);
    s.mean_dl_buffer_bytes = mean_of(s.dl_buffer_bytes_cdf);
    s.median_dl_buffer_bytes = median_of(s.dl_buffer_bytes_cdf);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::filesystem::path> metrics_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.ends_with("_metrics.csv")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

RunSummary summarize_run_dir(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "run.json");
  if (!meta_in) throw std::runtime_error(fmt::format("{} has no run.json", dir.string()));
  std::stringstream ss;
  ss << meta_in.rdbuf();
  auto meta = ordered_json::parse(ss.str());
  const auto period = meta.at("scenario").at("report-period-ms").get<std::uint32_t>();

  std::vector<KpmRecord> records;
  for (const auto& f : metrics_files(dir)) {
    auto rows = read_kpm_csv_file(f);
    records.insert(records.end(), rows.begin(), rows.end());
  }
  return RunSummary{meta.dump(), summarize_records(records, period)};
}

std::string summary_to_json(const RunSummary& summary) {
  ordered_json doc;
  doc["run"] = ordered_json::parse(summary.metadata);
  doc["slices"] = ordered_json::array();
  for (const auto& s : summary.slices) {
    ordered_json j;
    j["slice"] = s.slice;
    j["samples"] = s.samples;
    j["mean-tx-tbs-rate"] = s.mean_tx_tbs_rate;
    j["median-tx-tbs-rate"] = s.median_tx_tbs_rate;
    j["mean-dl-buffer-bytes"] = s.mean_dl_buffer_bytes;
    j["median-dl-buffer-bytes"] = s.median_dl_buffer_bytes;
    j["total-tx-bytes"] = s.total_tx_bytes;
    j["cdf-tx-tbs-rate"] = s.tx_tbs_rate_cdf;
    j["cdf-dl-buffer-bytes"] = s.dl_buffer_bytes_cdf;
    doc["slices"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace orgym::orch

#include "orgym/orch/compare.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "orgym/core/kpm_csv.hpp"
#include "orgym/orch/summary.hpp"

namespace orgym::orch {

namespace {

SampleStats stats_of(const std::vector<double>& v) {
  return SampleStats{v.size(), median_of(v), mean_of(v)};
}

std::vector<double> run_samples(const std::filesystem::path& dir, SliceId slice, const std::string& metric) {
  std::vector<double> out;
  for (const auto& f : metrics_files(dir)) {
    for (const auto& r : read_kpm_csv_file(f)) {
      if (r.slice_id == slice) out.push_back(kpm_metric(r, metric));
    }
  }
  return out;
}

const char* side_name(Side s) {
  switch (s) {
    case Side::A: return "A";
    case Side::B: return "B";
    case Side::Tie: return "tie";
  }
  return "?";
}

}  // namespace

bool metric_lower_is_better(const std::string& metric) { return metric == "dl_buffer_bytes"; }

std::vector<std::pair<std::string, std::vector<double>>> load_metric_samples(
    const std::filesystem::path& dir, SliceId slice, const std::string& metric) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(fmt::format("{} is not a directory", dir.string()));
  }
  std::vector<std::pair<std::string, std::vector<double>>> out;
  if (!metrics_files(dir).empty()) {
    out.emplace_back(".", run_samples(dir, slice, metric));
    return out;
  }
  std::vector<std::filesystem::path> subdirs;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_directory() && !metrics_files(e.path()).empty()) subdirs.push_back(e.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) out.emplace_back(d.filename().string(), run_samples(d, slice, metric));
  if (out.empty()) throw EmptyData(fmt::format("no KPM CSVs under {}", dir.string()));
  return out;
}

std::string format_cdf(const std::vector<double>& sorted) {
  std::string out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out += fmt::format("{} {}\n", sorted[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

Comparison compare_runs(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b, SliceId slice,
                        const std::string& metric, const std::optional<std::filesystem::path>& cdf_dir) {
  if (!is_kpm_metric(metric)) throw std::invalid_argument(fmt::format("'{}' is not a KPM metric column", metric));
  auto runs_a = load_metric_samples(dir_a, slice, metric);
  auto runs_b = load_metric_samples(dir_b, slice, metric);

  Comparison c;
  c.slice = slice;
  c.metric = metric;
  c.lower_is_better = metric_lower_is_better(metric);
  for (const auto& [_, v] : runs_a) c.samples_a.insert(c.samples_a.end(), v.begin(), v.end());
  for (const auto& [_, v] : runs_b) c.samples_b.insert(c.samples_b.end(), v.begin(), v.end());
  if (c.samples_a.empty()) throw EmptyData(fmt::format("no {} samples for slice {} in {}", metric, slice, dir_a.string()));
  if (c.samples_b.empty()) throw EmptyData(fmt::format("no {} samples for slice {} in {}", metric, slice, dir_b.string()));
  std::sort(c.samples_a.begin(), c.samples_a.end());
  std::sort(c.samples_b.begin(), c.samples_b.end());
  c.pooled_a = stats_of(c.samples_a);
  c.pooled_b = stats_of(c.samples_b);

  std::map<std::string, const std::vector<double>*> by_seed_b;
  for (const auto& [seed, v] : runs_b) by_seed_b[seed] = &v;
  const bool single = runs_a.size() == 1 && runs_b.size() == 1;
  for (const auto& [seed, v] : runs_a) {
    const std::vector<double>* other = single ? &runs_b.front().second : nullptr;
    if (!single) {
      auto it = by_seed_b.find(seed);
      if (it == by_seed_b.end()) continue;
      other = it->second;
    }
    c.per_seed.push_back(SeedComparison{seed, stats_of(v), stats_of(*other)});
  }

  if (c.pooled_a.median == c.pooled_b.median) {
    c.dominant = Side::Tie;
  } else if ((c.pooled_a.median < c.pooled_b.median) == c.lower_is_better) {
    c.dominant = Side::A;
  } else {
    c.dominant = Side::B;
  }

  if (cdf_dir) {
    std::filesystem::create_directories(*cdf_dir);
    std::ofstream(*cdf_dir / "cdf_a.txt") << format_cdf(c.samples_a);
    std::ofstream(*cdf_dir / "cdf_b.txt") << format_cdf(c.samples_b);
  }
  return c;
}

std::string format_comparison(const Comparison& c) {
  std::string out = fmt::format("slice {} metric {} ({} is better)\n", c.slice, c.metric,
                                c.lower_is_better ? "lower" : "higher");
  out += fmt::format("{:<12} {:>14} {:>14} {:>14} {:>14}\n", "seed", "median_a", "median_b", "mean_a", "mean_b");
  for (const auto& s : c.per_seed) {
    out += fmt::format("{:<12} {:>14.3f} {:>14.3f} {:>14.3f} {:>14.3f}\n", s.seed, s.a.median, s.b.median,
                       s.a.mean, s.b.mean);
  }
  out += fmt::format("{:<12} {:>14.3f} {:>14.3f} {:>14.3f} {:>14.3f}\n", "pooled", c.pooled_a.median,
                     c.pooled_b.median, c.pooled_a.mean, c.pooled_b.mean);
  out += fmt::format("median difference (b - a): {:.3f}\n", c.pooled_b.median - c.pooled_a.median);
  out += fmt::format("dominant: {}\n", side_name(c.dominant));
  return out;
}

}  // namespace orgym::orch

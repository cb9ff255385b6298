#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orgym/core/types.hpp"

namespace orgym::orch {

/// The selected slice/metric has no samples on one side.
class EmptyData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleStats {
  std::uint64_t n = 0;
  double median = 0.0;
  double mean = 0.0;
};

struct SeedComparison {
  std::string seed;  // run directory name; "." for a single run
  SampleStats a;
  SampleStats b;
};

enum class Side { A, B, Tie };

struct Comparison {
  SliceId slice = 0;
  std::string metric;
  bool lower_is_better = false;
  std::vector<SeedComparison> per_seed;  // runs present on both sides
  SampleStats pooled_a;
  SampleStats pooled_b;
  Side dominant = Side::Tie;  // by pooled median
  std::vector<double> samples_a;  // sorted
  std::vector<double> samples_b;
};

/// Only buffer occupancy is a cost; every other metric is a gain.
bool metric_lower_is_better(const std::string& metric);

/// Loads one slice's metric samples from a run directory, or from every
/// run sub-directory (e.g. a batch job's `<seed>/` folders) keyed by name.
std::vector<std::pair<std::string, std::vector<double>>> load_metric_samples(
    const std::filesystem::path& dir, SliceId slice, const std::string& metric);

/// Compares two runs or run collections on one slice metric. Throws
/// CsvSchemaError naming the differing column, EmptyData when a side has no
/// samples, std::invalid_argument for an unknown metric. When `cdf_dir` is
/// given, writes `cdf_a.txt` and `cdf_b.txt` (lines of "value cumprob").
Comparison compare_runs(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b, SliceId slice,
                        const std::string& metric,
                        const std::optional<std::filesystem::path>& cdf_dir = std::nullopt);

/// Empirical CDF as "value cumprob" lines over sorted samples.
std::string format_cdf(const std::vector<double>& sorted);

std::string format_comparison(const Comparison& c);

}  // namespace orgym::orch

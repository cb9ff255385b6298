#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "orgym/orch/experiment.hpp"

namespace orgym::orch {

/// Unreadable or malformed batch file.
class BatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BatchJob {
  std::string name;
  std::filesystem::path scenario;
  std::optional<std::filesystem::path> xapp;  // nullopt: no xApp
  double duration_s = 0.0;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out;  // runs land in <out>/<name>/<seed>/
};

struct BatchSpec {
  std::vector<BatchJob> jobs;
};

/// Parses `{"out": dir, "jobs": [{"name", "scenario", "xapp", "duration-s",
/// "seeds", "out"?}]}`. Relative paths resolve against `base_dir`. Throws
/// BatchError on malformed input, duplicate job names, non-positive
/// durations or colliding run directories.
BatchSpec parse_batch(std::string_view text, const std::filesystem::path& base_dir);
BatchSpec load_batch_file(const std::filesystem::path& path);

struct BatchRun {
  std::string job;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  bool ok = false;
  std::string error;
  std::optional<RunSummary> summary;
};

struct BatchReport {
  std::vector<BatchRun> runs;
  std::size_t failures() const;
};

/// Runs every (job, seed) sequentially. A failing run is recorded and the
/// batch moves on. Writes `<out>/batch_report.json` for each distinct job
/// output root.
BatchReport run_batch(const BatchSpec& spec, Transport transport = Transport::Tcp);

std::string batch_report_to_json(const BatchReport& report);

}  // namespace orgym::orch
